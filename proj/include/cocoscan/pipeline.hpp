#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cocoscan/classifiers.hpp"
#include "cocoscan/dataset.hpp"
#include "cocoscan/features.hpp"

namespace cocoscan {

enum class FeatureMethod { Original, Pca, Lda };
enum class ClassifierKind { Knn, LinearSvm, RbfSvm };

std::string_view to_string(FeatureMethod m);
std::string_view to_string(ClassifierKind k);
FeatureMethod parse_feature_method(std::string_view s);
ClassifierKind parse_classifier_kind(std::string_view s);

struct SpectralWindow {
  double lo_nm = 0.0;
  double hi_nm = 0.0;
  friend bool operator==(const SpectralWindow&, const SpectralWindow&) = default;
};

/// Parses `LO:HI` (nm).
SpectralWindow parse_window(std::string_view s);

/// Window -> feature extraction -> classifier, plus the CV settings.
struct PipelineConfig {
  std::optional<SpectralWindow> window;

  FeatureMethod feature_method = FeatureMethod::Lda;
  std::size_t pca_components = 2;
  LdaConfig lda;

  ClassifierKind classifier = ClassifierKind::Knn;
  std::size_t k = 5;
  Metric metric = Metric::Euclidean;
  double svm_c = 1.0;
  std::optional<double> gamma;  // rbf; empty selects default_rbf_gamma
  double svm_tol = 1e-3;
  int svm_max_passes = 200;

  int folds = 5;
  std::uint64_t seed = kDefaultSeed;
  bool relaxed_folds = false;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Throws InvalidInput naming the offending field.
void validate(const PipelineConfig& cfg);

SpectralDataset apply_window(const SpectralDataset& ds, const PipelineConfig& cfg);

using FeatureModel = std::variant<std::monostate, PcaModel, LdaModel>;
using ClassifierModel = std::variant<KnnModel, SvmMulticlassModel>;

struct FittedPipeline {
  FeatureModel features;
  ClassifierModel classifier;

  Matrix transform(const Matrix& x) const;
  /// Predicts class ids for already-windowed rows.
  std::vector<int> predict(const Matrix& x) const;
};

/// Fits features and classifier on `ds`, which must already be windowed.
/// Failures are prefixed with the stage name.
FittedPipeline fit_pipeline(const SpectralDataset& ds, const PipelineConfig& cfg);

}  // namespace cocoscan
