#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cocoscan/dataset.hpp"
#include "cocoscan/pipeline.hpp"

namespace cocoscan {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t classes)
      : classes_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const noexcept { return classes_; }
  long count(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * classes_ + predicted];
  }
  void add(std::size_t truth, std::size_t predicted, long times = 1) {
    counts_[truth * classes_ + predicted] += times;
  }
  long row_sum(std::size_t truth) const;
  long total() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t classes_ = 0;
  std::vector<long> counts_;
};

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t classes);

/// Macro-averaged recall; for two classes this is (sensitivity + specificity)/2.
double balanced_accuracy(const ConfusionMatrix& cm);
std::vector<double> per_class_recall(const ConfusionMatrix& cm);

struct FoldResult {
  int fold = 0;
  ConfusionMatrix confusion;
};

struct CvReport {
  std::vector<FoldResult> per_fold;
  ConfusionMatrix pooled;
  double balanced_accuracy = 0.0;
  std::vector<double> per_class_recall;
  std::vector<std::string> class_names;
  std::string config_echo;

  /// Header `fold,n,balanced_accuracy,recall_<class>...`; one row per fold,
  /// then a `pooled` row. Metrics undefined for a fold print as NA.
  std::string to_csv() const;
  std::string to_text() const;
};

/// Predicts class ids for feature rows.
using Predictor = std::function<std::vector<int>(const Matrix&)>;
/// Trains on a partition and returns its predictor.
using PipelineFitter = std::function<Predictor(const SpectralDataset&)>;

CvReport cross_validate(const SpectralDataset& ds, const PipelineFitter& fit,
                        const FoldAssignment& folds);

/// Applies cfg.window, then runs stratified CV with cfg.folds and cfg.seed.
/// Feature extractors and classifiers see only each fold's training rows.
CvReport cross_validate(const SpectralDataset& ds, const PipelineConfig& cfg);

struct GridCell {
  FeatureMethod feature = FeatureMethod::Original;
  ClassifierKind classifier = ClassifierKind::Knn;
  std::optional<CvReport> report;
  std::string error;  // set when the cell failed
};

struct GridReport {
  std::vector<GridCell> cells;
  std::string config_echo;

  const GridCell* find(FeatureMethod f, ClassifierKind c) const;
  std::string to_csv() const;
  /// Balanced-accuracy table (classifiers x feature sets) followed by the
  /// per-class recall table for the LDA column.
  std::string to_text() const;
};

inline constexpr FeatureMethod kAllFeatureMethods[] = {FeatureMethod::Original,
                                                       FeatureMethod::Pca, FeatureMethod::Lda};
inline constexpr ClassifierKind kAllClassifiers[] = {ClassifierKind::Knn, ClassifierKind::LinearSvm,
                                                     ClassifierKind::RbfSvm};

/// One cross_validate per (feature, classifier) cell on shared folds. A
/// failing cell records its error and the run continues.
GridReport grid_evaluate(const SpectralDataset& ds, const PipelineConfig& base,
                         std::span<const FeatureMethod> features = kAllFeatureMethods,
                         std::span<const ClassifierKind> classifiers = kAllClassifiers);

/// Pooled balanced accuracy of the KNN pipeline for each k, on shared folds.
std::vector<std::pair<std::size_t, double>> sweep_k(const SpectralDataset& ds,
                                                    const PipelineConfig& cfg,
                                                    std::span<const std::size_t> k_values);

std::string sweep_to_csv(const std::vector<std::pair<std::size_t, double>>& sweep);

}  // namespace cocoscan
