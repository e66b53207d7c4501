#include "cocoscan/pipeline.hpp"

#include <cmath>
#include <type_traits>
#include <variant>

#include "cocoscan/error.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

std::string_view to_string(FeatureMethod m) {
  switch (m) {
    case FeatureMethod::Original:
      return "original";
    case FeatureMethod::Pca:
      return "pca";
    case FeatureMethod::Lda:
      return "lda";
  }
  return "?";
}

std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::Knn:
      return "knn";
    case ClassifierKind::LinearSvm:
      return "linear_svm";
    case ClassifierKind::RbfSvm:
      return "rbf_svm";
  }
  return "?";
}

FeatureMethod parse_feature_method(std::string_view s) {
  if (s == "original") return FeatureMethod::Original;
  if (s == "pca") return FeatureMethod::Pca;
  if (s == "lda") return FeatureMethod::Lda;
  throw InvalidInput("unknown feature method '" + std::string(s) +
                     "' (expected original, pca or lda)");
}

ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "knn") return ClassifierKind::Knn;
  if (s == "linear_svm") return ClassifierKind::LinearSvm;
  if (s == "rbf_svm") return ClassifierKind::RbfSvm;
  throw InvalidInput("unknown classifier '" + std::string(s) +
                     "' (expected knn, linear_svm or rbf_svm)");
}

SpectralWindow parse_window(std::string_view s) {
  const auto parts = textio::split(s, ':');
  if (parts.size() != 2) throw InvalidInput("window must be LO:HI, got '" + std::string(s) + "'");
  auto lo = textio::parse_double(textio::trim(parts[0]));
  auto hi = textio::parse_double(textio::trim(parts[1]));
  if (!lo || !hi || !std::isfinite(*lo) || !std::isfinite(*hi))
    throw InvalidInput("window bounds must be numbers, got '" + std::string(s) + "'");
  if (!(*lo < *hi)) throw InvalidInput("window lower bound must be below upper bound");
  return {*lo, *hi};
}

void validate(const PipelineConfig& cfg) {
  if (cfg.window && !(cfg.window->lo_nm < cfg.window->hi_nm))
    throw InvalidInput("data.window: lower bound must be below upper bound");
  if (cfg.pca_components < 1) throw InvalidInput("features.pca_components must be >= 1");
  if (!(cfg.lda.ridge_eps_rel > 0.0)) throw InvalidInput("features.ridge_eps_rel must be > 0");
  if (cfg.k < 1) throw InvalidInput("classifier.k must be >= 1");
  if (!(cfg.svm_c > 0.0)) throw InvalidInput("classifier.c must be > 0");
  if (cfg.gamma && !(*cfg.gamma > 0.0)) throw InvalidInput("classifier.gamma must be > 0");
  if (!(cfg.svm_tol > 0.0)) throw InvalidInput("classifier.tol must be > 0");
  if (cfg.svm_max_passes < 1) throw InvalidInput("classifier.max_passes must be >= 1");
  if (cfg.folds < 2) throw InvalidInput("cv.folds must be >= 2");
}

SpectralDataset apply_window(const SpectralDataset& ds, const PipelineConfig& cfg) {
  if (!cfg.window) return ds;
  return select_window(ds, cfg.window->lo_nm, cfg.window->hi_nm);
}

Matrix FittedPipeline::transform(const Matrix& x) const {
  if (const auto* pca = std::get_if<PcaModel>(&features)) return transform_pca(*pca, x);
  if (const auto* lda = std::get_if<LdaModel>(&features)) return transform_lda(*lda, x);
  return x;
}

std::vector<int> FittedPipeline::predict(const Matrix& x) const {
  const Matrix z = transform(x);
  std::vector<int> out(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) {
    out[i] = std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, KnnModel>)
            return predict_knn(m, z.row(i));
          else
            return predict_svm_multiclass(m, z.row(i));
        },
        classifier);
  }
  return out;
}

FittedPipeline fit_pipeline(const SpectralDataset& ds, const PipelineConfig& cfg) {
  validate(cfg);
  FittedPipeline fp;
  Matrix z;
  try {
    switch (cfg.feature_method) {
      case FeatureMethod::Original:
        z = ds.x();
        break;
      case FeatureMethod::Pca: {
        auto pca = fit_pca(ds.x(), cfg.pca_components);
        z = transform_pca(pca, ds.x());
        fp.features = std::move(pca);
        break;
      }
      case FeatureMethod::Lda: {
        auto lda = fit_lda(ds, cfg.lda);
        z = transform_lda(lda, ds.x());
        fp.features = std::move(lda);
        break;
      }
    }
  } catch (const Error& e) {
    rethrow_with_context(e, "features (" + std::string(to_string(cfg.feature_method)) + ")");
  }

  const int c = static_cast<int>(ds.num_classes());
  try {
    if (cfg.classifier == ClassifierKind::Knn) {
      fp.classifier = fit_knn(z, ds.y(), cfg.k, cfg.metric, c);
    } else {
      SvmParams params;
      params.c = cfg.svm_c;
      params.tol = cfg.svm_tol;
      params.max_passes = cfg.svm_max_passes;
      if (cfg.classifier == ClassifierKind::RbfSvm) {
        params.kernel.type = KernelType::Rbf;
        params.kernel.gamma = cfg.gamma ? *cfg.gamma : default_rbf_gamma(z);
      }
      fp.classifier = fit_svm_multiclass(z, ds.y(), params, c);
    }
  } catch (const Error& e) {
    rethrow_with_context(e, "classifier (" + std::string(to_string(cfg.classifier)) + ")");
  }
  return fp;
}

}  // namespace cocoscan
