#include "cocoscan/evaluation.hpp"

#include <algorithm>
#include <memory>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "cocoscan/config.hpp"
#include "cocoscan/error.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

long ConfusionMatrix::row_sum(std::size_t truth) const {
  long s = 0;
  for (std::size_t j = 0; j < classes_; ++j) s += count(truth, j);
  return s;
}

long ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), 0L);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw InvalidInput("confusion matrix size mismatch");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                 std::size_t classes) {
  if (y_true.size() != y_pred.size())
    throw InvalidInput("confusion matrix: " + std::to_string(y_true.size()) +
                       " true labels but " + std::to_string(y_pred.size()) + " predictions");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i];
    const int p = y_pred[i];
    if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= classes ||
        static_cast<std::size_t>(p) >= classes)
      throw InvalidInput("confusion matrix: class id out of range at position " +
                         std::to_string(i));
    cm.add(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
  }
  return cm;
}

std::vector<double> per_class_recall(const ConfusionMatrix& cm) {
  std::vector<double> recall(cm.classes());
  for (std::size_t i = 0; i < cm.classes(); ++i) {
    const long row = cm.row_sum(i);
    if (row == 0)
      throw InvalidInput("recall undefined: true class " + std::to_string(i) + " has no samples");
    recall[i] = static_cast<double>(cm.count(i, i)) / static_cast<double>(row);
  }
  return recall;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
  if (cm.classes() == 0) throw InvalidInput("balanced accuracy of an empty confusion matrix");
  const auto recall = per_class_recall(cm);
  return std::accumulate(recall.begin(), recall.end(), 0.0) / static_cast<double>(recall.size());
}

// ---------------------------------------------------------------------------
// Cross-validation

CvReport cross_validate(const SpectralDataset& ds, const PipelineFitter& fit,
                        const FoldAssignment& folds) {
  if (folds.fold_of.size() != ds.n())
    throw InvalidInput("fold assignment does not match dataset size");
  const std::size_t c = ds.num_classes();
  CvReport report;
  report.pooled = ConfusionMatrix(c);
  for (const auto& l : ds.labels()) report.class_names.push_back(l.name);

  for (int f = 0; f < folds.k; ++f) {
    const auto train_idx = folds.train_indices(f);
    const auto test_idx = folds.test_indices(f);
    const std::string where = "fold " + std::to_string(f);
    const SpectralDataset train = ds.subset_rows(train_idx);
    const SpectralDataset test = ds.subset_rows(test_idx);
    Predictor predict;
    try {
      predict = fit(train);
    } catch (const Error& e) {
      rethrow_with_context(e, where + ", fit");
    }
    std::vector<int> pred;
    try {
      pred = predict(test.x());
    } catch (const Error& e) {
      rethrow_with_context(e, where + ", predict");
    }
    FoldResult fr{f, confusion_matrix(test.y(), pred, c)};
    report.pooled += fr.confusion;
    report.per_fold.push_back(std::move(fr));
  }
  report.per_class_recall = per_class_recall(report.pooled);
  report.balanced_accuracy = balanced_accuracy(report.pooled);
  return report;
}

CvReport cross_validate(const SpectralDataset& ds, const PipelineConfig& cfg) {
  validate(cfg);
  SpectralDataset windowed = [&] {
    try {
      return apply_window(ds, cfg);
    } catch (const Error& e) {
      rethrow_with_context(e, "window");
    }
  }();
  const auto folds = stratified_folds(windowed, cfg.folds, cfg.seed, cfg.relaxed_folds);
  PipelineFitter fitter = [&cfg](const SpectralDataset& train) -> Predictor {
    auto fitted = std::make_shared<FittedPipeline>(fit_pipeline(train, cfg));
    return [fitted](const Matrix& x) { return fitted->predict(x); };
  };
  CvReport report = cross_validate(windowed, fitter, folds);
  report.config_echo = to_config_text(cfg);
  return report;
}

namespace {

std::string fraction_or_na(const std::optional<double>& v) {
  return v ? textio::format_double(*v) : std::string("NA");
}

std::string percent(double v) { return textio::format_fixed(100.0 * v, 2) + "%"; }

// Per-fold metrics exist only for classes present in the fold.
void write_metric_row(std::ostringstream& ss, const std::string& tag, const ConfusionMatrix& cm) {
  const std::size_t c = cm.classes();
  std::optional<double> bal;
  std::vector<std::optional<double>> rec(c);
  bool complete = true;
  for (std::size_t i = 0; i < c; ++i) {
    const long row = cm.row_sum(i);
    if (row == 0) {
      complete = false;
      continue;
    }
    rec[i] = static_cast<double>(cm.count(i, i)) / static_cast<double>(row);
  }
  if (complete) bal = balanced_accuracy(cm);
  ss << tag << ',' << cm.total() << ',' << fraction_or_na(bal);
  for (const auto& r : rec) ss << ',' << fraction_or_na(r);
  ss << '\n';
}

void write_config_comment(std::ostringstream& ss, const std::string& echo) {
  for (auto line : textio::split(echo, '\n'))
    if (!line.empty()) ss << "# " << line << '\n';
}

}  // namespace

std::string CvReport::to_csv() const {
  std::ostringstream ss;
  ss << "fold,n,balanced_accuracy";
  for (const auto& name : class_names) ss << ",recall_" << name;
  ss << '\n';
  for (const auto& fr : per_fold) write_metric_row(ss, std::to_string(fr.fold), fr.confusion);
  write_metric_row(ss, "pooled", pooled);
  return ss.str();
}

std::string CvReport::to_text() const {
  std::ostringstream ss;
  ss << "Balanced accuracy (pooled over " << per_fold.size() << " folds): "
     << percent(balanced_accuracy) << '\n';
  ss << "Per-class recall:\n";
  for (std::size_t i = 0; i < class_names.size(); ++i)
    ss << "  " << std::left << std::setw(16) << class_names[i] << percent(per_class_recall[i])
       << '\n';
  ss << "Pooled confusion matrix (rows = true, columns = predicted):\n";
  for (std::size_t i = 0; i < pooled.classes(); ++i) {
    ss << "  " << std::left << std::setw(16) << class_names[i];
    for (std::size_t j = 0; j < pooled.classes(); ++j) ss << std::right << std::setw(5) << pooled.count(i, j);
    ss << '\n';
  }
  ss << "Configuration:\n";
  write_config_comment(ss, config_echo);
  return ss.str();
}

// ---------------------------------------------------------------------------
// Grid and k-sweep

const GridCell* GridReport::find(FeatureMethod f, ClassifierKind c) const {
  for (const auto& cell : cells)
    if (cell.feature == f && cell.classifier == c) return &cell;
  return nullptr;
}

GridReport grid_evaluate(const SpectralDataset& ds, const PipelineConfig& base,
                         std::span<const FeatureMethod> features,
                         std::span<const ClassifierKind> classifiers) {
  GridReport grid;
  grid.config_echo = to_config_text(base);
  for (auto clf : classifiers) {
    for (auto feat : features) {
      PipelineConfig cfg = base;
      cfg.feature_method = feat;
      cfg.classifier = clf;
      GridCell cell{feat, clf, std::nullopt, {}};
      try {
        cell.report = cross_validate(ds, cfg);
      } catch (const Error& e) {
        cell.error = e.what();
      }
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

std::string GridReport::to_csv() const {
  std::ostringstream ss;
  std::vector<std::string> names;
  for (const auto& cell : cells)
    if (cell.report) {
      names = cell.report->class_names;
      break;
    }
  ss << "feature,classifier,fold,n,balanced_accuracy";
  for (const auto& name : names) ss << ",recall_" << name;
  ss << '\n';
  for (const auto& cell : cells) {
    const std::string prefix =
        std::string(to_string(cell.feature)) + "," + std::string(to_string(cell.classifier)) + ",";
    if (!cell.report) {
      ss << prefix << "failed,0,NA";
      for (std::size_t i = 0; i < names.size(); ++i) ss << ",NA";
      ss << '\n';
      continue;
    }
    for (const auto& fr : cell.report->per_fold)
      write_metric_row(ss, prefix + std::to_string(fr.fold), fr.confusion);
    write_metric_row(ss, prefix + "pooled", cell.report->pooled);
  }
  return ss.str();
}

std::string GridReport::to_text() const {
  std::ostringstream ss;
  std::vector<FeatureMethod> feats;
  std::vector<ClassifierKind> clfs;
  for (const auto& cell : cells) {
    if (std::find(feats.begin(), feats.end(), cell.feature) == feats.end())
      feats.push_back(cell.feature);
    if (std::find(clfs.begin(), clfs.end(), cell.classifier) == clfs.end())
      clfs.push_back(cell.classifier);
  }
  ss << "Balanced accuracy by feature set (pooled stratified CV)\n";
  ss << std::left << std::setw(12) << "classifier";
  for (auto f : feats) ss << std::right << std::setw(12) << to_string(f);
  ss << '\n';
  for (auto c : clfs) {
    ss << std::left << std::setw(12) << to_string(c);
    for (auto f : feats) {
      const auto* cell = find(f, c);
      ss << std::right << std::setw(12)
         << (cell && cell->report ? percent(cell->report->balanced_accuracy) : "failed");
    }
    ss << '\n';
  }

  const bool has_lda = std::find(feats.begin(), feats.end(), FeatureMethod::Lda) != feats.end();
  if (has_lda) {
    std::vector<std::string> names;
    for (auto c : clfs)
      if (const auto* cell = find(FeatureMethod::Lda, c); cell && cell->report) {
        names = cell->report->class_names;
        break;
      }
    ss << "\nPer-class recall with LDA features\n";
    ss << std::left << std::setw(12) << "classifier";
    for (const auto& n : names) ss << std::right << std::setw(16) << n;
    ss << '\n';
    for (auto c : clfs) {
      const auto* cell = find(FeatureMethod::Lda, c);
      ss << std::left << std::setw(12) << to_string(c);
      for (std::size_t i = 0; i < names.size(); ++i)
        ss << std::right << std::setw(16)
           << (cell && cell->report ? percent(cell->report->per_class_recall[i]) : "failed");
      ss << '\n';
    }
  }

  bool any_failed = false;
  for (const auto& cell : cells)
    if (!cell.report) {
      if (!any_failed) ss << "\nFailed cells\n";
      any_failed = true;
      ss << "  " << to_string(cell.feature) << '+' << to_string(cell.classifier) << ": "
         << cell.error << '\n';
    }
  ss << "\nConfiguration:\n";
  write_config_comment(ss, config_echo);
  return ss.str();
}

std::vector<std::pair<std::size_t, double>> sweep_k(const SpectralDataset& ds,
                                                    const PipelineConfig& cfg,
                                                    std::span<const std::size_t> k_values) {
  if (k_values.empty()) throw InvalidInput("k sweep needs at least one k value");
  validate(cfg);
  const auto folds = stratified_folds(ds, cfg.folds, cfg.seed, cfg.relaxed_folds);
  std::size_t smallest_train = ds.n();
  for (int f = 0; f < folds.k; ++f)
    smallest_train = std::min(smallest_train, folds.train_indices(f).size());
  for (auto k : k_values)
    if (k < 1 || k > smallest_train)
      throw InvalidInput("k = " + std::to_string(k) + " outside 1.." +
                         std::to_string(smallest_train) + " (smallest training partition)");

  std::vector<std::pair<std::size_t, double>> out;
  for (auto k : k_values) {
    PipelineConfig c = cfg;
    c.classifier = ClassifierKind::Knn;
    c.k = k;
    out.emplace_back(k, cross_validate(ds, c).balanced_accuracy);
  }
  return out;
}

std::string sweep_to_csv(const std::vector<std::pair<std::size_t, double>>& sweep) {
  std::ostringstream ss;
  ss << "k,balanced_accuracy\n";
  for (const auto& [k, acc] : sweep) ss << k << ',' << textio::format_double(acc) << '\n';
  return ss.str();
}

}  // namespace cocoscan
