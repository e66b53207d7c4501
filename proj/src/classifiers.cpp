#include "cocoscan/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>

#include "cocoscan/error.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

std::string_view to_string(Metric m) {
  return m == Metric::Euclidean ? "euclidean" : "manhattan";
}

Metric parse_metric(std::string_view s) {
  if (s == "euclidean") return Metric::Euclidean;
  if (s == "manhattan") return Metric::Manhattan;
  throw InvalidInput("unknown distance metric '" + std::string(s) +
                     "' (expected euclidean or manhattan)");
}

double distance(Metric m, std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  if (m == Metric::Manhattan) {
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

KnnModel fit_knn(const Matrix& x, std::span<const int> y, std::size_t k, Metric metric,
                 int num_classes) {
  if (x.rows() == 0) throw InvalidInput("KNN: empty training data");
  if (x.rows() != y.size()) throw InvalidInput("KNN: row count does not match label count");
  if (k < 1 || k > x.rows())
    throw InvalidInput("KNN: k = " + std::to_string(k) + " outside 1.." +
                       std::to_string(x.rows()));
  int max_label = -1;
  for (int v : y) {
    if (v < 0) throw InvalidInput("KNN: negative class id");
    max_label = std::max(max_label, v);
  }
  if (num_classes == 0) num_classes = max_label + 1;
  if (max_label >= num_classes) throw InvalidInput("KNN: class id exceeds class count");
  return KnnModel{x, std::vector<int>(y.begin(), y.end()), k, metric, num_classes};
}

int predict_knn(const KnnModel& model, std::span<const double> x0) {
  if (x0.size() != model.exemplars.cols())
    throw InvalidInput("KNN: query has " + std::to_string(x0.size()) +
                       " features, model expects " + std::to_string(model.exemplars.cols()));
  const std::size_t n = model.exemplars.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i)
    dist[i] = {distance(model.metric, model.exemplars.row(i), x0), i};
  const auto k = static_cast<std::ptrdiff_t>(model.k);
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

  std::vector<int> votes(static_cast<std::size_t>(model.num_classes), 0);
  std::vector<double> summed(votes.size(), 0.0);
  for (std::ptrdiff_t j = 0; j < k; ++j) {
    const auto cls = static_cast<std::size_t>(model.labels[dist[j].second]);
    ++votes[cls];
    summed[cls] += dist[j].first;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && summed[c] < summed[best]))
      best = c;
  }
  return static_cast<int>(best);
}

// ---------------------------------------------------------------------------
// SVM

double Kernel::operator()(std::span<const double> a, std::span<const double> b) const noexcept {
  if (type == KernelType::Linear) return dot(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::exp(-gamma * s);
}

namespace {

// Platt's SMO with a full error cache over a precomputed kernel matrix.
// Decision function f(x) = sum_j alpha_j y_j K(x_j, x) + b.
class SmoSolver {
 public:
  SmoSolver(const Matrix& x, std::span<const int> y, const SvmParams& params)
      : n_(x.rows()), y_(y.begin(), y.end()), c_(params.c), tol_(params.tol),
        kmat_(n_, n_), alpha_(n_, 0.0), error_(n_) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i; j < n_; ++j) {
        const double v = params.kernel(x.row(i), x.row(j));
        kmat_(i, j) = v;
        kmat_(j, i) = v;
      }
    for (std::size_t i = 0; i < n_; ++i) error_[i] = -static_cast<double>(y_[i]);
  }

  // Returns true when a full pass over all samples made no progress. Only
  // full passes count toward max_passes; the non-bound sweeps between them
  // share a separate cap.
  bool run(int max_passes, int& passes) {
    bool examine_all = true;
    std::size_t changed = 0;
    passes = 0;
    long inner = 0;
    const long inner_cap = static_cast<long>(max_passes) * static_cast<long>(std::max<std::size_t>(n_, 10));
    while (changed > 0 || examine_all) {
      if (examine_all ? passes >= max_passes : inner >= inner_cap) {
        refine_bias();
        return false;
      }
      changed = 0;
      for (std::size_t i = 0; i < n_; ++i)
        if (examine_all || non_bound(i)) changed += examine(i) ? 1 : 0;
      if (examine_all) {
        ++passes;
        examine_all = false;
        // A quiet full pass can still leave the bias off when few or no
        // multipliers are free; settle it and look again.
        if (changed == 0 && refine_bias()) {
          examine_all = true;
          changed = 1;
        }
      } else {
        ++inner;
        if (changed == 0) examine_all = true;
      }
    }
    return true;
  }

  const std::vector<double>& alpha() const { return alpha_; }
  double bias() const { return b_; }

 private:
  bool non_bound(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

  // Recomputes decision values from scratch and sets the bias to the mean of
  // y - g over free multipliers, or to the middle of the interval the bound
  // multipliers allow. Returns true when any sample's KKT status changed.
  bool refine_bias() {
    std::vector<double> g(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (alpha_[j] > 0.0) g[i] += alpha_[j] * y_[j] * kmat_(i, j);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double target = y_[i] - g[i];
      if (non_bound(i)) {
        free_sum += target;
        ++free_count;
      } else if ((alpha_[i] <= 0.0) == (y_[i] > 0)) {
        lo = std::max(lo, target);
      } else {
        hi = std::min(hi, target);
      }
    }
    double b = b_;
    if (free_count > 0)
      b = free_sum / static_cast<double>(free_count);
    else if (std::isfinite(lo) && std::isfinite(hi))
      b = 0.5 * (lo + hi);
    else if (std::isfinite(lo))
      b = lo;
    else if (std::isfinite(hi))
      b = hi;
    bool flipped = false;
    for (std::size_t i = 0; i < n_; ++i) {
      const double e = g[i] + b - y_[i];
      if (violates(error_[i], i) != violates(e, i)) flipped = true;
      error_[i] = e;
    }
    b_ = b;
    return flipped;
  }

  bool violates(double error, std::size_t i) const {
    const double r = error * y_[i];
    return (r < -tol_ && alpha_[i] < c_) || (r > tol_ && alpha_[i] > 0.0);
  }

  bool examine(std::size_t i2) {
    if (!violates(error_[i2], i2)) return false;

    // Second choice: largest |E1 - E2| among non-bound multipliers.
    std::ptrdiff_t best = -1;
    double best_gap = -1.0;
    for (std::size_t i1 = 0; i1 < n_; ++i1) {
      if (i1 == i2 || !non_bound(i1)) continue;
      const double gap = std::abs(error_[i1] - error_[i2]);
      if (gap > best_gap) {
        best_gap = gap;
        best = static_cast<std::ptrdiff_t>(i1);
      }
    }
    if (best >= 0 && take_step(static_cast<std::size_t>(best), i2)) return true;
    // Fall back to every non-bound, then every sample, starting after i2.
    for (std::size_t off = 1; off < n_; ++off) {
      const std::size_t i1 = (i2 + off) % n_;
      if (non_bound(i1) && take_step(i1, i2)) return true;
    }
    for (std::size_t off = 1; off < n_; ++off) {
      const std::size_t i1 = (i2 + off) % n_;
      if (!non_bound(i1) && take_step(i1, i2)) return true;
    }
    return false;
  }

  bool take_step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    constexpr double kEps = 1e-12;
    const double a1 = alpha_[i1];
    const double a2 = alpha_[i2];
    const double y1 = y_[i1];
    const double y2 = y_[i2];
    const double e1 = error_[i1];
    const double e2 = error_[i2];
    const double s = y1 * y2;
    double lo = 0.0;
    double hi = 0.0;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c_, c_ + a2 - a1);
    } else {
      lo = std::max(0.0, a2 + a1 - c_);
      hi = std::min(c_, a2 + a1);
    }
    if (hi - lo <= kEps * c_) return false;

    const double k11 = kmat_(i1, i1);
    const double k12 = kmat_(i1, i2);
    const double k22 = kmat_(i2, i2);
    const double eta = k11 + k22 - 2.0 * k12;
    double a2_new = 0.0;
    if (eta > kEps) {
      a2_new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective (to minimise) at both ends of the feasible segment.
      const double f1 = y1 * (e1 - b_) - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * (e2 - b_) - s * a1 * k12 - a2 * k22;
      auto objective = [&](double a2v) {
        const double a1v = a1 + s * (a2 - a2v);
        return a1v * f1 + a2v * f2 + 0.5 * a1v * a1v * k11 + 0.5 * a2v * a2v * k22 +
               s * a2v * a1v * k12;
      };
      const double lo_obj = objective(lo);
      const double hi_obj = objective(hi);
      if (lo_obj < hi_obj - kEps)
        a2_new = lo;
      else if (lo_obj > hi_obj + kEps)
        a2_new = hi;
      else
        a2_new = a2;
    }
    if (a2_new < kEps * c_) a2_new = 0.0;
    if (a2_new > c_ * (1.0 - kEps)) a2_new = c_;
    if (std::abs(a2_new - a2) < kEps * (a2_new + a2 + kEps)) return false;

    double a1_new = a1 + s * (a2 - a2_new);
    if (a1_new < kEps * c_) a1_new = 0.0;
    if (a1_new > c_ * (1.0 - kEps)) a1_new = c_;

    const double d1 = y1 * (a1_new - a1);
    const double d2 = y2 * (a2_new - a2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    double b_new = 0.0;
    if (a1_new > 0.0 && a1_new < c_)
      b_new = b1;
    else if (a2_new > 0.0 && a2_new < c_)
      b_new = b2;
    else
      b_new = 0.5 * (b1 + b2);
    const double db = b_new - b_;

    for (std::size_t i = 0; i < n_; ++i)
      error_[i] += d1 * kmat_(i1, i) + d2 * kmat_(i2, i) + db;
    alpha_[i1] = a1_new;
    alpha_[i2] = a2_new;
    b_ = b_new;
    return true;
  }

  std::size_t n_;
  std::vector<int> y_;
  double c_;
  double tol_;
  Matrix kmat_;
  std::vector<double> alpha_;
  std::vector<double> error_;
  double b_ = 0.0;
};

}  // namespace

SvmBinaryModel fit_svm_binary(const Matrix& x, std::span<const int> y, const SvmParams& params) {
  if (x.rows() != y.size()) throw InvalidInput("SVM: row count does not match label count");
  if (!(params.c > 0.0)) throw InvalidInput("SVM: C must be > 0");
  if (!(params.tol > 0.0)) throw InvalidInput("SVM: tol must be > 0");
  if (params.kernel.type == KernelType::Rbf && !(params.kernel.gamma > 0.0))
    throw InvalidInput("SVM: rbf gamma must be > 0");
  bool has_pos = false;
  bool has_neg = false;
  for (int v : y) {
    if (v == 1)
      has_pos = true;
    else if (v == -1)
      has_neg = true;
    else
      throw InvalidInput("SVM: binary labels must be -1 or +1");
  }
  if (!has_pos || !has_neg) throw InvalidInput("SVM: both labels must be present");

  SmoSolver solver(x, y, params);
  SvmBinaryModel model;
  model.converged = solver.run(params.max_passes, model.passes);
  model.kernel = params.kernel;
  model.c_param = params.c;
  model.bias = solver.bias();
  const auto& alpha = solver.alpha();
  for (std::size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] > 0.0) model.support_indices.push_back(i);
  model.support_vectors = x.select_rows(model.support_indices);
  for (auto i : model.support_indices) model.alphas.push_back(y[i] * alpha[i]);
  return model;
}

double predict_svm_binary(const SvmBinaryModel& model, std::span<const double> x0) {
  if (!model.support_vectors.empty() && x0.size() != model.support_vectors.cols())
    throw InvalidInput("SVM: query has " + std::to_string(x0.size()) +
                       " features, model expects " +
                       std::to_string(model.support_vectors.cols()));
  double f = model.bias;
  for (std::size_t i = 0; i < model.alphas.size(); ++i)
    f += model.alphas[i] * model.kernel(model.support_vectors.row(i), x0);
  return f;
}

SvmMulticlassModel fit_svm_multiclass(const Matrix& x, std::span<const int> y,
                                      const SvmParams& params, int num_classes) {
  if (x.rows() != y.size()) throw InvalidInput("SVM: row count does not match label count");
  int max_label = -1;
  for (int v : y) {
    if (v < 0) throw InvalidInput("SVM: negative class id");
    max_label = std::max(max_label, v);
  }
  if (num_classes == 0) num_classes = max_label + 1;
  if (num_classes < 2) throw InvalidInput("SVM: need at least 2 classes");
  if (max_label >= num_classes) throw InvalidInput("SVM: class id exceeds class count");
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < y.size(); ++i) members[static_cast<std::size_t>(y[i])].push_back(i);
  for (int c = 0; c < num_classes; ++c)
    if (members[static_cast<std::size_t>(c)].empty())
      throw InvalidInput("SVM: class " + std::to_string(c) + " absent from training data");

  SvmMulticlassModel model;
  model.num_classes = num_classes;
  for (int a = 0; a < num_classes; ++a) {
    for (int b = a + 1; b < num_classes; ++b) {
      std::vector<std::size_t> rows;
      std::vector<int> yy;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == a || y[i] == b) {
          rows.push_back(i);
          yy.push_back(y[i] == a ? 1 : -1);
        }
      }
      model.pairwise.push_back({a, b, fit_svm_binary(x.select_rows(rows), yy, params)});
    }
  }
  return model;
}

int predict_svm_multiclass(const SvmMulticlassModel& model, std::span<const double> x0) {
  const auto c = static_cast<std::size_t>(model.num_classes);
  std::vector<int> wins(c, 0);
  std::vector<double> confidence(c, 0.0);
  for (const auto& pm : model.pairwise) {
    const double s = predict_svm_binary(pm.machine, x0);
    const auto winner = static_cast<std::size_t>(s >= 0.0 ? pm.class_a : pm.class_b);
    ++wins[winner];
    confidence[winner] += std::abs(s);
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < c; ++k)
    if (wins[k] > wins[best] || (wins[k] == wins[best] && confidence[k] > confidence[best]))
      best = k;
  return static_cast<int>(best);
}

double default_rbf_gamma(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) return 1.0;
  double total = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, k);
    mean /= static_cast<double>(x.rows());
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) var += (x(i, k) - mean) * (x(i, k) - mean);
    total += var / static_cast<double>(x.rows());
  }
  const double mean_var = total / static_cast<double>(x.cols());
  if (!(mean_var > 0.0)) return 1.0;
  return 1.0 / (static_cast<double>(x.cols()) * mean_var);
}

// ---------------------------------------------------------------------------
// Serialization

void write_model(std::ostream& out, const KnnModel& m) {
  out << "knn " << m.exemplars.rows() << ' ' << m.exemplars.cols() << ' ' << m.k << ' '
      << to_string(m.metric) << ' ' << m.num_classes << '\n';
  for (std::size_t i = 0; i < m.exemplars.rows(); ++i) {
    out << m.labels[i] << ' ';
    textio::write_values(out, m.exemplars.row(i).data(), m.exemplars.cols());
  }
}

KnnModel read_knn_model(std::istream& in) {
  textio::TokenReader tr(in);
  tr.expect("knn");
  KnnModel m;
  const std::size_t n = tr.next_size();
  const std::size_t p = tr.next_size();
  m.k = tr.next_size();
  m.metric = parse_metric(tr.next());
  m.num_classes = static_cast<int>(tr.next_int());
  m.exemplars = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    m.labels.push_back(static_cast<int>(tr.next_int()));
    auto row = tr.next_doubles(p);
    std::copy(row.begin(), row.end(), m.exemplars.row(i).begin());
  }
  if (m.k < 1 || m.k > n) throw InvalidInput("model file: KNN k out of range");
  return m;
}

void write_model(std::ostream& out, const SvmMulticlassModel& m) {
  out << "svm " << m.num_classes << ' ' << m.pairwise.size() << '\n';
  for (const auto& pm : m.pairwise) {
    const auto& b = pm.machine;
    out << "pair " << pm.class_a << ' ' << pm.class_b << ' '
        << (b.kernel.type == KernelType::Linear ? "linear" : "rbf") << ' '
        << textio::format_double(b.kernel.gamma) << ' ' << textio::format_double(b.c_param) << ' '
        << textio::format_double(b.bias) << ' ' << (b.converged ? 1 : 0) << ' ' << b.passes << ' '
        << b.alphas.size() << ' ' << b.support_vectors.cols() << '\n';
    for (std::size_t i = 0; i < b.alphas.size(); ++i) {
      out << b.support_indices[i] << ' ' << textio::format_double(b.alphas[i]) << ' ';
      textio::write_values(out, b.support_vectors.row(i).data(), b.support_vectors.cols());
    }
  }
}

SvmMulticlassModel read_svm_model(std::istream& in) {
  textio::TokenReader tr(in);
  tr.expect("svm");
  SvmMulticlassModel m;
  m.num_classes = static_cast<int>(tr.next_int());
  const std::size_t pairs = tr.next_size();
  for (std::size_t p = 0; p < pairs; ++p) {
    tr.expect("pair");
    SvmPairModel pm;
    pm.class_a = static_cast<int>(tr.next_int());
    pm.class_b = static_cast<int>(tr.next_int());
    const auto kernel = tr.next();
    if (kernel == "linear")
      pm.machine.kernel.type = KernelType::Linear;
    else if (kernel == "rbf")
      pm.machine.kernel.type = KernelType::Rbf;
    else
      throw InvalidInput("model file: unknown kernel '" + kernel + "'");
    pm.machine.kernel.gamma = tr.next_double();
    pm.machine.c_param = tr.next_double();
    pm.machine.bias = tr.next_double();
    pm.machine.converged = tr.next_int() != 0;
    pm.machine.passes = static_cast<int>(tr.next_int());
    const std::size_t nsv = tr.next_size();
    const std::size_t dim = tr.next_size();
    pm.machine.support_vectors = Matrix(nsv, dim);
    for (std::size_t i = 0; i < nsv; ++i) {
      pm.machine.support_indices.push_back(tr.next_size());
      pm.machine.alphas.push_back(tr.next_double());
      auto row = tr.next_doubles(dim);
      std::copy(row.begin(), row.end(), pm.machine.support_vectors.row(i).begin());
    }
    m.pairwise.push_back(std::move(pm));
  }
  return m;
}

}  // namespace cocoscan
