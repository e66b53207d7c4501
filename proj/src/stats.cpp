#include "cocoscan/stats.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cocoscan/error.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) <= kEps) return h;
  }
  throw NumericFailure("incomplete beta continued fraction did not converge");
}

// I_x(a,b) given both x and 1-x, so callers can pass an accurately computed
// complement.
double incomplete_beta(double a, double b, double x, double one_minus_x) {
  if (x <= 0.0) return 0.0;
  if (one_minus_x <= 0.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log(one_minus_x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, one_minus_x) / b;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("incomplete beta needs 0 <= x <= 1");
  return incomplete_beta(a, b, x, 1.0 - x);
}

double student_t_sf(double t, double df) {
  if (!std::isfinite(t)) throw InvalidInput("student_t_sf: t must be finite");
  if (!(df >= 1.0) || !std::isfinite(df))
    throw InvalidInput("student_t_sf: degrees of freedom must be >= 1");
  if (t == 0.0) return 0.5;
  const double t2 = t * t;
  // P(|T| > |t|) = I_{df/(df+t^2)}(df/2, 1/2)
  const double x = df / (df + t2);
  const double one_minus_x = t2 / (df + t2);
  const double two_tail = incomplete_beta(0.5 * df, 0.5, x, one_minus_x);
  return t > 0.0 ? 0.5 * two_tail : 1.0 - 0.5 * two_tail;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidInput("paired t-test: sample lengths differ (" + std::to_string(a.size()) +
                       " vs " + std::to_string(b.size()) + ")");
  }
  const std::size_t m = a.size();
  if (m < 2) throw InvalidInput("paired t-test needs at least 2 pairs");
  std::vector<double> diff(m);
  for (std::size_t i = 0; i < m; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(m);
  double ss = 0.0;
  for (double v : diff) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (sd == 0.0) throw InvalidInput("paired t-test: differences have zero variance");

  TTestResult r;
  r.mean_diff = mean;
  r.sd_diff = sd;
  r.df = static_cast<int>(m - 1);
  r.t = mean / (sd / std::sqrt(static_cast<double>(m)));
  r.p = std::min(1.0, 2.0 * student_t_sf(std::abs(r.t), r.df));
  return r;
}

std::vector<BandTTest> per_band_t_tests(const Matrix& a, const Matrix& b,
                                        const WavelengthAxis& axis) {
  if (a.rows() != b.rows())
    throw InvalidInput("per-band t-test: groups have " + std::to_string(a.rows()) + " and " +
                       std::to_string(b.rows()) + " samples; pairing needs equal counts");
  if (a.cols() != axis.size() || b.cols() != axis.size())
    throw InvalidInput("per-band t-test: band count does not match axis");
  std::vector<BandTTest> out;
  out.reserve(axis.size());
  for (std::size_t c = 0; c < axis.size(); ++c) {
    const auto ca = a.column(c);
    const auto cb = b.column(c);
    try {
      out.push_back({axis[c], paired_t_test(ca, cb)});
    } catch (const Error& e) {
      rethrow_with_context(e, "band " + textio::format_double(axis[c]) + " nm");
    }
  }
  return out;
}

TTestResult pooled_mean_spectrum_t_test(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw InvalidInput("pooled t-test: band counts differ");
  if (a.rows() == 0 || b.rows() == 0) throw InvalidInput("pooled t-test: empty group");
  auto mean_spectrum = [](const Matrix& m) {
    std::vector<double> mu(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c) mu[c] += m(r, c);
    for (double& v : mu) v /= static_cast<double>(m.rows());
    return mu;
  };
  return paired_t_test(mean_spectrum(a), mean_spectrum(b));
}

// ---------------------------------------------------------------------------
// Selection

namespace {

double checked_score(const Evaluator& evaluator, const SpectralDataset& ds,
                     const std::string& context) {
  double s = 0.0;
  try {
    s = evaluator(ds);
  } catch (const Error& e) {
    rethrow_with_context(e, context);
  }
  if (!(s >= 0.0 && s <= 1.0))
    throw InvalidInput(context + ": evaluator returned " + textio::format_double(s) +
                       ", outside [0, 1]");
  return s;
}

}  // namespace

std::string SelectionTrace::to_csv() const {
  std::ostringstream ss;
  ss << "step,removed_or_window,score\n";
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    ss << (i + 1) << ',';
    if (s.removed) {
      ss << *s.removed;
    } else if (s.window) {
      ss << textio::format_double(s.window->lo_nm) << ':'
         << textio::format_double(s.window->hi_nm);
    }
    ss << ',' << textio::format_double(s.score) << '\n';
  }
  return ss.str();
}

SelectionTrace backward_eliminate(const SpectralDataset& ds, const Evaluator& evaluator,
                                  const BfeConfig& config) {
  if (ds.d() < 2) throw InvalidInput("backward elimination needs at least 2 features");
  if (config.min_features < 1) throw InvalidInput("min_features must be >= 1");
  if (std::isnan(config.tolerance)) throw InvalidInput("tolerance must not be NaN");

  SelectionTrace trace;
  std::vector<std::size_t> kept(ds.d());
  std::iota(kept.begin(), kept.end(), std::size_t{0});
  double current = checked_score(evaluator, ds, "evaluating all features");
  trace.baseline_score = current;

  while (kept.size() > config.min_features) {
    std::size_t best_pos = 0;
    double best = -1.0;
    std::vector<std::size_t> candidate;
    candidate.reserve(kept.size() - 1);
    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
      candidate.clear();
      for (std::size_t j = 0; j < kept.size(); ++j)
        if (j != pos) candidate.push_back(kept[j]);
      const double s = checked_score(evaluator, ds.subset_columns(candidate),
                                     "evaluating without feature " + std::to_string(kept[pos]));
      if (s > best) {
        best = s;
        best_pos = pos;
      }
    }
    if (best < current - config.tolerance) break;
    trace.steps.push_back({kept[best_pos], std::nullopt, best});
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(best_pos));
    current = best;
  }
  trace.selected = std::move(kept);
  trace.selected_score = current;
  return trace;
}

std::vector<WindowBounds> window_grid(const WavelengthAxis& axis, const WindowConfig& config) {
  if (config.grid_step < 1) throw InvalidInput("window grid step must be >= 1 column");
  if (config.min_width < 1) throw InvalidInput("window minimum width must be >= 1 column");
  const std::size_t d = axis.size();
  std::vector<std::size_t> bounds;
  for (std::size_t c = 0; c < d; c += config.grid_step) bounds.push_back(c);
  if (bounds.back() != d - 1) bounds.push_back(d - 1);

  std::vector<WindowBounds> out;
  for (std::size_t i = 0; i < bounds.size(); ++i)
    for (std::size_t j = i; j < bounds.size(); ++j) {
      WindowBounds w{bounds[i], bounds[j], axis[bounds[i]], axis[bounds[j]]};
      if (w.width() >= config.min_width) out.push_back(w);
    }
  return out;
}

SelectionTrace window_search(const SpectralDataset& ds, const Evaluator& evaluator,
                             const WindowConfig& config) {
  const auto grid = window_grid(ds.axis(), config);
  if (grid.empty())
    throw InvalidInput("no candidate window satisfies the minimum width of " +
                       std::to_string(config.min_width) + " columns");

  SelectionTrace trace;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& w = grid[i];
    std::vector<std::size_t> cols(w.width());
    std::iota(cols.begin(), cols.end(), w.lo_col);
    const double s = checked_score(evaluator, ds.subset_columns(cols),
                                   "evaluating window " + textio::format_double(w.lo_nm) +
                                       ":" + textio::format_double(w.hi_nm));
    trace.steps.push_back({std::nullopt, w, s});
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = grid[*best];
    const double bs = trace.steps[*best].score;
    const bool better = s > bs || (s == bs && (w.width() < b.width() ||
                                               (w.width() == b.width() && w.lo_col < b.lo_col)));
    if (better) best = i;
  }
  const auto& w = grid[*best];
  trace.window = w;
  trace.selected.resize(w.width());
  std::iota(trace.selected.begin(), trace.selected.end(), w.lo_col);
  trace.selected_score = trace.steps[*best].score;
  // Baseline is the full-axis window, which the grid always contains.
  trace.baseline_score = trace.selected_score;
  for (const auto& step : trace.steps)
    if (step.window->lo_col == 0 && step.window->hi_col + 1 == ds.d())
      trace.baseline_score = step.score;
  return trace;
}

}  // namespace cocoscan
