#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cocoscan/dataset.hpp"

namespace cocoscan {

// ---------------------------------------------------------------------------
// Student t

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

/// Upper tail P(T > t) of Student's t with `df` degrees of freedom.
double student_t_sf(double t, double df);

struct TTestResult {
  double t = 0.0;
  int df = 0;
  double p = 1.0;  // two-sided
  double mean_diff = 0.0;
  double sd_diff = 0.0;

  bool significant(double alpha = 0.05) const noexcept { return p <= alpha; }
};

/// Paired t-test on a[i] - b[i].
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct BandTTest {
  double wavelength_nm = 0.0;
  TTestResult result;
};

/// One paired test per band; row i of `a` is paired with row i of `b`.
std::vector<BandTTest> per_band_t_tests(const Matrix& a, const Matrix& b,
                                        const WavelengthAxis& axis);

/// Paired test between the two groups' mean spectra, pairing by band.
TTestResult pooled_mean_spectrum_t_test(const Matrix& a, const Matrix& b);

// ---------------------------------------------------------------------------
// Wrapper feature selection

/// Scores a candidate dataset; must be deterministic and return a value in [0,1].
using Evaluator = std::function<double(const SpectralDataset&)>;

struct WindowBounds {
  std::size_t lo_col = 0;
  std::size_t hi_col = 0;  // inclusive
  double lo_nm = 0.0;
  double hi_nm = 0.0;

  std::size_t width() const noexcept { return hi_col - lo_col + 1; }
};

struct SelectionStep {
  std::optional<std::size_t> removed;  // backward elimination
  std::optional<WindowBounds> window;  // window search
  double score = 0.0;
};

struct SelectionTrace {
  double baseline_score = 0.0;
  std::vector<SelectionStep> steps;
  std::vector<std::size_t> selected;  // retained column indices, ascending
  std::optional<WindowBounds> window;
  double selected_score = 0.0;

  /// `step,removed_or_window,score`, one row per step.
  std::string to_csv() const;
};

struct BfeConfig {
  std::size_t min_features = 1;
  double tolerance = 0.0;  // allowed score drop per removal
};

/// Greedy backward elimination: each round drops the feature whose removal
/// scores best, until the best score falls more than `tolerance` below the
/// current one or `min_features` remain.
SelectionTrace backward_eliminate(const SpectralDataset& ds, const Evaluator& evaluator,
                                  const BfeConfig& config = {});

struct WindowConfig {
  std::size_t grid_step = 1;  // columns between boundary candidates
  std::size_t min_width = 2;  // columns
};

/// Boundary candidates: every grid_step-th column plus the last one.
std::vector<WindowBounds> window_grid(const WavelengthAxis& axis, const WindowConfig& config);

/// Exhaustive search over contiguous windows on the boundary grid. Ties go to
/// the narrower window, then to the smaller lower bound.
SelectionTrace window_search(const SpectralDataset& ds, const Evaluator& evaluator,
                             const WindowConfig& config = {});

}  // namespace cocoscan
