#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cocoscan/dataset.hpp"
#include "cocoscan/pipeline.hpp"
#include "cocoscan/stats.hpp"

namespace cocoscan {

struct TTestReport {
  std::string group_a;
  std::string group_b;
  std::size_t pairs = 0;
  std::vector<BandTTest> bands;
  TTestResult pooled;

  /// `wavelength_nm,t,df,p,mean_diff,significant`, one row per band.
  std::string to_csv() const;
  std::string to_text() const;
};

/// Rows of `group_a` in `a` paired in order of appearance with rows of
/// `group_b` in `b`. An empty group name takes every row.
TTestReport t_test_groups(const SpectralDataset& a, const std::string& group_a,
                          const SpectralDataset& b, const std::string& group_b);

/// Pooled CV balanced accuracy of `cfg` on whatever columns the candidate
/// dataset holds. The config's own window is ignored.
Evaluator cv_evaluator(const PipelineConfig& cfg);

/// Fits PCA or LDA with `components` outputs on the windowed dataset.
Matrix project(const SpectralDataset& ds, const PipelineConfig& cfg, FeatureMethod method,
               std::size_t components = 2);

/// `component1,...,componentR,label`.
std::string projection_to_csv(const Matrix& z, const SpectralDataset& ds);

}  // namespace cocoscan
