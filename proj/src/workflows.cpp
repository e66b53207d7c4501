#include "cocoscan/workflows.hpp"

#include <iomanip>
#include <sstream>

#include "cocoscan/error.hpp"
#include "cocoscan/evaluation.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

namespace {

Matrix group_rows(const SpectralDataset& ds, const std::string& group) {
  if (group.empty()) return ds.x();
  std::vector<std::size_t> idx;
  bool known = false;
  for (const auto& l : ds.labels()) {
    if (l.name != group) continue;
    known = true;
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (ds.y()[i] == l.id) idx.push_back(i);
  }
  if (!known) throw InvalidInput("unknown group '" + group + "'");
  return ds.x().select_rows(idx);
}

}  // namespace

TTestReport t_test_groups(const SpectralDataset& a, const std::string& group_a,
                          const SpectralDataset& b, const std::string& group_b) {
  if (!same_axis(a.axis(), b.axis())) throw InvalidInput("t-test groups are on different axes");
  const Matrix xa = group_rows(a, group_a);
  const Matrix xb = group_rows(b, group_b);
  if (xa.rows() != xb.rows())
    throw InvalidInput("paired t-test needs equal group sizes, got " + std::to_string(xa.rows()) +
                       " and " + std::to_string(xb.rows()));
  TTestReport r;
  r.group_a = group_a.empty() ? "all" : group_a;
  r.group_b = group_b.empty() ? "all" : group_b;
  r.pairs = xa.rows();
  r.bands = per_band_t_tests(xa, xb, a.axis());
  r.pooled = pooled_mean_spectrum_t_test(xa, xb);
  return r;
}

std::string TTestReport::to_csv() const {
  std::ostringstream ss;
  ss << "wavelength_nm,t,df,p,mean_diff,significant\n";
  for (const auto& b : bands)
    ss << textio::format_double(b.wavelength_nm) << ',' << textio::format_double(b.result.t) << ','
       << b.result.df << ',' << textio::format_double(b.result.p) << ','
       << textio::format_double(b.result.mean_diff) << ',' << (b.result.significant() ? 1 : 0)
       << '\n';
  return ss.str();
}

std::string TTestReport::to_text() const {
  std::size_t significant = 0;
  for (const auto& b : bands) significant += b.result.significant() ? 1 : 0;
  std::ostringstream ss;
  ss << "Paired t-test: " << group_a << " vs " << group_b << " (" << pairs << " pairs)\n";
  ss << "Bands with p <= 0.05: " << significant << " of " << bands.size() << '\n';
  ss << "Mean spectra: t = " << textio::format_fixed(pooled.t, 4) << ", df = " << pooled.df
     << ", p = " << textio::format_double(pooled.p)
     << (pooled.significant() ? " (significant)" : " (not significant)") << '\n';
  return ss.str();
}

Evaluator cv_evaluator(const PipelineConfig& cfg) {
  PipelineConfig c = cfg;
  c.window.reset();
  return [c](const SpectralDataset& ds) { return cross_validate(ds, c).balanced_accuracy; };
}

Matrix project(const SpectralDataset& ds, const PipelineConfig& cfg, FeatureMethod method,
               std::size_t components) {
  const SpectralDataset w = apply_window(ds, cfg);
  switch (method) {
    case FeatureMethod::Pca:
      return transform_pca(fit_pca(w.x(), components), w.x());
    case FeatureMethod::Lda: {
      LdaConfig lc = cfg.lda;
      lc.components = std::min(components, ds.num_classes() - 1);
      return transform_lda(fit_lda(w, lc), w.x());
    }
    case FeatureMethod::Original:
      break;
  }
  throw InvalidInput("projection method must be pca or lda");
}

std::string projection_to_csv(const Matrix& z, const SpectralDataset& ds) {
  std::ostringstream ss;
  for (std::size_t j = 0; j < z.cols(); ++j) ss << "component" << j + 1 << ',';
  ss << "label\n";
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) ss << textio::format_double(z(i, j)) << ',';
    ss << ds.class_name(ds.y()[i]) << '\n';
  }
  return ss.str();
}

}  // namespace cocoscan
