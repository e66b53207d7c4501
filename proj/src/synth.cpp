#include "cocoscan/synth.hpp"

#include <cmath>
#include <set>

#include "cocoscan/error.hpp"

namespace cocoscan {

WavelengthAxis SynthSpec::linear_axis(double lo_nm, double hi_nm, std::size_t points) {
  if (points < 2 || !(hi_nm > lo_nm))
    throw InvalidInput("linear axis needs at least 2 points and hi > lo");
  std::vector<double> v(points);
  const double step = (hi_nm - lo_nm) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) v[i] = lo_nm + step * static_cast<double>(i);
  v.back() = hi_nm;
  return WavelengthAxis(std::move(v));
}

double synth_band(const SynthSpec& spec, double water_fraction, double nm) {
  const double z = (nm - spec.peak_center_nm) / spec.peak_width_nm;
  return spec.base_amplitude * (1.0 + spec.water_gain * water_fraction) * std::exp(-0.5 * z * z);
}

SpectralDataset generate(const SynthSpec& spec) {
  if (spec.classes.empty()) throw InvalidInput("synth: no classes");
  if (spec.n_per_class == 0) throw InvalidInput("synth: n_per_class must be >= 1");
  if (spec.axis.size() == 0) throw InvalidInput("synth: empty axis");
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd))
    throw InvalidInput("synth: noise_sd must be finite and >= 0");
  if (!(spec.peak_width_nm > 0.0)) throw InvalidInput("synth: peak_width_nm must be > 0");
  std::set<double> fractions;
  std::set<std::string> names;
  for (const auto& c : spec.classes) {
    if (!(c.water_fraction >= 0.0 && c.water_fraction <= 1.0))
      throw InvalidInput("synth: water fraction of '" + c.name + "' outside [0, 1]");
    if (!fractions.insert(c.water_fraction).second)
      throw InvalidInput("synth: duplicate water fraction " + std::to_string(c.water_fraction));
    if (c.name.empty() || !names.insert(c.name).second)
      throw InvalidInput("synth: class names must be unique and non-empty");
  }

  const std::size_t d = spec.axis.size();
  const std::size_t n = spec.n_per_class * spec.classes.size();
  Matrix x(n, d);
  std::vector<int> y(n);
  std::vector<ClassLabel> labels;
  SplitMix64 rng(spec.seed);
  std::size_t row = 0;
  for (std::size_t c = 0; c < spec.classes.size(); ++c) {
    labels.push_back({static_cast<int>(c), spec.classes[c].name});
    std::vector<double> clean(d);
    for (std::size_t j = 0; j < d; ++j)
      clean[j] = synth_band(spec, spec.classes[c].water_fraction, spec.axis[j]);
    for (std::size_t s = 0; s < spec.n_per_class; ++s, ++row) {
      y[row] = static_cast<int>(c);
      for (std::size_t j = 0; j < d; ++j) x(row, j) = clean[j] + spec.noise_sd * rng.normal();
    }
  }
  return SpectralDataset(std::move(x), std::move(y), spec.axis, std::move(labels));
}

}  // namespace cocoscan
