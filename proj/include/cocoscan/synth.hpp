#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cocoscan/dataset.hpp"

namespace cocoscan {

struct SynthClass {
  std::string name;
  double water_fraction = 0.0;  // in [0, 1]
};

/// FTIR-like generator: one Gaussian absorbance band whose height grows with
/// the water fraction, plus seeded white noise.
struct SynthSpec {
  std::size_t n_per_class = 14;
  std::vector<SynthClass> classes = {
      {"authentic", 0.0}, {"adulterated10", 0.1}, {"adulterated20", 0.2}};
  WavelengthAxis axis = linear_axis(2500.0, 4000.0, 729);
  double peak_center_nm = 3450.0;
  double peak_width_nm = 150.0;  // standard deviation of the band
  double base_amplitude = 1.0;
  double water_gain = 1.0;
  double noise_sd = 0.01;
  std::uint64_t seed = kDefaultSeed;

  /// `points` evenly spaced wavelengths from lo to hi inclusive.
  static WavelengthAxis linear_axis(double lo_nm, double hi_nm, std::size_t points);
};

/// Samples are emitted class by class in the order of `classes`.
SpectralDataset generate(const SynthSpec& spec);

/// Noise-free absorbance of one class at wavelength `nm`.
double synth_band(const SynthSpec& spec, double water_fraction, double nm);

}  // namespace cocoscan
