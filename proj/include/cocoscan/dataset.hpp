#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cocoscan/matrix.hpp"

namespace cocoscan {

/// Strictly increasing, positive, finite wavelengths in nm.
class WavelengthAxis {
 public:
  WavelengthAxis() = default;
  explicit WavelengthAxis(std::vector<double> values_nm);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  /// Indices of wavelengths inside [lo_nm, hi_nm].
  std::vector<std::size_t> indices_in(double lo_nm, double hi_nm) const;
  WavelengthAxis select(std::span<const std::size_t> idx) const;

  friend bool operator==(const WavelengthAxis&, const WavelengthAxis&) = default;

 private:
  std::vector<double> values_;
};

/// True when both axes have the same length and every wavelength agrees to
/// within 1e-9 relative.
bool same_axis(const WavelengthAxis& a, const WavelengthAxis& b);

struct ClassLabel {
  int id = 0;
  std::string name;
  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
};

/// Absorbance matrix (n samples x d bands) with labels and wavelength axis.
/// Construction validates every invariant; instances are immutable.
class SpectralDataset {
 public:
  SpectralDataset(Matrix x, std::vector<int> y, WavelengthAxis axis,
                  std::vector<ClassLabel> labels);

  const Matrix& x() const noexcept { return x_; }
  std::span<const int> y() const noexcept { return y_; }
  const WavelengthAxis& axis() const noexcept { return axis_; }
  const std::vector<ClassLabel>& labels() const noexcept { return labels_; }

  std::size_t n() const noexcept { return x_.rows(); }
  std::size_t d() const noexcept { return x_.cols(); }
  std::size_t num_classes() const noexcept { return labels_.size(); }
  const std::string& class_name(int id) const { return labels_.at(id).name; }
  std::vector<std::size_t> class_counts() const;

  /// Subsets keep the full label table so class ids stay stable.
  SpectralDataset subset_rows(std::span<const std::size_t> idx) const;
  SpectralDataset subset_columns(std::span<const std::size_t> idx) const;
  SpectralDataset with_features(Matrix x) const;

 private:
  Matrix x_;
  std::vector<int> y_;
  WavelengthAxis axis_;
  std::vector<ClassLabel> labels_;
};

struct CsvOptions {
  std::string label_column = "label";
};

/// Parses the labelled CSV layout: `label,<w1>,...,<wd>` then one row per
/// sample. Class ids are assigned in order of first appearance.
SpectralDataset load_csv(std::istream& in, const CsvOptions& options = {});
SpectralDataset load_csv_text(std::string_view text, const CsvOptions& options = {});
SpectralDataset load_csv_file(const std::string& path, const CsvOptions& options = {});

/// Unlabelled spectra (e.g. samples to classify). A label column, when
/// present, is ignored.
struct SampleSet {
  WavelengthAxis axis;
  Matrix x;
};
SampleSet load_samples_text(std::string_view text, const CsvOptions& options = {});

/// Writes the labelled CSV layout with round-trip precision.
void write_csv(std::ostream& out, const SpectralDataset& ds);
std::string to_csv(const SpectralDataset& ds);

/// Keeps the columns with lo_nm <= wavelength <= hi_nm.
SpectralDataset select_window(const SpectralDataset& ds, double lo_nm, double hi_nm);

/// 64-bit-state SplitMix64 generator (Steele, Lea & Flood 2014). Used for
/// every seeded shuffle and noise draw so results do not depend on the
/// standard library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  /// Uniform integer in [0, bound) by rejection sampling.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via Box-Muller (cached second variate).
  double normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Fisher-Yates shuffle driven by SplitMix64.
template <class T>
void seeded_shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> test_indices(int fold) const;
  std::vector<std::size_t> train_indices(int fold) const;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Stratified k-fold assignment. Each class's indices are shuffled with a
/// SplitMix64 stream seeded by `seed` (classes consumed in id order) and dealt
/// round-robin; the dealing position carries over between classes so fold
/// sizes stay balanced. In strict mode every class needs at least k members.
FoldAssignment stratified_folds(const SpectralDataset& ds, int k,
                                std::uint64_t seed = kDefaultSeed,
                                bool relaxed = false);

}  // namespace cocoscan
