#include "cocoscan/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <iterator>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cocoscan/error.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

// ---------------------------------------------------------------------------
// WavelengthAxis

WavelengthAxis::WavelengthAxis(std::vector<double> values_nm)
    : values_(std::move(values_nm)) {
  if (values_.empty()) throw InvalidInput("wavelength axis is empty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v <= 0.0) {
      throw InvalidInput("wavelength " + textio::format_double(v) + " at column " +
                         std::to_string(i + 1) + " is not a positive finite value");
    }
    if (i > 0 && !(v > values_[i - 1])) {
      throw InvalidInput("wavelengths not strictly increasing at column " +
                         std::to_string(i + 1) + " (" +
                         textio::format_double(values_[i - 1]) + " then " +
                         textio::format_double(v) + ")");
    }
  }
}

std::vector<std::size_t> WavelengthAxis::indices_in(double lo_nm, double hi_nm) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] >= lo_nm && values_[i] <= hi_nm) idx.push_back(i);
  return idx;
}

WavelengthAxis WavelengthAxis::select(std::span<const std::size_t> idx) const {
  std::vector<double> v;
  v.reserve(idx.size());
  for (auto i : idx) v.push_back(values_.at(i));
  return WavelengthAxis(std::move(v));
}

bool same_axis(const WavelengthAxis& a, const WavelengthAxis& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9 * std::max(std::abs(a[i]), std::abs(b[i])))
      return false;
  return true;
}

// ---------------------------------------------------------------------------
// SpectralDataset

SpectralDataset::SpectralDataset(Matrix x, std::vector<int> y, WavelengthAxis axis,
                                 std::vector<ClassLabel> labels)
    : x_(std::move(x)), y_(std::move(y)), axis_(std::move(axis)), labels_(std::move(labels)) {
  if (x_.rows() != y_.size()) {
    throw InvalidInput("dataset has " + std::to_string(x_.rows()) + " rows but " +
                       std::to_string(y_.size()) + " labels");
  }
  if (x_.cols() != axis_.size()) {
    throw InvalidInput("dataset has " + std::to_string(x_.cols()) +
                       " columns but the wavelength axis has " +
                       std::to_string(axis_.size()));
  }
  for (std::size_t r = 0; r < x_.rows(); ++r)
    for (std::size_t c = 0; c < x_.cols(); ++c)
      if (!std::isfinite(x_(r, c)))
        throw InvalidInput("non-finite absorbance at row " + std::to_string(r + 1) +
                           ", column " + std::to_string(c + 1));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].id != static_cast<int>(i))
      throw InvalidInput("class ids must be contiguous 0..c-1");
    for (std::size_t j = 0; j < i; ++j)
      if (labels_[j].name == labels_[i].name)
        throw InvalidInput("duplicate class name '" + labels_[i].name + "'");
  }
  for (int v : y_)
    if (v < 0 || static_cast<std::size_t>(v) >= labels_.size())
      throw InvalidInput("label id " + std::to_string(v) + " outside the label table");
}

std::vector<std::size_t> SpectralDataset::class_counts() const {
  std::vector<std::size_t> counts(labels_.size(), 0);
  for (int v : y_) ++counts[static_cast<std::size_t>(v)];
  return counts;
}

SpectralDataset SpectralDataset::subset_rows(std::span<const std::size_t> idx) const {
  std::vector<int> y;
  y.reserve(idx.size());
  for (auto i : idx) y.push_back(y_.at(i));
  return SpectralDataset(x_.select_rows(idx), std::move(y), axis_, labels_);
}

SpectralDataset SpectralDataset::subset_columns(std::span<const std::size_t> idx) const {
  return SpectralDataset(x_.select_columns(idx), y_, axis_.select(idx), labels_);
}

SpectralDataset SpectralDataset::with_features(Matrix x) const {
  // Derived features have no physical wavelength; index them 1..r.
  std::vector<double> pseudo(x.cols());
  for (std::size_t i = 0; i < pseudo.size(); ++i) pseudo[i] = static_cast<double>(i + 1);
  return SpectralDataset(std::move(x), y_, WavelengthAxis(std::move(pseudo)), labels_);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

struct Lines {
  std::vector<std::string_view> text;
  std::vector<std::size_t> number;  // 1-based line numbers
};

Lines split_lines(std::string_view text) {
  Lines out;
  std::size_t line_no = 0;
  for (auto line : textio::split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (textio::trim(line).empty()) continue;
    out.text.push_back(line);
    out.number.push_back(line_no);
  }
  return out;
}

struct ParsedTable {
  WavelengthAxis axis;
  Matrix x;
  std::vector<std::string> row_labels;
  bool has_labels = false;
};

ParsedTable parse_table(std::string_view text, const CsvOptions& options,
                        bool require_labels) {
  const Lines lines = split_lines(text);
  if (lines.text.empty()) throw InvalidInput("empty file");

  const auto header = textio::split(lines.text[0], ',');
  std::ptrdiff_t label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (textio::trim(header[c]) == options.label_column) {
      label_col = static_cast<std::ptrdiff_t>(c);
      break;
    }
  }
  if (label_col < 0 && require_labels)
    throw InvalidInput("unknown label column '" + options.label_column +
                       "': not present in header");

  std::vector<double> wavelengths;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (static_cast<std::ptrdiff_t>(c) == label_col) continue;
    auto w = textio::parse_double(textio::trim(header[c]));
    if (!w) {
      throw InvalidInput("malformed header: column " + std::to_string(c + 1) + " ('" +
                         std::string(header[c]) + "') is not a wavelength");
    }
    wavelengths.push_back(*w);
  }
  if (wavelengths.empty()) throw InvalidInput("malformed header: no wavelength columns");

  ParsedTable out;
  try {
    out.axis = WavelengthAxis(std::move(wavelengths));
  } catch (const Error& e) {
    rethrow_with_context(e, "malformed header");
  }
  out.has_labels = label_col >= 0;

  const std::size_t n = lines.text.size() - 1;
  if (n == 0) throw InvalidInput("file has a header but no data rows");
  std::vector<double> values;
  values.reserve(n * out.axis.size());
  for (std::size_t r = 1; r < lines.text.size(); ++r) {
    const auto cells = textio::split(lines.text[r], ',');
    const std::string where =
        "line " + std::to_string(lines.number[r]) + " (data row " + std::to_string(r) + ")";
    if (cells.size() != header.size()) {
      throw InvalidInput("ragged row at " + where + ": expected " +
                         std::to_string(header.size()) + " cells, found " +
                         std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (static_cast<std::ptrdiff_t>(c) == label_col) {
        auto name = textio::trim(cells[c]);
        if (name.empty()) throw InvalidInput("empty class label at " + where);
        out.row_labels.emplace_back(name);
        continue;
      }
      auto v = textio::parse_double(textio::trim(cells[c]));
      if (!v) {
        throw InvalidInput("non-numeric value '" + std::string(cells[c]) + "' at " +
                           where + ", column " + std::to_string(c + 1));
      }
      if (!std::isfinite(*v)) {
        throw InvalidInput("non-finite value '" + std::string(cells[c]) + "' at " +
                           where + ", column " + std::to_string(c + 1));
      }
      values.push_back(*v);
    }
  }
  out.x = Matrix(n, out.axis.size(), std::move(values));
  return out;
}

}  // namespace

SpectralDataset load_csv_text(std::string_view text, const CsvOptions& options) {
  ParsedTable t = parse_table(text, options, /*require_labels=*/true);
  std::vector<ClassLabel> table;
  std::map<std::string, int, std::less<>> ids;
  std::vector<int> y;
  y.reserve(t.row_labels.size());
  for (const auto& name : t.row_labels) {
    auto it = ids.find(name);
    if (it == ids.end()) {
      const int id = static_cast<int>(table.size());
      it = ids.emplace(name, id).first;
      table.push_back({id, name});
    }
    y.push_back(it->second);
  }
  return SpectralDataset(std::move(t.x), std::move(y), std::move(t.axis), std::move(table));
}

SpectralDataset load_csv(std::istream& in, const CsvOptions& options) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_csv_text(text, options);
}

SpectralDataset load_csv_file(const std::string& path, const CsvOptions& options) {
  const std::string text = textio::read_file(path);
  try {
    return load_csv_text(text, options);
  } catch (const Error& e) {
    rethrow_with_context(e, path);
  }
}

SampleSet load_samples_text(std::string_view text, const CsvOptions& options) {
  ParsedTable t = parse_table(text, options, /*require_labels=*/false);
  return {std::move(t.axis), std::move(t.x)};
}

void write_csv(std::ostream& out, const SpectralDataset& ds) {
  out << "label";
  for (double w : ds.axis().values()) out << ',' << textio::format_double(w);
  out << '\n';
  for (std::size_t r = 0; r < ds.n(); ++r) {
    out << ds.class_name(ds.y()[r]);
    for (double v : ds.x().row(r)) out << ',' << textio::format_double(v);
    out << '\n';
  }
}

std::string to_csv(const SpectralDataset& ds) {
  std::ostringstream ss;
  write_csv(ss, ds);
  return ss.str();
}

SpectralDataset select_window(const SpectralDataset& ds, double lo_nm, double hi_nm) {
  if (!(lo_nm < hi_nm)) {
    throw InvalidInput("window lower bound " + textio::format_double(lo_nm) +
                       " must be below upper bound " + textio::format_double(hi_nm));
  }
  const auto idx = ds.axis().indices_in(lo_nm, hi_nm);
  if (idx.empty()) {
    throw InvalidInput("empty window: no wavelengths in [" + textio::format_double(lo_nm) +
                       ", " + textio::format_double(hi_nm) + "] nm (axis spans " +
                       textio::format_double(ds.axis().front()) + "-" +
                       textio::format_double(ds.axis().back()) + ")");
  }
  if (idx.size() == ds.d()) return ds;
  return ds.subset_columns(idx);
}

// ---------------------------------------------------------------------------
// Seeded randomness and folds

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound == 0) return 0;
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t v = 0;
  do {
    v = next();
  } while (v >= limit);
  return v % bound;
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<std::size_t> FoldAssignment::test_indices(int fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) idx.push_back(i);
  return idx;
}

std::vector<std::size_t> FoldAssignment::train_indices(int fold) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) idx.push_back(i);
  return idx;
}

FoldAssignment stratified_folds(const SpectralDataset& ds, int k, std::uint64_t seed,
                                bool relaxed) {
  if (k < 2) throw InvalidInput("fold count must be at least 2, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > ds.n()) {
    throw InvalidInput("fold count " + std::to_string(k) + " exceeds sample count " +
                       std::to_string(ds.n()));
  }
  const auto counts = ds.class_counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0)
      throw InvalidInput("class '" + ds.class_name(static_cast<int>(c)) + "' has no samples");
    if (!relaxed && counts[c] < static_cast<std::size_t>(k)) {
      throw InvalidInput("class '" + ds.class_name(static_cast<int>(c)) + "' has " +
                         std::to_string(counts[c]) + " samples, fewer than " +
                         std::to_string(k) + " folds (enable relaxed stratification)");
    }
  }

  FoldAssignment out;
  out.k = k;
  out.seed = seed;
  out.fold_of.assign(ds.n(), -1);
  SplitMix64 rng(seed);
  std::size_t position = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (static_cast<std::size_t>(ds.y()[i]) == c) members.push_back(i);
    seeded_shuffle(members, rng);
    for (auto i : members) {
      out.fold_of[i] = static_cast<int>(position % static_cast<std::size_t>(k));
      ++position;
    }
  }
  return out;
}

}  // namespace cocoscan
