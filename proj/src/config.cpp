#include "cocoscan/config.hpp"

#include <cmath>
#include <sstream>

#include "cocoscan/error.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

namespace {

double as_double(std::string_view key, std::string_view value) {
  auto v = textio::parse_double(value);
  if (!v || !std::isfinite(*v))
    throw InvalidInput(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  return *v;
}

long long as_int(std::string_view key, std::string_view value, long long min) {
  auto v = textio::parse_int(value);
  if (!v) throw InvalidInput(std::string(key) + ": expected an integer, got '" +
                             std::string(value) + "'");
  if (*v < min)
    throw InvalidInput(std::string(key) + ": must be >= " + std::to_string(min));
  return *v;
}

bool as_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InvalidInput(std::string(key) + ": expected true or false, got '" + std::string(value) +
                     "'");
}

template <class F>
auto field(std::string_view key, F&& parse) {
  try {
    return parse();
  } catch (const Error& e) {
    rethrow_with_context(e, std::string(key));
  }
}

}  // namespace

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view raw) {
  const auto value = textio::trim(raw);
  if (key == "data.window") {
    if (value == "none" || value.empty())
      cfg.window.reset();
    else
      cfg.window = field(key, [&] { return parse_window(value); });
  } else if (key == "features.method") {
    cfg.feature_method = field(key, [&] { return parse_feature_method(value); });
  } else if (key == "features.pca_components") {
    cfg.pca_components = static_cast<std::size_t>(as_int(key, value, 1));
  } else if (key == "features.lda_components") {
    cfg.lda.components = static_cast<std::size_t>(as_int(key, value, 0));
  } else if (key == "features.ridge_eps_rel") {
    cfg.lda.ridge_eps_rel = as_double(key, value);
    if (!(cfg.lda.ridge_eps_rel > 0.0)) throw InvalidInput(std::string(key) + ": must be > 0");
  } else if (key == "features.variant") {
    cfg.lda.variant = field(key, [&] { return parse_lda_variant(value); });
  } else if (key == "features.pca_first") {
    cfg.lda.pca_first = as_bool(key, value);
  } else if (key == "classifier.name") {
    cfg.classifier = field(key, [&] { return parse_classifier_kind(value); });
  } else if (key == "classifier.k") {
    cfg.k = static_cast<std::size_t>(as_int(key, value, 1));
  } else if (key == "classifier.metric") {
    cfg.metric = field(key, [&] { return parse_metric(value); });
  } else if (key == "classifier.c") {
    cfg.svm_c = as_double(key, value);
    if (!(cfg.svm_c > 0.0)) throw InvalidInput(std::string(key) + ": must be > 0");
  } else if (key == "classifier.gamma") {
    if (value == "auto") {
      cfg.gamma.reset();
    } else {
      cfg.gamma = as_double(key, value);
      if (!(*cfg.gamma > 0.0)) throw InvalidInput(std::string(key) + ": must be > 0");
    }
  } else if (key == "classifier.tol") {
    cfg.svm_tol = as_double(key, value);
    if (!(cfg.svm_tol > 0.0)) throw InvalidInput(std::string(key) + ": must be > 0");
  } else if (key == "classifier.max_passes") {
    cfg.svm_max_passes = static_cast<int>(as_int(key, value, 1));
  } else if (key == "cv.folds") {
    cfg.folds = static_cast<int>(as_int(key, value, 2));
  } else if (key == "cv.seed") {
    auto v = textio::parse_int(value);
    if (v && *v >= 0) {
      cfg.seed = static_cast<std::uint64_t>(*v);
    } else {
      // Values above INT64_MAX.
      std::uint64_t u = 0;
      std::istringstream ss{std::string(value)};
      if (value.empty() || value.front() == '-' || !(ss >> u) || !ss.eof())
        throw InvalidInput(std::string(key) + ": expected an unsigned integer, got '" +
                           std::string(value) + "'");
      cfg.seed = u;
    }
  } else if (key == "cv.relaxed") {
    cfg.relaxed_folds = as_bool(key, value);
  } else {
    throw InvalidInput("unknown config key '" + std::string(key) + "'");
  }
}

void apply_config_text(PipelineConfig& cfg, std::string_view text) {
  std::string section;
  std::size_t line_no = 0;
  for (auto line : textio::split(text, '\n')) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = textio::trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw InvalidInput(where + ": malformed section header '" + std::string(line) + "'");
      section = std::string(textio::trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw InvalidInput(where + ": expected 'key = value', got '" + std::string(line) + "'");
    const auto name = textio::trim(line.substr(0, eq));
    if (name.empty()) throw InvalidInput(where + ": missing key");
    const std::string key = section.empty() ? std::string(name) : section + "." + std::string(name);
    try {
      apply_setting(cfg, key, line.substr(eq + 1));
    } catch (const Error& e) {
      rethrow_with_context(e, where);
    }
  }
}

void apply_pipeline_spec(PipelineConfig& cfg, std::string_view spec) {
  const auto plus = spec.find('+');
  if (plus == std::string_view::npos)
    throw InvalidInput("pipeline must be FEATURE+CLASSIFIER (e.g. lda+knn), got '" +
                       std::string(spec) + "'");
  apply_setting(cfg, "features.method", spec.substr(0, plus));
  apply_setting(cfg, "classifier.name", spec.substr(plus + 1));
}

std::string to_config_text(const PipelineConfig& cfg) {
  std::ostringstream ss;
  ss << "[data]\n";
  ss << "window = "
     << (cfg.window ? textio::format_double(cfg.window->lo_nm) + ":" +
                          textio::format_double(cfg.window->hi_nm)
                    : std::string("none"))
     << '\n';
  ss << "\n[features]\n";
  ss << "method = " << to_string(cfg.feature_method) << '\n';
  ss << "pca_components = " << cfg.pca_components << '\n';
  ss << "lda_components = " << cfg.lda.components << '\n';
  ss << "ridge_eps_rel = " << textio::format_double(cfg.lda.ridge_eps_rel) << '\n';
  ss << "variant = " << to_string(cfg.lda.variant) << '\n';
  ss << "pca_first = " << (cfg.lda.pca_first ? "true" : "false") << '\n';
  ss << "\n[classifier]\n";
  ss << "name = " << to_string(cfg.classifier) << '\n';
  ss << "k = " << cfg.k << '\n';
  ss << "metric = " << to_string(cfg.metric) << '\n';
  ss << "c = " << textio::format_double(cfg.svm_c) << '\n';
  ss << "gamma = " << (cfg.gamma ? textio::format_double(*cfg.gamma) : std::string("auto"))
     << '\n';
  ss << "tol = " << textio::format_double(cfg.svm_tol) << '\n';
  ss << "max_passes = " << cfg.svm_max_passes << '\n';
  ss << "\n[cv]\n";
  ss << "folds = " << cfg.folds << '\n';
  ss << "seed = " << cfg.seed << '\n';
  ss << "relaxed = " << (cfg.relaxed_folds ? "true" : "false") << '\n';
  return ss.str();
}

}  // namespace cocoscan
