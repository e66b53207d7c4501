// Command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cocoscan/cocoscan.h"

namespace {

struct Failure {
  cocoscan_status status;
  std::string message;
};

void check(cocoscan_status s) {
  if (s != COCOSCAN_OK) throw Failure{s, cocoscan_last_error()};
}

struct DatasetDeleter {
  void operator()(cocoscan_dataset* p) const { cocoscan_dataset_free(p); }
};
struct ConfigDeleter {
  void operator()(cocoscan_config* p) const { cocoscan_config_free(p); }
};
struct ModelDeleter {
  void operator()(cocoscan_model* p) const { cocoscan_model_free(p); }
};
using DatasetPtr = std::unique_ptr<cocoscan_dataset, DatasetDeleter>;
using ConfigPtr = std::unique_ptr<cocoscan_config, ConfigDeleter>;
using ModelPtr = std::unique_ptr<cocoscan_model, ModelDeleter>;

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  cocoscan_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{COCOSCAN_MISSING_RESOURCE, "cannot write '" + path + "'"};
  f << content;
  if (!f) throw Failure{COCOSCAN_MISSING_RESOURCE, "failed writing '" + path + "'"};
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Failure{COCOSCAN_MISSING_RESOURCE, "cannot open '" + path + "'"};
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

DatasetPtr load_dataset(const std::string& path) {
  if (path.empty()) throw Failure{COCOSCAN_INVALID_INPUT, "--data is required"};
  cocoscan_dataset* ds = nullptr;
  check(cocoscan_dataset_load_csv(path.c_str(), &ds));
  return DatasetPtr(ds);
}

// Options shared by the commands that build a pipeline configuration.
struct CommonOptions {
  std::string data;
  std::string config;
  std::string out;
  std::string window;
  std::string pipeline;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::vector<std::string> settings;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_cv = true) {
  cmd->add_option("--data", o.data, "labelled spectra CSV");
  cmd->add_option("--config", o.config, "pipeline config file");
  cmd->add_option("--window", o.window, "band window LO:HI in nm");
  cmd->add_option("--pipeline", o.pipeline, "FEATURE+CLASSIFIER, e.g. lda+knn");
  cmd->add_option("--set", o.settings, "override a config key, KEY=VALUE (repeatable)");
  if (with_cv) {
    cmd->add_option("--seed", o.seed, "fold-assignment seed");
    cmd->add_option("--folds", o.folds, "number of CV folds");
  }
}

ConfigPtr build_config(const CommonOptions& o) {
  cocoscan_config* raw = nullptr;
  check(cocoscan_config_new(&raw));
  ConfigPtr cfg(raw);
  if (!o.config.empty()) check(cocoscan_config_load_file(cfg.get(), o.config.c_str()));
  if (!o.window.empty()) check(cocoscan_config_set(cfg.get(), "data.window", o.window.c_str()));
  if (!o.pipeline.empty()) check(cocoscan_config_set_pipeline(cfg.get(), o.pipeline.c_str()));
  if (o.seed)
    check(cocoscan_config_set(cfg.get(), "cv.seed", std::to_string(*o.seed).c_str()));
  if (o.folds)
    check(cocoscan_config_set(cfg.get(), "cv.folds", std::to_string(*o.folds).c_str()));
  for (const auto& kv : o.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw Failure{COCOSCAN_INVALID_INPUT, "--set expects KEY=VALUE, got '" + kv + "'"};
    check(cocoscan_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  return cfg;
}

// Reports go to PREFIX.csv and PREFIX.txt; the text also goes to stdout.
void emit_report(const std::string& prefix, const std::string& csv, const std::string& text) {
  if (!prefix.empty()) {
    write_text(prefix + ".csv", csv);
    write_text(prefix + ".txt", text);
  }
  std::cout << text;
}

// Plain CSV results go to --out when given, else to stdout.
void emit_csv(const std::string& path, const std::string& csv) {
  if (path.empty())
    std::cout << csv;
  else
    write_text(path, csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral adulteration screening: band selection, LDA/PCA features, KNN/SVM "
               "classification and cross-validated evaluation."};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cocoscan_version()));

  CommonOptions common;
  bool grid = false;
  std::size_t kmax = 9;
  std::string method = "lda";
  std::string model_path;
  std::string sample_path;
  std::string data_b;
  std::string group_a;
  std::string group_b;
  std::size_t min_features = 1;
  double tolerance = 0.0;
  std::size_t grid_step = 24;
  std::size_t min_width = 2;
  cocoscan_synth_options synth{};
  cocoscan_synth_defaults(&synth);

  auto* evaluate = app.add_subcommand("evaluate", "stratified cross-validation of one pipeline or the full grid");
  add_common(evaluate, common);
  evaluate->add_flag("--grid", grid, "evaluate all feature/classifier combinations");
  evaluate->add_option("--out", common.out, "report prefix: writes PREFIX.csv and PREFIX.txt");

  auto* train = app.add_subcommand("train", "fit the pipeline on the whole dataset and save a model");
  add_common(train, common, false);
  train->add_option("--out", common.out, "model file")->required();

  auto* predict = app.add_subcommand("predict", "classify spectra with a saved model");
  predict->add_option("--model", model_path, "model file from train")->required();
  predict->add_option("--sample,--data", sample_path, "CSV of spectra to classify")->required();
  predict->add_option("--out", common.out, "write labels here instead of stdout");

  auto* ttest = app.add_subcommand("ttest", "per-band paired t-tests between two groups");
  ttest->add_option("--data", common.data, "labelled spectra CSV")->required();
  ttest->add_option("--data-b", data_b, "second file for group B (defaults to --data)");
  ttest->add_option("--group-a", group_a, "class of group A (default: all rows)");
  ttest->add_option("--group-b", group_b, "class of group B (default: all rows)");
  ttest->add_option("--window", common.window, "band window LO:HI in nm");
  ttest->add_option("--out", common.out, "report prefix");

  auto* bfe = app.add_subcommand("bfe", "backward feature elimination scored by CV accuracy");
  add_common(bfe, common);
  bfe->add_option("--min-features", min_features, "stop at this many bands");
  bfe->add_option("--tolerance", tolerance, "allowed score drop per removal");
  bfe->add_option("--out", common.out, "report prefix");

  auto* window = app.add_subcommand("window", "exhaustive contiguous band-window search");
  add_common(window, common);
  window->add_option("--grid-step", grid_step, "columns between candidate boundaries");
  window->add_option("--min-width", min_width, "narrowest window in columns");
  window->add_option("--out", common.out, "report prefix");

  auto* sweepk = app.add_subcommand("sweepk", "KNN accuracy for k = 1..kmax");
  add_common(sweepk, common);
  sweepk->add_option("--kmax", kmax, "largest k");
  sweepk->add_option("--out", common.out, "CSV output file");

  auto* project = app.add_subcommand("project", "2-D PCA or LDA coordinates for plotting");
  add_common(project, common, false);
  project->add_option("--method", method, "pca or lda");
  project->add_option("--out", common.out, "CSV output file");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labelled dataset");
  synth_cmd->add_option("--seed", synth.seed, "noise seed");
  synth_cmd->add_option("--n-per-class", synth.n_per_class, "samples per class");
  synth_cmd->add_option("--points", synth.axis_points, "bands");
  synth_cmd->add_option("--lo", synth.axis_lo_nm, "first wavelength (nm)");
  synth_cmd->add_option("--hi", synth.axis_hi_nm, "last wavelength (nm)");
  synth_cmd->add_option("--peak-center", synth.peak_center_nm, "band center (nm)");
  synth_cmd->add_option("--peak-width", synth.peak_width_nm, "band standard deviation (nm)");
  synth_cmd->add_option("--noise-sd", synth.noise_sd, "noise standard deviation (AU)");
  synth_cmd->add_option("--out", common.out, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : COCOSCAN_INVALID_INPUT;
  }

  try {
    if (evaluate->parsed()) {
      const auto ds = load_dataset(common.data);
      const auto cfg = build_config(common);
      char* csv = nullptr;
      char* text = nullptr;
      if (grid)
        check(cocoscan_evaluate_grid(ds.get(), cfg.get(), &csv, &text));
      else
        check(cocoscan_evaluate(ds.get(), cfg.get(), nullptr, &csv, &text));
      emit_report(common.out, take(csv), take(text));
    } else if (train->parsed()) {
      const auto ds = load_dataset(common.data);
      const auto cfg = build_config(common);
      cocoscan_model* raw = nullptr;
      check(cocoscan_model_train(ds.get(), cfg.get(), &raw));
      ModelPtr model(raw);
      check(cocoscan_model_save(model.get(), common.out.c_str()));
    } else if (predict->parsed()) {
      cocoscan_model* raw = nullptr;
      check(cocoscan_model_load(model_path.c_str(), &raw));
      ModelPtr model(raw);
      const std::string samples = read_text(sample_path);
      char* labels = nullptr;
      check(cocoscan_model_predict_csv(model.get(), samples.c_str(), &labels));
      emit_csv(common.out, take(labels));
    } else if (ttest->parsed()) {
      auto a = load_dataset(common.data);
      auto b = data_b.empty() ? DatasetPtr() : load_dataset(data_b);
      if (!common.window.empty()) {
        const auto colon = common.window.find(':');
        char* end_lo = nullptr;
        char* end_hi = nullptr;
        const std::string lo_s = common.window.substr(0, colon);
        const std::string hi_s = colon == std::string::npos ? "" : common.window.substr(colon + 1);
        const double lo = std::strtod(lo_s.c_str(), &end_lo);
        const double hi = std::strtod(hi_s.c_str(), &end_hi);
        if (colon == std::string::npos || lo_s.empty() || hi_s.empty() || *end_lo || *end_hi)
          throw Failure{COCOSCAN_INVALID_INPUT,
                        "window must be LO:HI, got '" + common.window + "'"};
        cocoscan_dataset* w = nullptr;
        check(cocoscan_dataset_window(a.get(), lo, hi, &w));
        a.reset(w);
        if (b) {
          check(cocoscan_dataset_window(b.get(), lo, hi, &w));
          b.reset(w);
        }
      }
      char* csv = nullptr;
      char* text = nullptr;
      check(cocoscan_ttest(a.get(), group_a.c_str(), b ? b.get() : a.get(), group_b.c_str(), &csv,
                           &text));
      emit_report(common.out, take(csv), take(text));
    } else if (bfe->parsed()) {
      const auto ds = load_dataset(common.data);
      const auto cfg = build_config(common);
      char* csv = nullptr;
      char* text = nullptr;
      check(cocoscan_bfe(ds.get(), cfg.get(), min_features, tolerance, &csv, &text));
      emit_report(common.out, take(csv), take(text));
    } else if (window->parsed()) {
      const auto ds = load_dataset(common.data);
      const auto cfg = build_config(common);
      char* csv = nullptr;
      char* text = nullptr;
      check(cocoscan_window_search(ds.get(), cfg.get(), grid_step, min_width, &csv, &text));
      emit_report(common.out, take(csv), take(text));
    } else if (sweepk->parsed()) {
      const auto ds = load_dataset(common.data);
      const auto cfg = build_config(common);
      char* csv = nullptr;
      check(cocoscan_sweep_k(ds.get(), cfg.get(), kmax, &csv));
      emit_csv(common.out, take(csv));
    } else if (project->parsed()) {
      const auto ds = load_dataset(common.data);
      const auto cfg = build_config(common);
      char* csv = nullptr;
      check(cocoscan_project(ds.get(), cfg.get(), method.c_str(), &csv));
      emit_csv(common.out, take(csv));
    } else if (synth_cmd->parsed()) {
      cocoscan_dataset* raw = nullptr;
      check(cocoscan_synth_generate(&synth, &raw));
      DatasetPtr ds(raw);
      char* csv = nullptr;
      check(cocoscan_dataset_to_csv(ds.get(), &csv));
      emit_csv(common.out, take(csv));
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << '\n';
    return static_cast<int>(f.status);
  }
  return 0;
}
