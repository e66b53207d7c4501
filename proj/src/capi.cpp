#include "cocoscan/cocoscan.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "cocoscan/bundle.hpp"
#include "cocoscan/config.hpp"
#include "cocoscan/error.hpp"
#include "cocoscan/evaluation.hpp"
#include "cocoscan/stats.hpp"
#include "cocoscan/synth.hpp"
#include "cocoscan/textio.hpp"
#include "cocoscan/workflows.hpp"

struct cocoscan_dataset {
  cocoscan::SpectralDataset ds;
};
struct cocoscan_config {
  cocoscan::PipelineConfig cfg;
};
struct cocoscan_model {
  cocoscan::ModelBundle bundle;
};

namespace {

thread_local std::string last_error;

template <class F>
cocoscan_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return COCOSCAN_OK;
  } catch (const cocoscan::Error& e) {
    last_error = e.what();
    return static_cast<cocoscan_status>(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    last_error = "internal error";
  }
  return COCOSCAN_NUMERIC_FAILURE;
}

template <class T>
void require(const T* p, const char* what) {
  if (p == nullptr) throw cocoscan::InvalidInput(std::string(what) + " is NULL");
}

// Ownership passes to the caller; released by cocoscan_string_free.
char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put(char** out, const std::string& s) {
  if (out != nullptr) *out = dup(s);
}

}  // namespace

extern "C" {

const char* cocoscan_last_error(void) { return last_error.c_str(); }

const char* cocoscan_version(void) { return "0.1.0"; }

void cocoscan_string_free(char* s) { std::free(s); }

cocoscan_status cocoscan_dataset_load_csv(const char* path, cocoscan_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cocoscan_dataset{cocoscan::load_csv_file(path)};
  });
}

cocoscan_status cocoscan_dataset_parse_csv(const char* text, cocoscan_dataset** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cocoscan_dataset{cocoscan::load_csv_text(text)};
  });
}

cocoscan_status cocoscan_dataset_to_csv(const cocoscan_dataset* ds, char** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = dup(cocoscan::to_csv(ds->ds));
  });
}

cocoscan_status cocoscan_dataset_shape(const cocoscan_dataset* ds, size_t* samples, size_t* bands,
                                       size_t* classes) {
  return guarded([&] {
    require(ds, "dataset");
    if (samples) *samples = ds->ds.n();
    if (bands) *bands = ds->ds.d();
    if (classes) *classes = ds->ds.num_classes();
  });
}

cocoscan_status cocoscan_dataset_window(const cocoscan_dataset* ds, double lo_nm, double hi_nm,
                                        cocoscan_dataset** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(out, "out");
    *out = new cocoscan_dataset{cocoscan::select_window(ds->ds, lo_nm, hi_nm)};
  });
}

void cocoscan_dataset_free(cocoscan_dataset* ds) { delete ds; }

void cocoscan_synth_defaults(cocoscan_synth_options* o) {
  if (o == nullptr) return;
  const cocoscan::SynthSpec spec;
  o->n_per_class = spec.n_per_class;
  o->axis_lo_nm = spec.axis.front();
  o->axis_hi_nm = spec.axis.back();
  o->axis_points = spec.axis.size();
  o->peak_center_nm = spec.peak_center_nm;
  o->peak_width_nm = spec.peak_width_nm;
  o->base_amplitude = spec.base_amplitude;
  o->water_gain = spec.water_gain;
  o->noise_sd = spec.noise_sd;
  o->seed = spec.seed;
}

cocoscan_status cocoscan_synth_generate(const cocoscan_synth_options* o, cocoscan_dataset** out) {
  return guarded([&] {
    require(o, "options");
    require(out, "out");
    cocoscan::SynthSpec spec;
    spec.n_per_class = o->n_per_class;
    spec.axis = cocoscan::SynthSpec::linear_axis(o->axis_lo_nm, o->axis_hi_nm, o->axis_points);
    spec.peak_center_nm = o->peak_center_nm;
    spec.peak_width_nm = o->peak_width_nm;
    spec.base_amplitude = o->base_amplitude;
    spec.water_gain = o->water_gain;
    spec.noise_sd = o->noise_sd;
    spec.seed = o->seed;
    *out = new cocoscan_dataset{cocoscan::generate(spec)};
  });
}

cocoscan_status cocoscan_config_new(cocoscan_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new cocoscan_config{};
  });
}

void cocoscan_config_free(cocoscan_config* cfg) { delete cfg; }

cocoscan_status cocoscan_config_load_file(cocoscan_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "config");
    require(path, "path");
    const std::string text = cocoscan::textio::read_file(path);
    cocoscan::PipelineConfig next = cfg->cfg;
    try {
      cocoscan::apply_config_text(next, text);
    } catch (const cocoscan::Error& e) {
      cocoscan::rethrow_with_context(e, path);
    }
    cfg->cfg = next;
  });
}

cocoscan_status cocoscan_config_apply_text(cocoscan_config* cfg, const char* text) {
  return guarded([&] {
    require(cfg, "config");
    require(text, "text");
    cocoscan::PipelineConfig next = cfg->cfg;
    cocoscan::apply_config_text(next, text);
    cfg->cfg = next;
  });
}

cocoscan_status cocoscan_config_set(cocoscan_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    cocoscan::apply_setting(cfg->cfg, key, value);
  });
}

cocoscan_status cocoscan_config_set_pipeline(cocoscan_config* cfg, const char* spec) {
  return guarded([&] {
    require(cfg, "config");
    require(spec, "spec");
    cocoscan::PipelineConfig next = cfg->cfg;
    cocoscan::apply_pipeline_spec(next, spec);
    cfg->cfg = next;
  });
}

cocoscan_status cocoscan_config_to_text(const cocoscan_config* cfg, char** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = dup(cocoscan::to_config_text(cfg->cfg));
  });
}

cocoscan_status cocoscan_evaluate(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                                  double* balanced_accuracy, char** csv, char** text) {
  return guarded([&] {
    require(ds, "dataset");
    require(cfg, "config");
    const auto report = cocoscan::cross_validate(ds->ds, cfg->cfg);
    if (balanced_accuracy) *balanced_accuracy = report.balanced_accuracy;
    put(csv, report.to_csv());
    put(text, report.to_text());
  });
}

cocoscan_status cocoscan_evaluate_grid(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                                       char** csv, char** text) {
  return guarded([&] {
    require(ds, "dataset");
    require(cfg, "config");
    const auto grid = cocoscan::grid_evaluate(ds->ds, cfg->cfg);
    put(csv, grid.to_csv());
    put(text, grid.to_text());
  });
}

cocoscan_status cocoscan_sweep_k(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                                 size_t k_max, char** csv) {
  return guarded([&] {
    require(ds, "dataset");
    require(cfg, "config");
    if (k_max < 1) throw cocoscan::InvalidInput("kmax must be >= 1");
    std::vector<std::size_t> ks(k_max);
    for (std::size_t k = 0; k < k_max; ++k) ks[k] = k + 1;
    const auto windowed = cocoscan::apply_window(ds->ds, cfg->cfg);
    put(csv, cocoscan::sweep_to_csv(cocoscan::sweep_k(windowed, cfg->cfg, ks)));
  });
}

cocoscan_status cocoscan_project(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                                 const char* method, char** csv) {
  return guarded([&] {
    require(ds, "dataset");
    require(cfg, "config");
    require(method, "method");
    const auto m = cocoscan::parse_feature_method(method);
    const auto z = cocoscan::project(ds->ds, cfg->cfg, m, 2);
    put(csv, cocoscan::projection_to_csv(z, ds->ds));
  });
}

cocoscan_status cocoscan_ttest(const cocoscan_dataset* a, const char* group_a,
                               const cocoscan_dataset* b, const char* group_b, char** csv,
                               char** text) {
  return guarded([&] {
    require(a, "dataset a");
    require(b, "dataset b");
    const auto report =
        cocoscan::t_test_groups(a->ds, group_a ? group_a : "", b->ds, group_b ? group_b : "");
    put(csv, report.to_csv());
    put(text, report.to_text());
  });
}

namespace {

std::string selection_text(const char* title, const cocoscan::SelectionTrace& trace,
                           const cocoscan::SpectralDataset& ds, const std::string& config) {
  using cocoscan::textio::format_double;
  std::string s = std::string(title) + "\n";
  s += "Baseline score: " + format_double(trace.baseline_score) + "\n";
  s += "Selected score: " + format_double(trace.selected_score) + "\n";
  if (trace.window)
    s += "Selected window: " + format_double(trace.window->lo_nm) + ":" +
         format_double(trace.window->hi_nm) + " nm (" + std::to_string(trace.window->width()) +
         " bands)\n";
  s += "Retained bands: " + std::to_string(trace.selected.size()) + " of " +
       std::to_string(ds.d()) + "\n";
  s += "Configuration:\n" + config;
  return s;
}

}  // namespace

cocoscan_status cocoscan_bfe(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                             size_t min_features, double tolerance, char** csv, char** text) {
  return guarded([&] {
    require(ds, "dataset");
    require(cfg, "config");
    const auto windowed = cocoscan::apply_window(ds->ds, cfg->cfg);
    cocoscan::BfeConfig bc;
    bc.min_features = min_features;
    bc.tolerance = tolerance;
    const auto trace = cocoscan::backward_eliminate(windowed, cocoscan::cv_evaluator(cfg->cfg), bc);
    put(csv, trace.to_csv());
    put(text, selection_text("Backward feature elimination", trace, windowed,
                             cocoscan::to_config_text(cfg->cfg)));
  });
}

cocoscan_status cocoscan_window_search(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                                       size_t grid_step, size_t min_width, char** csv,
                                       char** text) {
  return guarded([&] {
    require(ds, "dataset");
    require(cfg, "config");
    cocoscan::WindowConfig wc;
    wc.grid_step = grid_step;
    wc.min_width = min_width;
    const auto trace = cocoscan::window_search(ds->ds, cocoscan::cv_evaluator(cfg->cfg), wc);
    put(csv, trace.to_csv());
    put(text, selection_text("Window search", trace, ds->ds, cocoscan::to_config_text(cfg->cfg)));
  });
}

cocoscan_status cocoscan_model_train(const cocoscan_dataset* ds, const cocoscan_config* cfg,
                                     cocoscan_model** out) {
  return guarded([&] {
    require(ds, "dataset");
    require(cfg, "config");
    require(out, "out");
    *out = new cocoscan_model{cocoscan::train_bundle(ds->ds, cfg->cfg)};
  });
}

cocoscan_status cocoscan_model_save(const cocoscan_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    cocoscan::textio::write_file(path, cocoscan::save_bundle_text(model->bundle));
  });
}

cocoscan_status cocoscan_model_load(const char* path, cocoscan_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cocoscan_model{cocoscan::load_bundle_file(path)};
  });
}

cocoscan_status cocoscan_model_to_text(const cocoscan_model* model, char** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = dup(cocoscan::save_bundle_text(model->bundle));
  });
}

cocoscan_status cocoscan_model_parse(const char* text, cocoscan_model** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new cocoscan_model{cocoscan::load_bundle_text(text)};
  });
}

cocoscan_status cocoscan_model_predict_csv(const cocoscan_model* model, const char* samples_csv,
                                           char** labels) {
  return guarded([&] {
    require(model, "model");
    require(samples_csv, "samples");
    require(labels, "labels");
    const auto samples = cocoscan::load_samples_text(samples_csv);
    const auto ids = cocoscan::predict(model->bundle, samples);
    std::string out;
    for (int id : ids) out += model->bundle.labels.at(static_cast<std::size_t>(id)).name + "\n";
    *labels = dup(out);
  });
}

void cocoscan_model_free(cocoscan_model* model) { delete model; }

}  // extern "C"
