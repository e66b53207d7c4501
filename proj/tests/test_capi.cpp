// Links only the shared library and its C header.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <string>

#include "cocoscan/cocoscan.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  cocoscan_string_free(s);
  return out;
}

cocoscan_dataset* small_synth() {
  cocoscan_synth_options opt;
  cocoscan_synth_defaults(&opt);
  opt.axis_lo_nm = 3000;
  opt.axis_hi_nm = 3900;
  opt.axis_points = 40;
  cocoscan_dataset* ds = nullptr;
  REQUIRE(cocoscan_synth_generate(&opt, &ds) == COCOSCAN_OK);
  return ds;
}

}  // namespace

TEST_CASE("version and defaults") {
  CHECK(std::string(cocoscan_version()).size() > 0);
  cocoscan_synth_options opt;
  cocoscan_synth_defaults(&opt);
  CHECK(opt.n_per_class == 14);
  CHECK(opt.axis_points == 729);
  CHECK(opt.seed == 42);
}

TEST_CASE("dataset round trip and shape") {
  cocoscan_dataset* ds = small_synth();
  size_t n = 0, d = 0, c = 0;
  CHECK(cocoscan_dataset_shape(ds, &n, &d, &c) == COCOSCAN_OK);
  CHECK(n == 42);
  CHECK(d == 40);
  CHECK(c == 3);
  char* csv = nullptr;
  REQUIRE(cocoscan_dataset_to_csv(ds, &csv) == COCOSCAN_OK);
  const std::string text = take(csv);
  cocoscan_dataset* back = nullptr;
  REQUIRE(cocoscan_dataset_parse_csv(text.c_str(), &back) == COCOSCAN_OK);
  char* csv2 = nullptr;
  REQUIRE(cocoscan_dataset_to_csv(back, &csv2) == COCOSCAN_OK);
  CHECK(take(csv2) == text);

  cocoscan_dataset* win = nullptr;
  REQUIRE(cocoscan_dataset_window(ds, 3300, 3600, &win) == COCOSCAN_OK);
  CHECK(cocoscan_dataset_shape(win, nullptr, &d, nullptr) == COCOSCAN_OK);
  CHECK(d < 40);
  CHECK(cocoscan_dataset_window(ds, 5000, 6000, &win) == COCOSCAN_INVALID_INPUT);
  cocoscan_dataset_free(win);
  cocoscan_dataset_free(back);
  cocoscan_dataset_free(ds);
}

TEST_CASE("status codes and last error") {
  cocoscan_dataset* ds = nullptr;
  CHECK(cocoscan_dataset_load_csv("/nonexistent/spectra.csv", &ds) == COCOSCAN_MISSING_RESOURCE);
  CHECK(ds == nullptr);
  CHECK(std::string(cocoscan_last_error()).find("/nonexistent/spectra.csv") != std::string::npos);
  CHECK(cocoscan_dataset_parse_csv("label,1,2\na,1\n", &ds) == COCOSCAN_INVALID_INPUT);
  CHECK(cocoscan_dataset_parse_csv(nullptr, &ds) == COCOSCAN_INVALID_INPUT);

  cocoscan_config* cfg = nullptr;
  REQUIRE(cocoscan_config_new(&cfg) == COCOSCAN_OK);
  CHECK(cocoscan_config_set(cfg, "classifier.name", "forest") == COCOSCAN_INVALID_INPUT);
  CHECK(std::string(cocoscan_last_error()).find("classifier.name") != std::string::npos);
  CHECK(cocoscan_config_apply_text(cfg, "[cv]\nfolds = 0\n") == COCOSCAN_INVALID_INPUT);
  CHECK(std::string(cocoscan_last_error()).find("line 2") != std::string::npos);
  CHECK(cocoscan_config_set_pipeline(cfg, "pca+rbf_svm") == COCOSCAN_OK);
  char* text = nullptr;
  REQUIRE(cocoscan_config_to_text(cfg, &text) == COCOSCAN_OK);
  CHECK(take(text).find("rbf_svm") != std::string::npos);
  CHECK(cocoscan_config_load_file(cfg, "/nonexistent/cfg.ini") == COCOSCAN_MISSING_RESOURCE);
  cocoscan_config_free(cfg);
}

TEST_CASE("evaluation entry points") {
  cocoscan_dataset* ds = small_synth();
  cocoscan_config* cfg = nullptr;
  REQUIRE(cocoscan_config_new(&cfg) == COCOSCAN_OK);
  double bac = 0;
  char* csv = nullptr;
  REQUIRE(cocoscan_evaluate(ds, cfg, &bac, &csv, nullptr) == COCOSCAN_OK);
  CHECK(bac >= 0.95);
  CHECK(take(csv).starts_with("fold,"));
  char* grid = nullptr;
  REQUIRE(cocoscan_evaluate_grid(ds, cfg, &grid, nullptr) == COCOSCAN_OK);
  CHECK(!take(grid).empty());
  char* sweep = nullptr;
  REQUIRE(cocoscan_sweep_k(ds, cfg, 9, &sweep) == COCOSCAN_OK);
  const std::string s = take(sweep);
  CHECK(std::count(s.begin(), s.end(), '\n') == 10);
  char* proj = nullptr;
  REQUIRE(cocoscan_project(ds, cfg, "pca", &proj) == COCOSCAN_OK);
  CHECK(take(proj).starts_with("component1,component2,label\n"));
  CHECK(cocoscan_project(ds, cfg, "ica", &proj) == COCOSCAN_INVALID_INPUT);
  char* tt = nullptr;
  REQUIRE(cocoscan_ttest(ds, "adulterated20", ds, "authentic", &tt, nullptr) == COCOSCAN_OK);
  CHECK(take(tt).starts_with("wavelength_nm,"));
  char* win = nullptr;
  REQUIRE(cocoscan_window_search(ds, cfg, 8, 4, &win, nullptr) == COCOSCAN_OK);
  CHECK(!take(win).empty());
  cocoscan_config_free(cfg);
  cocoscan_dataset_free(ds);
}

TEST_CASE("model lifecycle") {
  cocoscan_dataset* ds = small_synth();
  cocoscan_config* cfg = nullptr;
  REQUIRE(cocoscan_config_new(&cfg) == COCOSCAN_OK);
  cocoscan_model* model = nullptr;
  REQUIRE(cocoscan_model_train(ds, cfg, &model) == COCOSCAN_OK);
  const auto path = (std::filesystem::temp_directory_path() / "cocoscan_capi_model.txt").string();
  REQUIRE(cocoscan_model_save(model, path.c_str()) == COCOSCAN_OK);
  cocoscan_model* loaded = nullptr;
  REQUIRE(cocoscan_model_load(path.c_str(), &loaded) == COCOSCAN_OK);
  std::remove(path.c_str());
  char* t1 = nullptr;
  char* t2 = nullptr;
  REQUIRE(cocoscan_model_to_text(model, &t1) == COCOSCAN_OK);
  REQUIRE(cocoscan_model_to_text(loaded, &t2) == COCOSCAN_OK);
  CHECK(take(t1) == take(t2));

  char* csv = nullptr;
  REQUIRE(cocoscan_dataset_to_csv(ds, &csv) == COCOSCAN_OK);
  const std::string data = take(csv);
  char* labels = nullptr;
  REQUIRE(cocoscan_model_predict_csv(loaded, data.c_str(), &labels) == COCOSCAN_OK);
  const std::string out = take(labels);
  CHECK(std::count(out.begin(), out.end(), '\n') == 42);
  CHECK(out.starts_with("authentic\n"));
  CHECK(out.ends_with("adulterated20\n"));
  CHECK(cocoscan_model_predict_csv(loaded, "label,1,2\nx,0,0\n", &labels) == COCOSCAN_INVALID_INPUT);
  cocoscan_model* bad = nullptr;
  CHECK(cocoscan_model_parse("garbage", &bad) == COCOSCAN_INVALID_INPUT);
  CHECK(bad == nullptr);
  cocoscan_model_free(loaded);
  cocoscan_model_free(model);
  cocoscan_config_free(cfg);
  cocoscan_dataset_free(ds);
}
