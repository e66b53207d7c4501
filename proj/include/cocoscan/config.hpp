#pragma once

#include <string>
#include <string_view>

#include "cocoscan/pipeline.hpp"

namespace cocoscan {

// Config files are flat `key = value` lines grouped under `[section]`
// headers. `#` starts a comment; blank lines are ignored. A key inside
// section S is addressed as `S.key`:
//
//   [data]        window = LO:HI | none
//   [features]    method = original|pca|lda, pca_components, lda_components
//                 (0 = c-1), ridge_eps_rel, variant, pca_first
//   [classifier]  name = knn|linear_svm|rbf_svm, k, metric, c, gamma (auto or
//                 a number), tol, max_passes
//   [cv]          folds, seed, relaxed

/// Sets one dotted key. Errors name the key.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Parses config text over `cfg`. Errors carry the 1-based line number.
void apply_config_text(PipelineConfig& cfg, std::string_view text);

/// `FEATURE+CLASSIFIER`, e.g. `lda+knn` or `pca+rbf_svm`.
void apply_pipeline_spec(PipelineConfig& cfg, std::string_view spec);

/// Canonical text for `cfg`; apply_config_text on it reproduces `cfg`.
std::string to_config_text(const PipelineConfig& cfg);

}  // namespace cocoscan
