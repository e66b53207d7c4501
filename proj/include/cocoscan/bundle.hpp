#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cocoscan/dataset.hpp"
#include "cocoscan/pipeline.hpp"

namespace cocoscan {

/// Everything `predict` needs: the axis the model was trained on, the
/// windowed axis its features expect, the label table, the fitted stages and
/// the configuration that produced them.
struct ModelBundle {
  WavelengthAxis training_axis;
  WavelengthAxis model_axis;
  PipelineConfig config;
  std::vector<ClassLabel> labels;
  FittedPipeline pipeline;
};

/// Windows `ds` and fits the pipeline on every sample.
ModelBundle train_bundle(const SpectralDataset& ds, const PipelineConfig& cfg);

/// Single text file with `@section` markers:
/// @cocoscan-model 1, @config, @training-axis, @model-axis, @labels,
/// @features, @classifier, @end.
void save_bundle(std::ostream& out, const ModelBundle& bundle);
std::string save_bundle_text(const ModelBundle& bundle);
ModelBundle load_bundle(std::istream& in);
ModelBundle load_bundle_text(std::string_view text);
ModelBundle load_bundle_file(const std::string& path);

/// Accepts samples on the training axis (windowed here) or already on the
/// model axis. Returns class ids.
std::vector<int> predict(const ModelBundle& bundle, const SampleSet& samples);

}  // namespace cocoscan
