#include "cocoscan/bundle.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cocoscan/config.hpp"
#include "cocoscan/error.hpp"
#include "cocoscan/textio.hpp"

namespace cocoscan {

namespace {

constexpr std::string_view kMagic = "@cocoscan-model 1";

void write_axis(std::ostream& out, const WavelengthAxis& axis) {
  out << axis.size() << '\n';
  textio::write_values(out, axis.values().data(), axis.size());
}

WavelengthAxis read_axis(const std::string& body) {
  std::istringstream in(body);
  textio::TokenReader tr(in);
  const auto n = tr.next_size();
  return WavelengthAxis(tr.next_doubles(n));
}

}  // namespace

ModelBundle train_bundle(const SpectralDataset& ds, const PipelineConfig& cfg) {
  validate(cfg);
  const SpectralDataset windowed = [&] {
    try {
      return apply_window(ds, cfg);
    } catch (const Error& e) {
      rethrow_with_context(e, "window");
    }
  }();
  return ModelBundle{ds.axis(), windowed.axis(), cfg, ds.labels(), fit_pipeline(windowed, cfg)};
}

void save_bundle(std::ostream& out, const ModelBundle& b) {
  out << kMagic << '\n';
  out << "@config\n" << to_config_text(b.config);
  out << "@training-axis\n";
  write_axis(out, b.training_axis);
  out << "@model-axis\n";
  write_axis(out, b.model_axis);
  out << "@labels\n";
  for (const auto& l : b.labels) out << l.id << ' ' << l.name << '\n';
  out << "@features\n";
  if (const auto* pca = std::get_if<PcaModel>(&b.pipeline.features))
    write_model(out, *pca);
  else if (const auto* lda = std::get_if<LdaModel>(&b.pipeline.features))
    write_model(out, *lda);
  else
    out << "original\n";
  out << "@classifier\n";
  std::visit([&](const auto& m) { write_model(out, m); }, b.pipeline.classifier);
  out << "@end\n";
}

std::string save_bundle_text(const ModelBundle& bundle) {
  std::ostringstream ss;
  save_bundle(ss, bundle);
  return ss.str();
}

ModelBundle load_bundle(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || textio::trim(line) != kMagic)
    throw InvalidInput("model file: missing '" + std::string(kMagic) + "' header");
  std::map<std::string, std::string> sections;
  std::string current;
  bool ended = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line.front() == '@') {
      current = line.substr(1);
      if (current == "end") {
        ended = true;
        break;
      }
      if (sections.count(current)) throw InvalidInput("model file: duplicate section @" + current);
      sections[current];
      continue;
    }
    if (current.empty()) throw InvalidInput("model file: content before the first section");
    sections[current] += line;
    sections[current] += '\n';
  }
  if (!ended) throw InvalidInput("model file truncated: missing @end");
  for (const char* name : {"config", "training-axis", "model-axis", "labels", "features", "classifier"})
    if (!sections.count(name)) throw InvalidInput(std::string("model file: missing section @") + name);

  ModelBundle b;
  try {
    apply_config_text(b.config, sections["config"]);
    b.training_axis = read_axis(sections["training-axis"]);
    b.model_axis = read_axis(sections["model-axis"]);

    for (auto l : textio::split(sections["labels"], '\n')) {
      l = textio::trim(l);
      if (l.empty()) continue;
      const auto sp = l.find(' ');
      const auto id = sp == std::string_view::npos ? std::nullopt : textio::parse_int(l.substr(0, sp));
      if (!id || *id != static_cast<long long>(b.labels.size()))
        throw InvalidInput("model file: malformed label line '" + std::string(l) + "'");
      b.labels.push_back({static_cast<int>(*id), std::string(l.substr(sp + 1))});
    }
    if (b.labels.size() < 2) throw InvalidInput("model file: fewer than two labels");

    const auto& feat = sections["features"];
    std::istringstream fin(feat);
    if (textio::trim(feat) == "original") {
      b.pipeline.features = std::monostate{};
    } else if (feat.starts_with("pca")) {
      b.pipeline.features = read_pca_model(fin);
    } else if (feat.starts_with("lda")) {
      b.pipeline.features = read_lda_model(fin);
    } else {
      throw InvalidInput("model file: unknown feature section");
    }

    const auto& clf = sections["classifier"];
    std::istringstream cin(clf);
    if (clf.starts_with("knn"))
      b.pipeline.classifier = read_knn_model(cin);
    else if (clf.starts_with("svm"))
      b.pipeline.classifier = read_svm_model(cin);
    else
      throw InvalidInput("model file: unknown classifier section");
  } catch (const Error& e) {
    rethrow_with_context(e, "model file");
  }

  const std::size_t in_dim = b.model_axis.size();
  const std::size_t feat_in = std::visit(
      [&](const auto& m) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, std::monostate>)
          return in_dim;
        else
          return m.input_dim();
      },
      b.pipeline.features);
  if (feat_in != in_dim)
    throw InvalidInput("model file: feature model expects " + std::to_string(feat_in) +
                       " bands but the model axis has " + std::to_string(in_dim));
  return b;
}

ModelBundle load_bundle_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  return load_bundle(in);
}

ModelBundle load_bundle_file(const std::string& path) {
  const std::string text = textio::read_file(path);
  try {
    return load_bundle_text(text);
  } catch (const Error& e) {
    rethrow_with_context(e, path);
  }
}

std::vector<int> predict(const ModelBundle& b, const SampleSet& samples) {
  if (samples.x.rows() == 0) throw InvalidInput("no samples to classify");
  if (same_axis(samples.axis, b.model_axis)) return b.pipeline.predict(samples.x);
  if (same_axis(samples.axis, b.training_axis)) {
    std::vector<std::size_t> cols;
    if (b.config.window)
      cols = samples.axis.indices_in(b.config.window->lo_nm, b.config.window->hi_nm);
    else
      for (std::size_t j = 0; j < samples.axis.size(); ++j) cols.push_back(j);
    return b.pipeline.predict(samples.x.select_columns(cols));
  }
  throw InvalidInput("axis mismatch: sample has " + std::to_string(samples.axis.size()) +
                     " bands (" + textio::format_double(samples.axis.front()) + "-" +
                     textio::format_double(samples.axis.back()) + " nm); model expects " +
                     std::to_string(b.training_axis.size()) + " training bands or " +
                     std::to_string(b.model_axis.size()) + " windowed bands");
}

}  // namespace cocoscan
