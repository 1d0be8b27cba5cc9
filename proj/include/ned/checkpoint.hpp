#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ned/errors.hpp"
#include "ned/models.hpp"

namespace ned {

inline constexpr const char* kCheckpointFormat = "ned-checkpoint";
inline constexpr int kCheckpointVersion = 1;

inline std::string_view aggregation_tag(GcnAggregation a) {
  return a == GcnAggregation::Outgoing ? "outgoing" : "incoming";
}

inline nlohmann::json config_to_json(const ModelConfig& c) {
  nlohmann::json j{{"arch", arch_tag(c.arch)},
                   {"embedding_dim", c.embedding_dim},
                   {"text_projection", c.text_projection},
                   {"text_memory", c.text_memory},
                   {"text_dim", c.text_dim},
                   {"hidden", c.hidden},
                   {"graph_dim", c.graph_dim},
                   {"graph_projection", c.graph_projection},
                   {"graph_memory", c.graph_memory},
                   {"attention_dim", c.attention_dim},
                   {"gcn_dim", c.gcn_dim},
                   {"gcn_layers", c.gcn_layers},
                   {"triplet_width", c.triplet_width},
                   {"keep_prob", c.keep_prob},
                   {"aggregation", aggregation_tag(c.aggregation)}};
  j["distance_threshold"] = c.distance_threshold ? nlohmann::json(*c.distance_threshold) : nlohmann::json(nullptr);
  return j;
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  const auto tag = j.at("arch").get<std::string>();
  const auto arch = parse_arch(tag);
  if (!arch) throw FormatError("unknown architecture '" + tag + "' in config");
  c.arch = *arch;
  auto read = [&](const char* key, std::size_t& field) { field = j.value(key, field); };
  read("embedding_dim", c.embedding_dim);
  read("text_projection", c.text_projection);
  read("text_memory", c.text_memory);
  read("text_dim", c.text_dim);
  read("hidden", c.hidden);
  read("graph_dim", c.graph_dim);
  read("graph_projection", c.graph_projection);
  read("graph_memory", c.graph_memory);
  read("attention_dim", c.attention_dim);
  read("gcn_dim", c.gcn_dim);
  read("gcn_layers", c.gcn_layers);
  read("triplet_width", c.triplet_width);
  c.keep_prob = j.value("keep_prob", c.keep_prob);
  const auto agg = j.value("aggregation", std::string("outgoing"));
  if (agg == "outgoing")
    c.aggregation = GcnAggregation::Outgoing;
  else if (agg == "incoming")
    c.aggregation = GcnAggregation::Incoming;
  else
    throw FormatError("unknown aggregation '" + agg + "'");
  if (j.contains("distance_threshold") && !j["distance_threshold"].is_null())
    c.distance_threshold = j["distance_threshold"].get<double>();
  return c;
}

inline nlohmann::json checkpoint_to_json(const Model& model) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, t] : model.params().entries()) {
    std::vector<double> values(t.values().begin(), t.values().end());
    params[name] = {{"shape", t.shape()}, {"values", std::move(values)}};
  }
  return {{"format", kCheckpointFormat},
          {"version", kCheckpointVersion},
          {"config", config_to_json(model.config())},
          {"params", std::move(params)}};
}

inline Model checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != kCheckpointFormat) throw FormatError("not a checkpoint");
    if (j.value("version", 0) != kCheckpointVersion)
      throw FormatError("unsupported checkpoint version " + j.value("version", nlohmann::json()).dump());
    Model model(config_from_json(j.at("config")));
    const auto& params = j.at("params");
    if (params.size() != model.params().size())
      throw FormatError("checkpoint holds " + std::to_string(params.size()) + " tensors, model expects " +
                        std::to_string(model.params().size()));
    for (auto& [name, t] : model.params().entries()) {
      if (!params.contains(name)) throw FormatError("checkpoint is missing tensor '" + name + "'");
      const auto& entry = params.at(name);
      if (entry.at("shape").get<Shape>() != t.shape())
        throw FormatError("tensor '" + name + "' has shape " + shape_str(entry.at("shape").get<Shape>()) +
                          ", expected " + shape_str(t.shape()));
      const auto values = entry.at("values").get<std::vector<double>>();
      if (values.size() != t.numel()) throw FormatError("tensor '" + name + "' has the wrong value count");
      std::copy(values.begin(), values.end(), t.mutable_values().begin());
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
}

inline void save_checkpoint(const Model& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  out << checkpoint_to_json(model).dump() << '\n';
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

inline Model load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("checkpoint '" + path + "': " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace ned
