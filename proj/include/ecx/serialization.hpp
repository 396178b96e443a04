#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecx/contrast.hpp"
#include "ecx/dataset.hpp"
#include "ecx/glm.hpp"
#include "ecx/narrate.hpp"
#include "ecx/ranking.hpp"

namespace ecx {

using json = nlohmann::json;

// How a persisted model was trained; absent for hand-built fixtures.
struct TrainingInfo {
  std::uint64_t seed = 0;
  double train_fraction = 0.65;
  double alpha_level = 0.05;
  std::vector<std::string> train_ids;
  std::vector<std::string> holdout_ids;
};

struct ModelDocument {
  FittedModel model;
  std::optional<SelectionTrace> trace;
  std::optional<TrainingInfo> training;
};

void to_json(json& j, const FeatureSchema& schema);
void from_json(const json& j, FeatureSchema& schema);
void to_json(json& j, const FittedModel& model);
void from_json(const json& j, FittedModel& model);
void to_json(json& j, const SelectionTrace& trace);
void from_json(const json& j, SelectionTrace& trace);
void to_json(json& j, const TrainingInfo& info);
void from_json(const json& j, TrainingInfo& info);
void to_json(json& j, const ModelDocument& doc);
void from_json(const json& j, ModelDocument& doc);

void to_json(json& j, const RankedList& list);
void from_json(const json& j, RankedList& list);

void to_json(json& j, const ContrastReport& report);
void to_json(json& j, const ExplanationText& text);
void to_json(json& j, const ChartData& chart);

void to_json(json& j, const Row& row);
void from_json(const json& j, Row& row);

void to_json(json& j, const LabelTable& labels);
void from_json(const json& j, LabelTable& labels);

// Throws Io / Parse.
ModelDocument load_model(const std::filesystem::path& path);
void save_model(const std::filesystem::path& path, const ModelDocument& doc);

json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ecx
