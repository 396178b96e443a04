#include "ecx/serialization.hpp"

#include <fstream>
#include <sstream>

#include "ecx/error.hpp"

namespace ecx {
namespace {

FeatureKind kind_from(const std::string& s) {
  if (s == "numeric") return FeatureKind::Numeric;
  if (s == "categorical") return FeatureKind::Categorical;
  if (s == "binary") return FeatureKind::Binary;
  throw Error(ErrorCode::Parse, "unknown feature kind '" + s + "'");
}

std::string_view encoded_kind_name(EncodedKind k) {
  switch (k) {
    case EncodedKind::Numeric: return "numeric";
    case EncodedKind::Binary: return "binary";
    case EncodedKind::Dummy: return "dummy";
  }
  return "numeric";
}

std::string_view marker_name(Beneficiary b) { return b == Beneficiary::Neither ? "None" : to_string(b); }

}  // namespace

void to_json(json& j, const FeatureSchema& schema) {
  json columns = json::array();
  for (const auto& c : schema.columns) {
    json col{{"name", c.name}, {"kind", std::string(to_string(c.kind))}};
    if (c.kind == FeatureKind::Categorical) {
      col["levels"] = c.levels;
      col["codes"] = c.codes;
    }
    columns.push_back(std::move(col));
  }
  j = json{{"id_column", schema.id_column},
           {"id_width", schema.id_width},
           {"target", schema.target},
           {"positive_label", schema.positive_label},
           {"negative_label", schema.negative_label},
           {"ignored", schema.ignored},
           {"columns", std::move(columns)}};
}

void from_json(const json& j, FeatureSchema& schema) {
  schema = {};
  schema.id_column = j.at("id_column").get<std::string>();
  schema.id_width = j.value("id_width", std::size_t{0});
  schema.target = j.value("target", std::string{});
  schema.positive_label = j.value("positive_label", std::string{"1"});
  schema.negative_label = j.value("negative_label", std::string{"0"});
  schema.ignored = j.value("ignored", std::vector<std::string>{});
  for (const auto& col : j.at("columns")) {
    ColumnSpec spec;
    spec.name = col.at("name").get<std::string>();
    spec.kind = kind_from(col.at("kind").get<std::string>());
    if (spec.kind == FeatureKind::Categorical) {
      spec.levels = col.at("levels").get<std::vector<std::string>>();
      spec.codes = col.at("codes").get<std::vector<std::string>>();
    }
    schema.columns.push_back(std::move(spec));
  }
  schema.validate();
}

void to_json(json& j, const FittedModel& model) {
  json scaler = json::object();
  for (const auto& [name, params] : model.encoder.scaler()) {
    scaler[name] = {{"mean", params.mean}, {"stddev", params.stddev}};
  }
  j = json{{"feature_names", model.feature_names},
           {"coefficients", model.coefficients},
           {"std_errors", model.std_errors},
           {"p_values", model.p_values},
           {"intercept", model.intercept},
           {"intercept_std_error", model.intercept_std_error},
           {"log_likelihood", model.log_likelihood},
           {"converged", model.converged},
           {"iterations", model.iterations},
           {"reference_features", model.reference_features},
           {"schema", model.encoder.schema()},
           {"scaler", std::move(scaler)}};
}

void from_json(const json& j, FittedModel& model) {
  model = {};
  model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  model.coefficients = j.at("coefficients").get<std::vector<double>>();
  model.std_errors = j.value("std_errors", std::vector<double>(model.feature_names.size(), 0.0));
  model.p_values = j.value("p_values", std::vector<double>(model.feature_names.size(), 0.0));
  model.intercept = j.at("intercept").get<double>();
  model.intercept_std_error = j.value("intercept_std_error", 0.0);
  model.log_likelihood = j.value("log_likelihood", 0.0);
  model.converged = j.value("converged", true);
  model.iterations = j.value("iterations", 0);
  model.reference_features = j.value("reference_features", std::vector<std::string>{});
  std::map<std::string, ScalerParams, std::less<>> scaler;
  for (const auto& [name, params] : j.at("scaler").items()) {
    scaler.emplace(name, ScalerParams{params.at("mean").get<double>(), params.at("stddev").get<double>()});
  }
  model.encoder = Encoder(j.at("schema").get<FeatureSchema>(), std::move(scaler));

  const auto n = model.feature_names.size();
  if (model.coefficients.size() != n || model.std_errors.size() != n || model.p_values.size() != n) {
    throw Error(ErrorCode::Parse, "model arrays have mismatched lengths");
  }
  for (const auto& f : model.feature_names) (void)model.encoder.column(f);
}

void to_json(json& j, const SelectionTrace& trace) {
  json steps = json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"removed", s.removed},
                     {"removed_features", s.removed_features},
                     {"p_value", s.p_value},
                     {"features_after", s.features_after},
                     {"log_likelihood_after", s.log_likelihood_after}});
  }
  j = json{{"alpha_level", trace.alpha_level}, {"steps", std::move(steps)}};
}

void from_json(const json& j, SelectionTrace& trace) {
  trace = {};
  trace.alpha_level = j.at("alpha_level").get<double>();
  for (const auto& s : j.at("steps")) {
    trace.steps.push_back({s.at("removed").get<std::string>(),
                           s.at("removed_features").get<std::vector<std::string>>(),
                           s.at("p_value").get<double>(),
                           s.at("features_after").get<std::vector<std::string>>(),
                           s.at("log_likelihood_after").get<double>()});
  }
}

void to_json(json& j, const TrainingInfo& info) {
  j = json{{"seed", info.seed},
           {"train_fraction", info.train_fraction},
           {"alpha_level", info.alpha_level},
           {"train_ids", info.train_ids},
           {"holdout_ids", info.holdout_ids}};
}

void from_json(const json& j, TrainingInfo& info) {
  info.seed = j.at("seed").get<std::uint64_t>();
  info.train_fraction = j.at("train_fraction").get<double>();
  info.alpha_level = j.at("alpha_level").get<double>();
  info.train_ids = j.at("train_ids").get<std::vector<std::string>>();
  info.holdout_ids = j.at("holdout_ids").get<std::vector<std::string>>();
}

void to_json(json& j, const ModelDocument& doc) {
  j = json{{"format", "ecx-model/1"}, {"model", doc.model}};
  if (doc.trace) j["selection_trace"] = *doc.trace;
  if (doc.training) j["training"] = *doc.training;
}

void from_json(const json& j, ModelDocument& doc) {
  doc = {};
  doc.model = j.at("model").get<FittedModel>();
  if (j.contains("selection_trace")) doc.trace = j.at("selection_trace").get<SelectionTrace>();
  if (j.contains("training")) doc.training = j.at("training").get<TrainingInfo>();
}

void to_json(json& j, const RankedList& list) {
  json entries = json::array();
  for (const auto& e : list.entries) {
    entries.push_back({{"rank", e.rank},
                       {"item_id", e.item_id},
                       {"score", e.score},
                       {"linear_predictor", e.linear_predictor},
                       {"top_k", e.rank <= list.k}});
  }
  j = json{{"k", list.k}, {"n", list.entries.size()}, {"overridden", list.overridden},
           {"entries", std::move(entries)}, {"model_order", list.model_order}};
}

void from_json(const json& j, RankedList& list) {
  list = {};
  list.k = j.at("k").get<std::size_t>();
  list.overridden = j.at("overridden").get<bool>();
  list.model_order = j.at("model_order").get<std::vector<std::string>>();
  for (const auto& e : j.at("entries")) {
    list.entries.push_back({e.at("rank").get<std::size_t>(), e.at("item_id").get<std::string>(),
                            e.at("score").get<double>(), e.at("linear_predictor").get<double>()});
  }
}

void to_json(json& j, const ContrastReport& report) {
  json contributions = json::array();
  for (const auto& c : report.contributions) {
    contributions.push_back({{"feature", c.feature},
                             {"kind", std::string(encoded_kind_name(c.kind))},
                             {"raw_a", c.raw_a},
                             {"raw_b", c.raw_b},
                             {"coefficient", c.coefficient},
                             {"delta", c.delta},
                             {"importance", c.importance},
                             {"beneficiary", std::string(to_string(c.beneficiary))},
                             {"share", c.share},
                             {"selected", report.is_selected(c.feature)}});
  }
  j = json{{"item_a", report.item_a},
           {"item_b", report.item_b},
           {"total_delta", report.total_delta},
           {"contributions", std::move(contributions)},
           {"selected", report.selected},
           {"indistinguishable", report.indistinguishable}};
  j["policy"] = report.policy ? json(format_policy(*report.policy)) : json(nullptr);
}

void to_json(json& j, const ExplanationText& text) {
  j = json{{"paragraphs", text.paragraphs}, {"text", text.str()}};
  if (!text.warnings.empty()) j["missing_labels"] = text.warnings;
}

void to_json(json& j, const ChartData& chart) {
  json radar = json::array();
  for (const auto& r : chart.radar) {
    radar.push_back({{"feature", r.feature},
                     {"display_a", r.display_a},
                     {"display_b", r.display_b},
                     {"advantage_marker", std::string(marker_name(r.marker))}});
  }
  json bars = json::array();
  for (const auto& b : chart.bars) {
    bars.push_back({{"feature", b.feature},
                    {"signed_share", b.signed_share},
                    {"direction", std::string(to_string(b.direction))},
                    {"selected", b.selected}});
  }
  j = json{{"item_a", chart.item_a},
           {"item_b", chart.item_b},
           {"indistinguishable", chart.indistinguishable},
           {"radar", std::move(radar)},
           {"bars", std::move(bars)}};
}

void to_json(json& j, const Row& row) {
  j = json{{"id", row.id}, {"values", row.values}};
  j["label"] = row.label ? json(*row.label) : json(nullptr);
}

void from_json(const json& j, Row& row) {
  row = {};
  row.id = j.at("id").get<std::string>();
  for (const auto& [k, v] : j.at("values").items()) row.values.emplace(k, v.get<std::string>());
  if (j.contains("label") && !j.at("label").is_null()) row.label = j.at("label").get<int>();
}

void to_json(json& j, const LabelTable& labels) {
  j = json::object();
  for (const auto& [feature, label] : labels.entries()) {
    j[feature] = {{"name", label.name}, {"present", label.present}, {"absent", label.absent}};
  }
}

void from_json(const json& j, LabelTable& labels) {
  for (const auto& [feature, label] : j.items()) {
    labels.set(feature, {label.value("name", feature), label.value("present", std::string{}),
                         label.value("absent", std::string{})});
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

ModelDocument load_model(const std::filesystem::path& path) {
  try {
    return read_json_file(path).get<ModelDocument>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
}

void save_model(const std::filesystem::path& path, const ModelDocument& doc) {
  write_text_file(path, json(doc).dump(2) + "\n");
}

}  // namespace ecx
