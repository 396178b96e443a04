#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "ecx/serialization.hpp"
#include "expect_error.hpp"
#include "fixtures.hpp"

namespace ecx {
namespace {

TEST(ModelJson, RoundTripPreservesScoring) {
  const ModelDocument doc{testing::derive_reference_model(), SelectionTrace{0.05, {{"GENDER", {"GENDER_M"}, 0.4, {"X"}, -1.5}}},
                          TrainingInfo{42, 0.65, 0.05, {"00001"}, {"00002"}}};
  const auto back = json(doc).get<ModelDocument>();
  EXPECT_EQ(back.model.feature_names, doc.model.feature_names);
  EXPECT_EQ(back.model.coefficients, doc.model.coefficients);
  EXPECT_EQ(back.model.reference_features, doc.model.reference_features);
  ASSERT_TRUE(back.trace && back.training);
  EXPECT_EQ(back.trace->steps[0].removed_features, (std::vector<std::string>{"GENDER_M"}));
  EXPECT_EQ(back.training->holdout_ids, (std::vector<std::string>{"00002"}));
  const auto pool = testing::reference_dataset();
  for (const auto& row : pool.rows) {
    EXPECT_EQ(linear_predictor(back.model, row.values), linear_predictor(doc.model, row.values));
  }
}

TEST(ModelJson, CheckedInReferenceModelMatchesDerivation) {
  const auto stored = load_model(testing::data_path("reference_pool_model.json")).model;
  const auto derived = testing::derive_reference_model();
  ASSERT_EQ(stored.feature_names, derived.feature_names);
  for (std::size_t j = 0; j < stored.size(); ++j) EXPECT_NEAR(stored.coefficients[j], derived.coefficients[j], 1e-12);
  EXPECT_NEAR(stored.intercept, derived.intercept, 1e-12);
}

TEST(ModelJson, DerivationResidualsAreSmall) {
  const auto fit = testing::reference_least_squares();
  EXPECT_LT(fit.max_abs_residual, 5e-3);
  EXPECT_GT(fit.slopes.at("WORKEX_YES"), 0.0);
  EXPECT_GT(fit.slopes.at("HSC_P"), 0.0);
  EXPECT_GT(fit.slopes.at("SSC_P"), 0.0);
  EXPECT_GT(fit.slopes.at("DEGREE_P"), 0.0);
}

TEST(ModelJson, MalformedDocumentsAreParseErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "ecx_ser_test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "bad.json", "{\"model\": {\"feature_names\": []}}");
  EXPECT_ECX_ERROR(load_model(dir / "bad.json"), ErrorCode::Parse);
  write_text_file(dir / "garbage.json", "{not json");
  EXPECT_ECX_ERROR(load_model(dir / "garbage.json"), ErrorCode::Parse);
  EXPECT_ECX_ERROR(load_model(dir / "missing.json"), ErrorCode::Io);
  std::filesystem::remove_all(dir);
}

TEST(RankedListJson, RoundTripAndTopKFlag) {
  const auto model = testing::derive_reference_model();
  const auto list = apply_swap(rank(model, testing::reference_dataset(), 5), "00079", "00188");
  const json j = list;
  EXPECT_TRUE(j["entries"][4]["top_k"].get<bool>());
  EXPECT_FALSE(j["entries"][5]["top_k"].get<bool>());
  EXPECT_EQ(j["entries"][4]["item_id"], "00188");
  EXPECT_EQ(j.get<RankedList>(), list);
}

TEST(ReportJson, CarriesSelectionAndPolicy) {
  const auto model = testing::derive_reference_model();
  const auto pool = testing::reference_dataset();
  const auto report = contrast_pair(model, rank(model, pool, 5), pool, "00079", "00188", TopZ{2});
  const json j = report;
  EXPECT_EQ(j["policy"], "topz:2");
  EXPECT_EQ(j["contributions"].size(), model.size());
  EXPECT_EQ(j["contributions"][0]["feature"], "HSC_P");
  EXPECT_TRUE(j["contributions"][0]["selected"].get<bool>());
  const json chart = render_chart_data(report);
  for (const auto& axis : chart["radar"]) {
    if (axis["feature"] == "HSC_S_SCI") EXPECT_EQ(axis["advantage_marker"], "None");
    if (axis["feature"] == "HSC_P") EXPECT_EQ(axis["advantage_marker"], "A");
  }
}

TEST(LabelJson, RoundTrip) {
  const auto labels = LabelTable::campus();
  const auto back = json(labels).get<LabelTable>();
  ASSERT_NE(back.find("WORKEX_YES"), nullptr);
  EXPECT_EQ(back.find("WORKEX_YES")->present, "having previous working experience");
  EXPECT_EQ(back.entries().size(), labels.entries().size());
}

}  // namespace
}  // namespace ecx
