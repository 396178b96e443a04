#include <gtest/gtest.h>

#include <map>

#include "ecx/pipeline.hpp"
#include "expect_error.hpp"
#include "fixtures.hpp"

namespace ecx {
namespace {

TEST(Experiment, SyntheticCampusEndToEnd) {
  const auto data = testing::synthetic_campus(215, 8);
  const auto result = run_experiment(data, {});
  EXPECT_EQ(result.split.train.size() + result.split.holdout.size(), 215u);
  EXPECT_EQ(result.holdout.n(), result.split.holdout.size());
  EXPECT_EQ(result.ranking.k, 5u);
  ASSERT_TRUE(result.boundary.has_value());
  EXPECT_EQ(result.boundary->item_a, result.ranking.entries[4].item_id);
  EXPECT_EQ(result.boundary->item_b, result.ranking.entries[5].item_id);

  const auto& model = result.document.model;
  ASSERT_TRUE(model.index_of("WORKEX_YES").has_value());
  EXPECT_GT(model.coefficient("WORKEX_YES"), 0.0);
  // Groups are retained on their most significant member.
  std::map<std::string, double> group_p;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& group = model.encoder.column(model.feature_names[j]).group;
    const auto [it, fresh] = group_p.emplace(group, model.p_values[j]);
    if (!fresh) it->second = std::min(it->second, model.p_values[j]);
  }
  for (const auto& [group, p] : group_p) EXPECT_LT(p, 0.05) << group;
  ASSERT_TRUE(result.document.training.has_value());
  EXPECT_EQ(result.document.training->holdout_ids.size(), result.holdout.n());
}

TEST(Experiment, DeterministicPerSeed) {
  const auto data = testing::synthetic_campus(215, 8);
  ExperimentConfig config;
  config.seed = 7;
  const auto a = run_experiment(data, config);
  const auto b = run_experiment(data, config);
  EXPECT_EQ(json(a.document).dump(), json(b.document).dump());
  EXPECT_EQ(experiment_report(a, data), experiment_report(b, data));
  config.seed = 8;
  EXPECT_NE(run_experiment(data, config).split.train, a.split.train);
}

TEST(Experiment, ReportSections) {
  const auto data = testing::synthetic_campus(215, 8);
  const auto result = run_experiment(data, {});
  const auto report = experiment_report(result, data);
  EXPECT_NE(report.find("Backward stepwise selection"), std::string::npos);
  EXPECT_NE(report.find("ID,RANK,SCORE"), std::string::npos);
  EXPECT_NE(report.find("suggests that both individuals are qualified"), std::string::npos);
  EXPECT_NE(report.find("(reference level)"), std::string::npos);
}

TEST(Experiment, SubsetByIds) {
  const auto ds = testing::reference_dataset();
  const std::vector<std::string> ids{"00188", "00034"};
  const auto sub = subset_by_ids(ds, ids);
  ASSERT_EQ(sub.n(), 2u);
  EXPECT_EQ(sub.rows[0].id, "00188");
  const std::vector<std::string> unknown{"00001"};
  EXPECT_ECX_ERROR(subset_by_ids(ds, unknown), ErrorCode::UnknownItem);
}

}  // namespace
}  // namespace ecx
