#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "ecx/contrast.hpp"
#include "expect_error.hpp"
#include "fixtures.hpp"

namespace ecx {
namespace {

struct ReferencePair : ::testing::Test {
  FittedModel model = testing::derive_reference_model();
  Dataset pool = testing::reference_dataset();
  RankedList list = rank(model, pool, 5);
  ContrastReport report = contrast_pair(model, list, pool, "00079", "00188", TopZ{2});
};

TEST_F(ReferencePair, BeneficiariesFollowTheRawComparison) {
  EXPECT_EQ(report.find("HSC_P")->beneficiary, Beneficiary::A);
  EXPECT_EQ(report.find("SSC_P")->beneficiary, Beneficiary::A);
  EXPECT_EQ(report.find("DEGREE_P")->beneficiary, Beneficiary::B);
  EXPECT_EQ(report.find("WORKEX_YES")->beneficiary, Beneficiary::B);
  EXPECT_EQ(report.find("HSC_S_SCI")->beneficiary, Beneficiary::Neither);
  EXPECT_EQ(report.find("HSC_S_SCI")->importance, 0.0);
}

TEST_F(ReferencePair, SecondarySchoolGradesWeighAboutHalfOfHighSchool) {
  const double hsc = report.find("HSC_P")->importance;
  const double ssc = report.find("SSC_P")->importance;
  EXPECT_GT(hsc, ssc);
  EXPECT_GT(ssc / hsc, 0.3);
  EXPECT_LT(ssc / hsc, 0.7);
}

TEST_F(ReferencePair, TopTwoPerSide) {
  const std::set<std::string> chosen(report.selected.begin(), report.selected.end());
  EXPECT_EQ(chosen, (std::set<std::string>{"HSC_P", "SSC_P", "WORKEX_YES", "DEGREE_P"}));
}

TEST_F(ReferencePair, TotalDeltaEqualsLinearPredictorGap) {
  const double gap = linear_predictor(model, pool.row("00079").values) - linear_predictor(model, pool.row("00188").values);
  EXPECT_NEAR(report.total_delta, gap, 1e-12);
  EXPECT_NEAR(report.total_delta, logit(0.99418) - logit(0.9872), 5e-3);
}

TEST_F(ReferencePair, ReorientsByModelOrder) {
  const auto flipped = contrast_pair(model, list, pool, "00188", "00079", TopZ{2});
  EXPECT_EQ(flipped.item_a, "00079");
  EXPECT_EQ(flipped.item_b, "00188");
  EXPECT_EQ(flipped.selected, report.selected);
  // A human swap does not change which item the model favours.
  const auto swapped = apply_swap(list, "00079", "00188");
  EXPECT_EQ(contrast_pair(model, swapped, pool, "00188", "00079", TopZ{2}).item_a, "00079");
  EXPECT_ECX_ERROR(contrast_pair(model, list, pool, "00079", "12345", TopZ{2}), ErrorCode::UnknownItem);
}

TEST_F(ReferencePair, IdenticalItemsAreIndistinguishable) {
  const auto same = contrast_pair(model, list, pool, "00079", "00079", TopZ{2});
  EXPECT_TRUE(same.indistinguishable);
  EXPECT_TRUE(same.selected.empty());
  EXPECT_EQ(same.total_delta, 0.0);
  for (const auto& c : same.contributions) EXPECT_EQ(c.share, 0.0);
}

TEST(Decompose, HandComputedExample) {
  Rng rng(0);
  auto m = testing::random_numeric_model(2, rng);
  m.coefficients = {1.0, -2.0};
  const Row a{"a", {{"F00", "1"}, {"F01", "0"}}, std::nullopt};
  const Row b{"b", {{"F00", "0"}, {"F01", "1"}}, std::nullopt};
  const auto r = decompose(m, a, b);
  ASSERT_EQ(r.contributions.size(), 2u);
  EXPECT_EQ(r.contributions[0].feature, "F01");
  EXPECT_DOUBLE_EQ(r.contributions[0].delta, 2.0);
  EXPECT_DOUBLE_EQ(r.contributions[1].delta, 1.0);
  EXPECT_DOUBLE_EQ(r.total_delta, 3.0);
  EXPECT_EQ(r.contributions[0].beneficiary, Beneficiary::A);
}

TEST(Decompose, CompletenessOnRandomPairs) {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const auto model = testing::random_numeric_model(1 + uniform_index(rng, 8), rng);
    const auto pool = testing::random_numeric_pool(model, 2, rng);
    const auto r = decompose(model, pool.rows[0], pool.rows[1]);
    double sum = 0.0;
    for (const auto& c : r.contributions) sum += c.delta;
    const double gap = linear_predictor(model, pool.rows[0].values) - linear_predictor(model, pool.rows[1].values);
    EXPECT_NEAR(sum, gap, 1e-9);
    EXPECT_NEAR(r.total_delta, gap, 1e-9);
  }
}

TEST(Decompose, SortedByImportanceThenName) {
  const auto r = testing::report_from_deltas({1.0, -3.0, 1.0, 0.0, 2.0});
  std::vector<std::string> order;
  for (const auto& c : r.contributions) order.push_back(c.feature);
  EXPECT_EQ(order, (std::vector<std::string>{"F01", "F04", "F00", "F02", "F03"}));
}

TEST(Shares, ProportionalToImportance) {
  const auto r = testing::report_from_deltas({2.0, -1.0, 1.0});
  EXPECT_DOUBLE_EQ(r.find("F00")->share, 50.0);
  EXPECT_DOUBLE_EQ(r.find("F01")->share, 25.0);
  EXPECT_DOUBLE_EQ(r.find("F02")->share, 25.0);
}

TEST(Select, CumulativeSmallestPrefix) {
  const auto r = select(testing::report_from_deltas({5, 3, 1, 1}), CumulativeImportance{0.5});
  EXPECT_EQ(r.selected, (std::vector<std::string>{"F00"}));
  const auto all = select(testing::report_from_deltas({5, -3, 1, 0}), CumulativeImportance{1.0});
  EXPECT_EQ(all.selected, (std::vector<std::string>{"F00", "F01", "F02"}));
}

TEST(Select, CumulativeMatchesBruteForce) {
  Rng rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> deltas(1 + uniform_index(rng, 12));
    for (auto& d : deltas) d = uniform_index(rng, 4) == 0 ? 0.0 : std::round(uniform_real(rng, -5, 5) * 2) / 2;
    const double tau = uniform_index(rng, 5) == 0 ? 1.0 : uniform_real(rng, 0.01, 1.0);
    const auto base = testing::report_from_deltas(deltas);
    EXPECT_EQ(select(base, CumulativeImportance{tau}).selected, testing::cumulative_prefix_oracle(base, tau));
  }
}

TEST(Select, TopZIsMonotoneAndMixedGuaranteesProsPerSide) {
  Rng rng(43);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> deltas(1 + uniform_index(rng, 12));
    for (auto& d : deltas) d = uniform_real(rng, -4, 4);
    const auto base = testing::report_from_deltas(deltas);
    std::set<std::string> previous;
    for (std::size_t z = 1; z <= 6; ++z) {
      const auto sel = select(base, TopZ{z}).selected;
      const std::set<std::string> now(sel.begin(), sel.end());
      EXPECT_TRUE(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
      previous = now;
    }
    const std::size_t m = uniform_index(rng, 4);
    const auto mixed = select(base, Mixed{uniform_real(rng, 0.05, 1.0), m});
    for (const auto side : {Beneficiary::A, Beneficiary::B}) {
      std::size_t available = 0, chosen = 0;
      for (const auto& c : mixed.contributions) {
        if (c.beneficiary != side) continue;
        ++available;
        chosen += mixed.is_selected(c.feature) ? 1 : 0;
      }
      EXPECT_GE(chosen, std::min(available, m));
    }
  }
}

TEST(Policy, ParseAndFormatRoundTrip) {
  for (const char* text : {"topz:2", "cum:0.8", "mixed:0.75,1", "cum:1"}) {
    EXPECT_EQ(format_policy(parse_policy(text)), text);
  }
  EXPECT_EQ(std::get<TopZ>(parse_policy("topz:3")).z, 3u);
  const auto m = std::get<Mixed>(parse_policy("mixed:0.5,2"));
  EXPECT_DOUBLE_EQ(m.tau, 0.5);
  EXPECT_EQ(m.min_pros_per_item, 2u);
  for (const char* bad : {"", "topz", "topz:0", "topz:-1", "topz:x", "cum:0", "cum:1.5", "mixed:0.5", "best:1"}) {
    EXPECT_ECX_ERROR(parse_policy(bad), ErrorCode::InvalidPolicy);
  }
}

}  // namespace
}  // namespace ecx
