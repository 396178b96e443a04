#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "ecx/ranking.hpp"
#include "expect_error.hpp"
#include "fixtures.hpp"

namespace ecx {
namespace {

std::vector<std::string> ids_of(const RankedList& list) {
  std::vector<std::string> out;
  for (const auto& e : list.entries) out.push_back(e.item_id);
  return out;
}

TEST(Rank, ReferencePoolOrder) {
  const auto list = rank(testing::derive_reference_model(), testing::reference_dataset(), 5);
  std::vector<std::string> expected;
  for (const auto& [id, s] : testing::reference_scores()) expected.push_back(id);
  EXPECT_EQ(ids_of(list), expected);
  std::vector<std::string> top;
  for (const auto& e : top_k(list)) top.push_back(e.item_id);
  EXPECT_EQ(top, (std::vector<std::string>{"00034", "00029", "00139", "00097", "00079"}));
  EXPECT_EQ(list.entries[4].item_id, "00079");
  EXPECT_EQ(list.entries[5].item_id, "00188");
  EXPECT_FALSE(list.overridden);
  EXPECT_EQ(list.model_order, expected);
}

TEST(Rank, KBounds) {
  const auto model = testing::derive_reference_model();
  const auto pool = testing::reference_dataset();
  EXPECT_ECX_ERROR(rank(model, pool, 0), ErrorCode::InvalidK);
  EXPECT_ECX_ERROR(rank(model, pool, 11), ErrorCode::InvalidK);
  EXPECT_EQ(top_k(rank(model, pool, 10)).size(), 10u);
}

TEST(Rank, TiesBreakByIdAscending) {
  Rng rng(1);
  auto model = testing::random_numeric_model(1, rng);
  model.coefficients[0] = 0.0;
  const auto pool = testing::random_numeric_pool(model, 6, rng);
  const auto list = rank(model, pool, 3);
  EXPECT_EQ(ids_of(list), (std::vector<std::string>{"00001", "00002", "00003", "00004", "00005", "00006"}));
}

TEST(Swap, ExchangesBoundaryPair) {
  const auto list = rank(testing::derive_reference_model(), testing::reference_dataset(), 5);
  const auto swapped = apply_swap(list, "00079", "00188");
  EXPECT_EQ(swapped.position("00188"), 5u);
  EXPECT_EQ(swapped.position("00079"), 6u);
  EXPECT_EQ(swapped.entries[4].rank, 5u);
  EXPECT_DOUBLE_EQ(swapped.entries[4].score, list.entries[5].score);
  EXPECT_TRUE(swapped.overridden);
  EXPECT_EQ(swapped.model_order, list.model_order);
  EXPECT_EQ(swapped.model_position("00079"), 5u);
  EXPECT_ECX_ERROR(apply_swap(list, "00079", "99999"), ErrorCode::UnknownItem);
  EXPECT_EQ(apply_swap(list, "00079", "00079"), list);
}

TEST(Swap, InvolutionProperty) {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto model = testing::random_numeric_model(1 + uniform_index(rng, 4), rng);
    const auto pool = testing::random_numeric_pool(model, 2 + uniform_index(rng, 20), rng);
    const auto list = rank(model, pool, 1);
    const auto& a = list.entries[uniform_index(rng, list.size())].item_id;
    const auto& b = list.entries[uniform_index(rng, list.size())].item_id;
    const auto twice = apply_swap(apply_swap(list, a, b), a, b);
    EXPECT_EQ(ids_of(twice), ids_of(list));
    for (std::size_t i = 0; i < twice.size(); ++i) EXPECT_EQ(twice.entries[i], list.entries[i]);
  }
}

TEST(Rank, ScoreOrderEqualsLinearPredictorOrder) {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto model = testing::random_numeric_model(1 + uniform_index(rng, 5), rng);
    const auto pool = testing::random_numeric_pool(model, 2 + uniform_index(rng, 30), rng);
    const auto list = rank(model, pool, 1);
    for (std::size_t i = 1; i < list.size(); ++i) {
      const auto& prev = list.entries[i - 1];
      const auto& cur = list.entries[i];
      EXPECT_GE(prev.score, cur.score);
      EXPECT_GE(prev.linear_predictor, cur.linear_predictor);
      if (prev.linear_predictor == cur.linear_predictor) EXPECT_LT(prev.item_id, cur.item_id);
      EXPECT_EQ(cur.rank, i + 1);
    }
  }
}

TEST(Format, ScoresDropTrailingZeros) {
  EXPECT_EQ(format_score(0.98720), "0.9872");
  EXPECT_EQ(format_score(0.999334), "0.99933");
  EXPECT_EQ(format_score(0.5), "0.5");
  EXPECT_EQ(format_score(1.0), "1.0");
}

TEST(Format, RankingCsvLayout) {
  const auto model = testing::derive_reference_model();
  const auto pool = testing::reference_dataset();
  const auto csv = ranking_csv(rank(model, pool, 5), model, pool);
  const auto first_line = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(first_line, "ID,RANK,SCORE,DEGREE_P,HSC_P,HSC_S_COM,HSC_S_SCI,SSC_P,WORKEX_YES");
  EXPECT_NE(csv.find("00079,5,0.99418,64.5,90.9,0,1,84.0,0\n"), std::string::npos);
  EXPECT_NE(csv.find("00188,6,0.9872,67.0,65.5,0,1,78.5,1\n"), std::string::npos);
}

}  // namespace
}  // namespace ecx
