#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ecx/dataset.hpp"
#include "ecx/glm.hpp"

namespace ecx {

struct RankedEntry {
  std::size_t rank = 0;  // 1-based
  std::string item_id;
  double score = 0.0;
  double linear_predictor = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

// A total order over a candidate pool. `model_order` always holds the ids in
// the order the model produced; `overridden` is set while `entries` diverges
// from it.
struct RankedList {
  std::vector<RankedEntry> entries;
  std::size_t k = 1;
  bool overridden = false;
  std::vector<std::string> model_order;

  std::size_t size() const noexcept { return entries.size(); }
  // 1-based position in the current order; throws UnknownItem.
  std::size_t position(std::string_view item_id) const;
  // 1-based position in the model order; throws UnknownItem.
  std::size_t model_position(std::string_view item_id) const;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

// Sorted by score descending. The comparison runs on the linear predictor,
// which orders identically where sigmoid resolves the difference and stays
// strict where it saturates; exact ties fall back to item id ascending.
// Throws InvalidK unless 1 <= k <= pool size.
RankedList rank(const FittedModel& model, const Dataset& pool, std::size_t k);

std::vector<RankedEntry> top_k(const RankedList& list);

// Exchanges the positions of two items; scores travel with their items.
// Throws UnknownItem.
RankedList apply_swap(const RankedList& list, std::string_view a, std::string_view b);

// ID,RANK,SCORE followed by the raw values of the model's features in
// alphabetical order. Scores are rounded to five decimals, trailing zeros
// dropped (0.98720 -> 0.9872).
std::string ranking_csv(const RankedList& list, const FittedModel& model, const Dataset& pool);

std::string format_score(double score);

}  // namespace ecx
