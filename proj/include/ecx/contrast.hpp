#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ecx/dataset.hpp"
#include "ecx/glm.hpp"
#include "ecx/ranking.hpp"

namespace ecx {

enum class Beneficiary { A, B, Neither };

std::string_view to_string(Beneficiary b) noexcept;

// One feature's share of the score gap between item A and item B.
struct FeatureContribution {
  std::string feature;
  EncodedKind kind = EncodedKind::Numeric;
  double raw_a = 0.0;  // display values (unscaled numeric, 0/1 indicators)
  double raw_b = 0.0;
  double coefficient = 0.0;
  double delta = 0.0;       // coefficient * (x_a - x_b) on the encoded scale
  double importance = 0.0;  // |delta|
  Beneficiary beneficiary = Beneficiary::Neither;
  double share = 0.0;  // percent of the summed importance
};

struct TopZ {
  std::size_t z = 1;
};

struct CumulativeImportance {
  double tau = 1.0;
};

struct Mixed {
  double tau = 1.0;
  std::size_t min_pros_per_item = 0;
};

using SelectionPolicy = std::variant<TopZ, CumulativeImportance, Mixed>;

// "topz:2", "cum:0.8", "mixed:0.8,1". Throws InvalidPolicy.
SelectionPolicy parse_policy(std::string_view text);
std::string format_policy(const SelectionPolicy& policy);

struct ContrastReport {
  std::string item_a;  // higher-ranked by the model
  std::string item_b;
  double total_delta = 0.0;
  // Sorted by importance descending, ties by feature name ascending.
  std::vector<FeatureContribution> contributions;
  // Feature names chosen for display, in contribution order.
  std::vector<std::string> selected;
  std::optional<SelectionPolicy> policy;
  // Every contribution is zero: the model cannot tell the items apart.
  bool indistinguishable = false;

  const FeatureContribution* find(std::string_view feature) const;
  bool is_selected(std::string_view feature) const;
};

// One contribution per model feature; the caller orients the pair so that `a`
// is the higher-scored item. Importances and shares are filled, selection is
// left empty.
ContrastReport decompose(const FittedModel& model, const Row& a, const Row& b);

ContrastReport select(ContrastReport report, const SelectionPolicy& policy);

// share = 100 * importance / sum(importance); all zero when nothing differs.
ContrastReport contribution_shares(ContrastReport report);

// Orients the pair by model order, then decompose + shares + select.
// Throws UnknownItem when either id is missing from the ranking or the pool.
ContrastReport contrast_pair(const FittedModel& model, const RankedList& ranking, const Dataset& pool,
                             std::string_view id_a, std::string_view id_b, const SelectionPolicy& policy);

}  // namespace ecx
