#include "ecx/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ecx/csv.hpp"
#include "ecx/error.hpp"

namespace ecx {
namespace {

std::size_t find_position(const std::vector<std::string>& ids, std::string_view item_id) {
  const auto it = std::find(ids.begin(), ids.end(), item_id);
  if (it == ids.end()) throw Error(ErrorCode::UnknownItem, "item '" + std::string(item_id) + "' not ranked");
  return static_cast<std::size_t>(it - ids.begin()) + 1;
}

std::string trim_number(std::string s) {
  if (s.find('.') == std::string::npos) return s;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.push_back('0');
  return s;
}

}  // namespace

std::size_t RankedList::position(std::string_view item_id) const {
  for (const auto& e : entries) {
    if (e.item_id == item_id) return e.rank;
  }
  throw Error(ErrorCode::UnknownItem, "item '" + std::string(item_id) + "' not ranked");
}

std::size_t RankedList::model_position(std::string_view item_id) const {
  return find_position(model_order, item_id);
}

RankedList rank(const FittedModel& model, const Dataset& pool, std::size_t k) {
  if (pool.n() == 0) throw Error(ErrorCode::InvalidK, "empty pool");
  if (k < 1 || k > pool.n()) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [1, " + std::to_string(pool.n()) + "]");
  }
  RankedList list;
  list.k = k;
  list.entries.reserve(pool.n());
  for (const auto& row : pool.rows) {
    const double eta = linear_predictor(model, row.values);
    list.entries.push_back({0, row.id, sigmoid(eta), eta});
  }
  std::sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.linear_predictor != b.linear_predictor) return a.linear_predictor > b.linear_predictor;
    return a.item_id < b.item_id;
  });
  for (std::size_t i = 0; i < list.entries.size(); ++i) {
    list.entries[i].rank = i + 1;
    list.model_order.push_back(list.entries[i].item_id);
  }
  return list;
}

std::vector<RankedEntry> top_k(const RankedList& list) {
  const auto k = std::min(list.k, list.entries.size());
  return {list.entries.begin(), list.entries.begin() + static_cast<std::ptrdiff_t>(k)};
}

RankedList apply_swap(const RankedList& list, std::string_view a, std::string_view b) {
  const std::size_t pa = list.position(a);
  const std::size_t pb = list.position(b);
  RankedList out = list;
  if (pa == pb) return out;
  std::swap(out.entries[pa - 1], out.entries[pb - 1]);
  out.entries[pa - 1].rank = pa;
  out.entries[pb - 1].rank = pb;
  out.overridden = false;
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    if (out.entries[i].item_id != out.model_order[i]) out.overridden = true;
  }
  return out;
}

std::string format_score(double score) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5f", score);
  return trim_number(buf);
}

std::string ranking_csv(const RankedList& list, const FittedModel& model, const Dataset& pool) {
  std::vector<std::string> features = model.feature_names;
  std::sort(features.begin(), features.end());

  std::string out = csv::join([&] {
    csv::Record header{"ID", "RANK", "SCORE"};
    header.insert(header.end(), features.begin(), features.end());
    return header;
  }());
  out.push_back('\n');
  for (const auto& e : list.entries) {
    const Row& row = pool.row(e.item_id);
    csv::Record rec{e.item_id, std::to_string(e.rank), format_score(e.score)};
    for (const auto& f : features) {
      const auto& col = model.encoder.column(f);
      if (col.kind == EncodedKind::Numeric) {
        rec.push_back(row.values.at(col.source));
      } else {
        rec.push_back(model.encoder.raw_value(col, row.values) != 0.0 ? "1" : "0");
      }
    }
    out += csv::join(rec);
    out.push_back('\n');
  }
  return out;
}

}  // namespace ecx
