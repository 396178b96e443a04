#include "ecx/contrast.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "ecx/error.hpp"

namespace ecx {
namespace {

void validate(const SelectionPolicy& policy) {
  const auto bad_tau = [](double tau) { return !(tau > 0.0 && tau <= 1.0); };
  if (const auto* p = std::get_if<TopZ>(&policy); p && p->z < 1) {
    throw Error(ErrorCode::InvalidPolicy, "topz needs z >= 1");
  }
  if (const auto* p = std::get_if<CumulativeImportance>(&policy); p && bad_tau(p->tau)) {
    throw Error(ErrorCode::InvalidPolicy, "cum needs tau in (0, 1]");
  }
  if (const auto* p = std::get_if<Mixed>(&policy); p && bad_tau(p->tau)) {
    throw Error(ErrorCode::InvalidPolicy, "mixed needs tau in (0, 1]");
  }
}

std::size_t parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::InvalidPolicy, "expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return value;
}

double parse_fraction(std::string_view text) {
  const auto v = parse_double(text);
  if (!v) throw Error(ErrorCode::InvalidPolicy, "expected a number, got '" + std::string(text) + "'");
  return *v;
}

// Indices of the first `count` non-zero contributions favouring `side`.
std::vector<std::size_t> top_pros(const ContrastReport& report, Beneficiary side, std::size_t count) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < report.contributions.size() && out.size() < count; ++i) {
    if (report.contributions[i].beneficiary == side) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> cumulative_prefix(const ContrastReport& report, double tau) {
  double total = 0.0;
  for (const auto& c : report.contributions) total += c.importance;
  std::vector<std::size_t> out;
  if (total <= 0.0) return out;
  double covered = 0.0;
  for (std::size_t i = 0; i < report.contributions.size(); ++i) {
    const auto& c = report.contributions[i];
    if (c.importance <= 0.0) break;  // sorted: only zeros remain
    covered += c.importance;
    out.push_back(i);
    if (covered >= tau * total) break;
  }
  return out;
}

}  // namespace

std::string_view to_string(Beneficiary b) noexcept {
  switch (b) {
    case Beneficiary::A: return "A";
    case Beneficiary::B: return "B";
    case Beneficiary::Neither: return "Neither";
  }
  return "Neither";
}

SelectionPolicy parse_policy(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorCode::InvalidPolicy, "expected topz:<int>, cum:<float> or mixed:<float>,<int>");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  SelectionPolicy policy;
  if (kind == "topz") {
    policy = TopZ{parse_count(args)};
  } else if (kind == "cum") {
    policy = CumulativeImportance{parse_fraction(args)};
  } else if (kind == "mixed") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::InvalidPolicy, "mixed needs <tau>,<min_pros>");
    policy = Mixed{parse_fraction(args.substr(0, comma)), parse_count(args.substr(comma + 1))};
  } else {
    throw Error(ErrorCode::InvalidPolicy, "unknown policy '" + std::string(kind) + "'");
  }
  validate(policy);
  return policy;
}

std::string format_policy(const SelectionPolicy& policy) {
  const auto number = [](double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  if (const auto* p = std::get_if<TopZ>(&policy)) return "topz:" + std::to_string(p->z);
  if (const auto* p = std::get_if<CumulativeImportance>(&policy)) return "cum:" + number(p->tau);
  const auto& m = std::get<Mixed>(policy);
  return "mixed:" + number(m.tau) + "," + std::to_string(m.min_pros_per_item);
}

const FeatureContribution* ContrastReport::find(std::string_view feature) const {
  for (const auto& c : contributions) {
    if (c.feature == feature) return &c;
  }
  return nullptr;
}

bool ContrastReport::is_selected(std::string_view feature) const {
  return std::find(selected.begin(), selected.end(), feature) != selected.end();
}

ContrastReport decompose(const FittedModel& model, const Row& a, const Row& b) {
  ContrastReport report;
  report.item_a = a.id;
  report.item_b = b.id;
  report.contributions.reserve(model.size());
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& column = model.encoder.column(model.feature_names[j]);
    FeatureContribution c;
    c.feature = column.name;
    c.kind = column.kind;
    c.raw_a = model.encoder.raw_value(column, a.values);
    c.raw_b = model.encoder.raw_value(column, b.values);
    c.coefficient = model.coefficients[j];
    c.delta = c.coefficient * (model.encoder.encode(column, a.values) - model.encoder.encode(column, b.values));
    c.importance = std::abs(c.delta);
    c.beneficiary = c.delta > 0 ? Beneficiary::A : c.delta < 0 ? Beneficiary::B : Beneficiary::Neither;
    report.total_delta += c.delta;
    report.contributions.push_back(std::move(c));
  }
  std::stable_sort(report.contributions.begin(), report.contributions.end(),
                   [](const FeatureContribution& x, const FeatureContribution& y) {
                     if (x.importance != y.importance) return x.importance > y.importance;
                     return x.feature < y.feature;
                   });
  report.indistinguishable = std::all_of(report.contributions.begin(), report.contributions.end(),
                                         [](const FeatureContribution& c) { return c.delta == 0.0; });
  return contribution_shares(std::move(report));
}

ContrastReport contribution_shares(ContrastReport report) {
  double total = 0.0;
  for (const auto& c : report.contributions) total += c.importance;
  for (auto& c : report.contributions) c.share = total > 0.0 ? 100.0 * c.importance / total : 0.0;
  return report;
}

ContrastReport select(ContrastReport report, const SelectionPolicy& policy) {
  validate(policy);
  std::vector<std::size_t> chosen;
  if (const auto* p = std::get_if<TopZ>(&policy)) {
    chosen = top_pros(report, Beneficiary::A, p->z);
    const auto b = top_pros(report, Beneficiary::B, p->z);
    chosen.insert(chosen.end(), b.begin(), b.end());
  } else if (const auto* p = std::get_if<CumulativeImportance>(&policy)) {
    chosen = cumulative_prefix(report, p->tau);
  } else {
    const auto& m = std::get<Mixed>(policy);
    chosen = cumulative_prefix(report, m.tau);
    for (const auto side : {Beneficiary::A, Beneficiary::B}) {
      const auto extra = top_pros(report, side, m.min_pros_per_item);
      chosen.insert(chosen.end(), extra.begin(), extra.end());
    }
  }
  std::sort(chosen.begin(), chosen.end());
  chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());

  report.selected.clear();
  for (const auto i : chosen) report.selected.push_back(report.contributions[i].feature);
  report.policy = policy;
  return report;
}

ContrastReport contrast_pair(const FittedModel& model, const RankedList& ranking, const Dataset& pool,
                             std::string_view id_a, std::string_view id_b, const SelectionPolicy& policy) {
  validate(policy);
  const bool flip = ranking.model_position(id_a) > ranking.model_position(id_b);
  const Row& higher = pool.row(flip ? id_b : id_a);
  const Row& lower = pool.row(flip ? id_a : id_b);
  return select(decompose(model, higher, lower), policy);
}

}  // namespace ecx
