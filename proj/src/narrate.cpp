#include "ecx/narrate.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "ecx/error.hpp"

namespace ecx {
namespace {

bool is_indicator(EncodedKind kind) { return kind != EncodedKind::Numeric; }

std::string spell_digits(std::string_view name) {
  static constexpr const char* kWords[] = {"ZERO", "ONE", "TWO", "THREE", "FOUR",
                                           "FIVE", "SIX", "SEVEN", "EIGHT", "NINE"};
  std::string out;
  for (char c : name) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      if (!out.empty() && out.back() != '_') out.push_back('_');
      out += kWords[c - '0'];
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string join_phrases(const std::vector<std::string>& phrases) {
  std::string out;
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (i > 0) out += i + 1 == phrases.size() ? " and " : ", ";
    out += phrases[i];
  }
  return out;
}

bool letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

struct Token {
  std::string word;  // lowercase
  std::size_t begin = 0;
  std::size_t end = 0;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!letter(text[i])) {
      ++i;
      continue;
    }
    Token t;
    t.begin = i;
    while (i < text.size() && letter(text[i])) {
      t.word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
      ++i;
    }
    t.end = i;
    tokens.push_back(std::move(t));
  }
  return tokens;
}

std::vector<std::string> words_of(std::string_view phrase) {
  std::vector<std::string> out;
  for (auto& t : tokenize(phrase)) out.push_back(std::move(t.word));
  return out;
}

}  // namespace

LabelTable LabelTable::campus() {
  LabelTable t;
  for (const char* numeric : {"SSC_P", "HSC_P", "DEGREE_P", "ETEST_P", "MBA_P"}) {
    t.set(numeric, {numeric, {}, {}});
  }
  const auto indicator = [&t](std::string feature, std::string present) {
    t.set(feature, {feature, present, "not " + present});
  };
  indicator("WORKEX_YES", "having previous working experience");
  indicator("GENDER_F", "having gender recorded as female");
  indicator("GENDER_M", "having gender recorded as male");
  indicator("SSC_B_CENTRAL", "having attended the central board in secondary education");
  indicator("SSC_B_OTHERS", "having attended another board in secondary education");
  indicator("HSC_B_CENTRAL", "having attended the central board in higher secondary education");
  indicator("HSC_B_OTHERS", "having attended another board in higher secondary education");
  indicator("HSC_S_ART", "having attended arts studies in higher secondary education");
  indicator("HSC_S_COM", "having attended commercial studies in higher secondary education");
  indicator("HSC_S_SCI", "having attended scientific studies in higher secondary education");
  indicator("DEGREE_T_COMM_MGMT", "having an undergraduate degree in commerce and management");
  indicator("DEGREE_T_OTHERS", "having an undergraduate degree in another field");
  indicator("DEGREE_T_SCI_TECH", "having an undergraduate degree in science and technology");
  indicator("SPECIALISATION_MKT_FIN", "having an MBA specialisation in marketing and finance");
  indicator("SPECIALISATION_MKT_HR", "having an MBA specialisation in marketing and human resources");
  return t;
}

void LabelTable::set(std::string feature, FeatureLabel label) { labels_[std::move(feature)] = std::move(label); }

const FeatureLabel* LabelTable::find(std::string_view feature) const {
  const auto it = labels_.find(feature);
  return it == labels_.end() ? nullptr : &it->second;
}

std::string ExplanationText::str() const {
  std::string out;
  for (std::size_t i = 0; i < paragraphs.size(); ++i) {
    if (i) out.push_back('\n');
    out += paragraphs[i];
  }
  return out;
}

NeutralityLexicon NeutralityLexicon::standard() {
  return NeutralityLexicon({
      "right",       "rightly",      "wrong",      "wrongly",     "wrongs",      "good",
      "goods",       "bad",          "badly",      "worse",       "worst",       "solid",
      "solidly",     "interesting",  "interestingly", "worth noting", "better",  "best",
      "approve",     "approves",     "approved",   "approving",   "approval",    "approvals",
  });
}

NeutralityLexicon::NeutralityLexicon(std::vector<std::string> entries) {
  for (const auto& e : entries) {
    const auto words = words_of(e);
    if (words.empty()) continue;
    std::string joined;
    for (const auto& w : words) joined += (joined.empty() ? "" : " ") + w;
    entries_.push_back(std::move(joined));
  }
}

std::vector<Violation> validate_neutrality(std::string_view text, const std::vector<std::string>& identifiers,
                                           const NeutralityLexicon& lexicon) {
  std::string masked(text);
  for (const auto& id : identifiers) {
    if (id.empty()) continue;
    for (auto pos = masked.find(id); pos != std::string::npos; pos = masked.find(id, pos + id.size())) {
      std::fill(masked.begin() + static_cast<std::ptrdiff_t>(pos),
                masked.begin() + static_cast<std::ptrdiff_t>(pos + id.size()), ' ');
    }
  }

  std::vector<Violation> out;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    const char c = masked[i];
    if (c == '%') {
      out.push_back({ViolationKind::Percent, "%", i});
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < masked.size() && std::isdigit(static_cast<unsigned char>(masked[j]))) ++j;
      out.push_back({ViolationKind::Digit, std::string(text.substr(i, j - i)), i});
      i = j - 1;
    }
  }

  const auto tokens = tokenize(masked);
  for (const auto& entry : lexicon.entries()) {
    const auto words = words_of(entry);
    for (std::size_t t = 0; t + words.size() <= tokens.size(); ++t) {
      bool match = true;
      for (std::size_t w = 0; w < words.size() && match; ++w) match = tokens[t + w].word == words[w];
      if (!match) continue;
      const auto begin = tokens[t].begin;
      const auto end = tokens[t + words.size() - 1].end;
      out.push_back({ViolationKind::BannedWord, std::string(text.substr(begin, end - begin)), begin});
    }
  }
  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) { return a.position < b.position; });
  return out;
}

std::vector<Violation> validate_neutrality(const ExplanationText& text, const NeutralityLexicon& lexicon) {
  return validate_neutrality(text.str(), text.identifiers, lexicon);
}

ExplanationText render_text(const ContrastReport& report, const std::pair<std::string, std::string>& names,
                            const NarrationOptions& options) {
  const auto& [name_a, name_b] = names;
  ExplanationText text;
  text.identifiers = {name_a, name_b};

  if (report.indistinguishable) {
    text.paragraphs.push_back("The available information regarding " + name_a + " and " + name_b +
                              " does not allow the current algorithm reasoning to distinguish between them. "
                              "The ultimate decision remains within your control.");
    return text;
  }

  text.paragraphs.push_back("The available information regarding " + name_a + " and " + name_b +
                            " suggests that both individuals are qualified for the job. " + name_a +
                            " is ranked higher than " + name_b +
                            " according to the current algorithm reasoning. However, the ultimate decision remains "
                            "within your control, offering the option to alter this ranking if desired.");

  auto phrase_for = [&](const FeatureContribution& c, Beneficiary side) {
    const FeatureLabel* label = options.labels.find(c.feature);
    FeatureLabel fallback;
    if (!label) {
      if (options.strict) throw Error(ErrorCode::MissingLabel, "no label for feature '" + c.feature + "'");
      const std::string spelled = spell_digits(c.feature);
      fallback = {spelled, "having " + spelled, "not having " + spelled};
      label = &fallback;
      text.warnings.push_back(c.feature);
    }
    const double own = side == Beneficiary::A ? c.raw_a : c.raw_b;
    const double other = side == Beneficiary::A ? c.raw_b : c.raw_a;
    if (is_indicator(c.kind)) return own != 0.0 ? label->present : label->absent;
    return std::string(own > other ? "a higher score in " : "a lower score in ") + label->name;
  };

  for (const auto& [side, name] : {std::pair{Beneficiary::A, name_a}, std::pair{Beneficiary::B, name_b}}) {
    // Score comparisons first, then attributes held or lacked; each block in
    // importance order.
    std::vector<std::string> graded;
    std::vector<std::string> held;
    bool any_pro = false;
    for (const auto& c : report.contributions) {
      if (c.beneficiary != side) continue;
      any_pro = true;
      if (!report.is_selected(c.feature)) continue;
      (is_indicator(c.kind) ? held : graded).push_back(phrase_for(c, side));
    }
    graded.insert(graded.end(), held.begin(), held.end());
    if (!graded.empty()) {
      text.paragraphs.push_back("Characteristics in favour of " + name + " include " + join_phrases(graded) + ".");
    } else if (any_pro) {
      text.paragraphs.push_back("The selected information includes no characteristics in favour of " + name + ".");
    } else {
      text.paragraphs.push_back("No characteristic considered by the current algorithm reasoning is in favour of " +
                                name + ".");
    }
  }

  const auto violations = validate_neutrality(text);
  if (!violations.empty()) {
    throw Error(ErrorCode::MissingLabel, "label text '" + violations.front().token +
                                             "' breaks the neutrality rules; supply a neutral label");
  }
  return text;
}

std::string_view to_string(BarDirection d) noexcept {
  switch (d) {
    case BarDirection::Right: return "right";
    case BarDirection::Left: return "left";
    case BarDirection::None: return "none";
  }
  return "none";
}

ChartData render_chart_data(const ContrastReport& report) {
  ChartData chart;
  chart.item_a = report.item_a;
  chart.item_b = report.item_b;
  chart.indistinguishable = report.indistinguishable;
  const auto display = [](const FeatureContribution& c, double raw) {
    return is_indicator(c.kind) ? (raw != 0.0 ? 100.0 : 50.0) : raw;
  };
  for (const auto& c : report.contributions) {
    chart.radar.push_back({c.feature, display(c, c.raw_a), display(c, c.raw_b), c.beneficiary});
    Bar bar{c.feature, 0.0, BarDirection::None, report.is_selected(c.feature)};
    if (c.beneficiary == Beneficiary::A) {
      bar.signed_share = c.share;
      bar.direction = BarDirection::Right;
    } else if (c.beneficiary == Beneficiary::B) {
      bar.signed_share = -c.share;
      bar.direction = BarDirection::Left;
    }
    chart.bars.push_back(std::move(bar));
  }
  return chart;
}

}  // namespace ecx
