#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecx/contrast.hpp"

namespace ecx {

// How a feature is phrased in a pro. Numeric features read "a higher score in
// <name>" / "a lower score in <name>"; indicator features use the
// present/absent phrases ("having previous working experience").
struct FeatureLabel {
  std::string name;
  std::string present;
  std::string absent;
};

class LabelTable {
 public:
  LabelTable() = default;

  // Glossary for the Campus Recruitment encoded features.
  static LabelTable campus();

  void set(std::string feature, FeatureLabel label);
  const FeatureLabel* find(std::string_view feature) const;
  const std::map<std::string, FeatureLabel, std::less<>>& entries() const noexcept { return labels_; }

 private:
  std::map<std::string, FeatureLabel, std::less<>> labels_;
};

struct ExplanationText {
  std::vector<std::string> paragraphs;
  // Item display names ("Candidate 00079"). They are identifiers, not
  // magnitudes, so the neutrality check does not flag digits inside them.
  std::vector<std::string> identifiers;
  // Features rendered through the fallback label (non-strict mode).
  std::vector<std::string> warnings;

  std::string str() const;  // paragraphs joined by '\n'
};

class NeutralityLexicon {
 public:
  // right, wrong, good, bad, solid, interesting, worth noting, better, best,
  // approve and their inflections.
  static NeutralityLexicon standard();

  explicit NeutralityLexicon(std::vector<std::string> entries);
  const std::vector<std::string>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::string> entries_;  // lowercase, words separated by one space
};

enum class ViolationKind { BannedWord, Digit, Percent };

struct Violation {
  ViolationKind kind = ViolationKind::BannedWord;
  std::string token;
  std::size_t position = 0;  // byte offset into the checked string

  friend bool operator==(const Violation&, const Violation&) = default;
};

std::vector<Violation> validate_neutrality(std::string_view text, const std::vector<std::string>& identifiers = {},
                                           const NeutralityLexicon& lexicon = NeutralityLexicon::standard());
std::vector<Violation> validate_neutrality(const ExplanationText& text,
                                           const NeutralityLexicon& lexicon = NeutralityLexicon::standard());

struct NarrationOptions {
  LabelTable labels = LabelTable::campus();
  // Strict: a feature without a label is an error (MissingLabel). Otherwise it
  // falls back to its encoded name with digits spelled out.
  bool strict = false;
};

// Fills the fixed four-part template: framing, current order with the
// override reminder, then the selected pros of each item. Throws MissingLabel
// in strict mode, or when a label would break the neutrality rules.
ExplanationText render_text(const ContrastReport& report, const std::pair<std::string, std::string>& names,
                            const NarrationOptions& options = {});

enum class BarDirection { Right, Left, None };

std::string_view to_string(BarDirection d) noexcept;

struct RadarAxis {
  std::string feature;
  double display_a = 0.0;
  double display_b = 0.0;
  Beneficiary marker = Beneficiary::Neither;
};

struct Bar {
  std::string feature;
  double signed_share = 0.0;  // +share favours A (right), -share favours B (left)
  BarDirection direction = BarDirection::None;
  bool selected = false;
};

struct ChartData {
  std::string item_a;
  std::string item_b;
  std::vector<RadarAxis> radar;
  std::vector<Bar> bars;
  bool indistinguishable = false;
};

// Radar uses raw values for numeric features and 100/50 for indicator 1/0.
ChartData render_chart_data(const ContrastReport& report);

}  // namespace ecx
