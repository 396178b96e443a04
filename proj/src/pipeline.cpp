#include "ecx/pipeline.hpp"

#include <cstdio>
#include <sstream>

#include "ecx/error.hpp"
#include "ecx/narrate.hpp"

namespace ecx {

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.schema = ds.schema;
  out.rows.reserve(rows.size());
  for (const auto i : rows) out.rows.push_back(ds.rows.at(i));
  return out;
}

Dataset subset_by_ids(const Dataset& ds, std::span<const std::string> ids) {
  Dataset out;
  out.schema = ds.schema;
  for (const auto& id : ids) out.rows.push_back(ds.row(id));
  return out;
}

ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config) {
  ExperimentResult result;
  result.split = stratified_split(data, config.train_fraction, config.seed);
  const EncodedMatrix encoded = encode(data, result.split.train);
  const EncodedMatrix train = select_rows(encoded, result.split.train);
  result.selection = backward_stepwise(train, config.alpha_level, config.fit);

  TrainingInfo info;
  info.seed = config.seed;
  info.train_fraction = config.train_fraction;
  info.alpha_level = config.alpha_level;
  for (const auto i : result.split.train) info.train_ids.push_back(data.rows[i].id);
  for (const auto i : result.split.holdout) info.holdout_ids.push_back(data.rows[i].id);
  result.document = {result.selection.model, result.selection.trace, std::move(info)};

  result.holdout = subset(data, result.split.holdout);
  result.ranking = rank(result.selection.model, result.holdout, std::min(config.k, result.holdout.n()));
  if (config.k < result.ranking.size()) {
    result.boundary = contrast_pair(result.selection.model, result.ranking, result.holdout,
                                    result.ranking.entries[config.k - 1].item_id,
                                    result.ranking.entries[config.k].item_id, config.policy);
  }
  return result;
}

std::string experiment_report(const ExperimentResult& result, const Dataset& data, std::size_t rows) {
  const auto& model = result.selection.model;
  std::ostringstream out;
  char buf[160];

  const auto summary = dataset_summary(data);
  out << "Dataset: n=" << summary.n << " (" << summary.positives << " positive / " << summary.negatives
      << " negative)\n";
  out << "Split: " << result.split.train.size() << " train / " << result.split.holdout.size() << " holdout\n\n";

  out << "Backward stepwise selection (alpha=" << result.selection.trace.alpha_level << ")\n";
  for (const auto& step : result.selection.trace.steps) {
    std::snprintf(buf, sizeof buf, "  drop %-16s p=%.4g\n", step.removed.c_str(), step.p_value);
    out << buf;
  }
  out << "\nRetained coefficients (numeric features standard-scaled)\n";
  std::snprintf(buf, sizeof buf, "  %-24s %10.4f %10.4f\n", "(intercept)", model.intercept,
                model.intercept_std_error);
  out << buf;
  for (std::size_t j = 0; j < model.size(); ++j) {
    std::snprintf(buf, sizeof buf, "  %-24s %10.4f %10.4f  p=%.3g\n", model.feature_names[j].c_str(),
                  model.coefficients[j], model.std_errors[j], model.p_values[j]);
    out << buf;
  }
  for (const auto& ref : model.reference_features) {
    std::snprintf(buf, sizeof buf, "  %-24s %10s (reference level)\n", ref.c_str(), "0");
    out << buf;
  }

  out << "\nTop " << std::min(rows, result.ranking.size()) << " of " << result.ranking.size()
      << " holdout candidates (k=" << result.ranking.k << ")\n";
  RankedList head = result.ranking;
  head.entries.resize(std::min(rows, head.entries.size()));
  out << ranking_csv(head, model, result.holdout);

  if (result.boundary) {
    const auto& report = *result.boundary;
    out << "\nPositions " << result.ranking.k << " and " << result.ranking.k + 1 << ": " << report.item_a << " vs "
        << report.item_b << "\n";
    NarrationOptions options;
    out << render_text(report, {"Candidate " + report.item_a, "Candidate " + report.item_b}, options).str() << "\n";
    out << "\nContributions (share of the summed importance)\n";
    for (const auto& c : report.contributions) {
      std::snprintf(buf, sizeof buf, "  %-24s %8.3f %7.2f%%  %s\n", c.feature.c_str(), c.delta, c.share,
                    std::string(to_string(c.beneficiary)).c_str());
      out << buf;
    }
  }
  return out.str();
}

}  // namespace ecx
