#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "ecx/contrast.hpp"
#include "ecx/dataset.hpp"
#include "ecx/glm.hpp"
#include "ecx/ranking.hpp"
#include "ecx/serialization.hpp"

namespace ecx {

// Defaults mirror the hiring experiment: 65% stratified training split,
// 5% significance for stepwise selection, five interview slots.
struct ExperimentConfig {
  double train_fraction = 0.65;
  double alpha_level = 0.05;
  std::uint64_t seed = 42;
  std::size_t k = 5;
  SelectionPolicy policy = TopZ{2};
  FitOptions fit;
};

struct ExperimentResult {
  Split split;
  StepwiseResult selection;
  ModelDocument document;
  Dataset holdout;
  RankedList ranking;
  // The pair straddling the top-k cut (positions k and k+1), when it exists.
  std::optional<ContrastReport> boundary;
};

Dataset subset(const Dataset& ds, std::span<const std::size_t> rows);
Dataset subset_by_ids(const Dataset& ds, std::span<const std::string> ids);

// split -> scale on train rows -> backward stepwise -> rank the holdout.
ExperimentResult run_experiment(const Dataset& data, const ExperimentConfig& config);

// Plain-text summary: retained coefficients, the top of the ranking as CSV,
// and the explanation of the boundary pair.
std::string experiment_report(const ExperimentResult& result, const Dataset& data, std::size_t rows = 10);

}  // namespace ecx
