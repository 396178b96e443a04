#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ecx/contrast.hpp"
#include "ecx/dataset.hpp"
#include "ecx/glm.hpp"
#include "ecx/random.hpp"
#include "ecx/serialization.hpp"

namespace ecx::testing {

std::filesystem::path source_dir();
std::filesystem::path data_path(const std::string& name);

// Scores of the ten-row reference pool keyed by zero-padded id, in rank order.
const std::vector<std::pair<std::string, double>>& reference_scores();

Dataset reference_dataset();

// Regresses logit(score) on the raw table columns. Only the difference between
// the two observed study tracks is identified, so the science dummy is pinned
// to +1 and the commerce dummy and intercept absorb the rest.
FittedModel derive_reference_model();

struct RawReferenceFit {
  double intercept = 0.0;
  std::map<std::string, double> slopes;  // raw units; HSC_S_COM is relative to science
  double max_abs_residual = 0.0;
};
RawReferenceFit reference_least_squares();

// Campus-shaped labeled data drawn from a known logistic model in which work
// experience, school grades and a non-arts track help.
Dataset synthetic_campus(std::size_t n, std::uint64_t seed);

// Serializes rows back to CSV with the schema's id, feature and target columns.
std::string dataset_csv(const Dataset& ds);

// Design with iid standard normal columns and labels drawn from sigmoid(X beta),
// beta[0] being the intercept.
EncodedMatrix synthetic_logistic(std::size_t n, const std::vector<double>& beta, Rng& rng);

// A hand-built model over numeric features F0..F{p-1} with identity scaling.
FittedModel random_numeric_model(std::size_t p, Rng& rng);
Dataset random_numeric_pool(const FittedModel& model, std::size_t n, Rng& rng);

// Report with the given signed deltas on synthetic features; shares filled,
// nothing selected.
ContrastReport report_from_deltas(const std::vector<double>& deltas);

// Smallest prefix of the sorted contributions whose importance reaches tau of
// the total, found by enumerating every prefix length. Zero contributions are
// never listed.
std::vector<std::string> cumulative_prefix_oracle(const ContrastReport& report, double tau);

}  // namespace ecx::testing
