#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecx/dataset.hpp"

namespace ecx {

struct FitOptions {
  double tol = 1e-8;  // max-norm of the log-likelihood gradient
  int max_iter = 100;
  // Separation guards: coefficient max-norm (intercept excluded) and the
  // condition number of the observed information matrix.
  double max_coefficient = 30.0;
  double max_condition = 1e12;
  double separation_tol = 1e-6;  // max |y - p| below this means complete separation
};

// Unregularized logistic regression fitted by maximum likelihood.
//
// feature_names lists the encoded columns that entered the fit. Reference
// levels of one-hot groups never enter (their coefficient is implicitly 0) and
// are listed in reference_features so callers can display them.
struct FittedModel {
  std::vector<std::string> feature_names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> p_values;
  double intercept = 0.0;
  double intercept_std_error = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> reference_features;
  Encoder encoder;

  std::size_t size() const noexcept { return feature_names.size(); }
  std::optional<std::size_t> index_of(std::string_view feature) const;
  // 0 for reference features; throws MissingFeature for anything else unknown.
  double coefficient(std::string_view feature) const;
};

struct SelectionStep {
  std::string removed;                      // group name, e.g. HSC_S or ETEST_P
  std::vector<std::string> removed_features;  // encoded columns dropped with it
  double p_value = 1.0;                     // group p-value at removal time
  std::vector<std::string> features_after;
  double log_likelihood_after = 0.0;
};

struct SelectionTrace {
  double alpha_level = 0.05;
  std::vector<SelectionStep> steps;
};

struct StepwiseResult {
  FittedModel model;
  SelectionTrace trace;
};

double sigmoid(double x) noexcept;
double logit(double p) noexcept;

// Two-sided normal tail probability of coef / se.
double wald_p_value(double coef, double se);

// Log-likelihood and its derivatives for a design that already carries the
// intercept column. Exposed so tests can check the analytic gradient against
// finite differences.
class LogisticLikelihood {
 public:
  LogisticLikelihood(Eigen::MatrixXd design, Eigen::VectorXd target);

  double value(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& beta) const;
  Eigen::VectorXd fitted(const Eigen::VectorXd& beta) const;
  // Observed (= expected, canonical link) information X^T W X.
  Eigen::MatrixXd information(const Eigen::VectorXd& beta) const;

  const Eigen::MatrixXd& design() const noexcept { return design_; }

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd target_;
};

// Fits every non-reference column of `X`.
FittedModel fit(const EncodedMatrix& X, const FitOptions& options = {});
// Fits the listed encoded columns only (in the given order).
FittedModel fit(const EncodedMatrix& X, std::span<const std::string> features, const FitOptions& options = {});

// Drops the least significant feature group while its p-value exceeds
// alpha_level. A one-hot group is judged by its smallest member p-value and
// removed as a whole; the intercept is never removed.
StepwiseResult backward_stepwise(const EncodedMatrix& X, double alpha_level, const FitOptions& options = {});

double linear_predictor(const FittedModel& model, const RawRecord& record);
double score(const FittedModel& model, const RawRecord& record);

// Builds an all-numeric EncodedMatrix with an identity scaler, for callers
// that already hold a design matrix (synthetic studies, tests).
EncodedMatrix make_numeric_matrix(const std::vector<std::string>& names, Eigen::MatrixXd values,
                                  std::optional<Eigen::VectorXd> target);

}  // namespace ecx
