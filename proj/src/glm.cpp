#include "ecx/glm.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ecx/error.hpp"

namespace ecx {
namespace {

struct Group {
  std::string name;
  std::vector<std::string> members;
};

// Non-reference columns grouped by their source feature, in encoder order.
std::vector<Group> model_groups(const EncodedMatrix& X) {
  std::vector<Group> groups;
  for (const auto& name : X.feature_names) {
    std::string group = name;
    bool reference = false;
    for (const auto& c : X.encoder.columns()) {
      if (c.name == name) {
        group = c.group;
        reference = c.reference;
        break;
      }
    }
    if (reference) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) { return g.name == group; });
    if (it == groups.end()) {
      groups.push_back({group, {name}});
    } else {
      it->members.push_back(name);
    }
  }
  return groups;
}

double log1pexp(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

}  // namespace

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p) - std::log1p(-p); }

double wald_p_value(double coef, double se) {
  const double z = std::abs(coef / se);
  return std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
}

std::optional<std::size_t> FittedModel::index_of(std::string_view feature) const {
  for (std::size_t i = 0; i < feature_names.size(); ++i) {
    if (feature_names[i] == feature) return i;
  }
  return std::nullopt;
}

double FittedModel::coefficient(std::string_view feature) const {
  if (const auto i = index_of(feature)) return coefficients[*i];
  if (std::find(reference_features.begin(), reference_features.end(), feature) != reference_features.end()) {
    return 0.0;
  }
  throw Error(ErrorCode::MissingFeature, "model has no feature '" + std::string(feature) + "'");
}

LogisticLikelihood::LogisticLikelihood(Eigen::MatrixXd design, Eigen::VectorXd target)
    : design_(std::move(design)), target_(std::move(target)) {}

double LogisticLikelihood::value(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd eta = design_ * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += target_(i) * eta(i) - log1pexp(eta(i));
  return ll;
}

Eigen::VectorXd LogisticLikelihood::fitted(const Eigen::VectorXd& beta) const {
  return (design_ * beta).unaryExpr([](double v) { return sigmoid(v); });
}

Eigen::VectorXd LogisticLikelihood::gradient(const Eigen::VectorXd& beta) const {
  return design_.transpose() * (target_ - fitted(beta));
}

Eigen::MatrixXd LogisticLikelihood::information(const Eigen::VectorXd& beta) const {
  const Eigen::VectorXd eta = design_ * beta;
  const Eigen::VectorXd w = eta.unaryExpr([](double v) {
    const double p = sigmoid(v);
    return p * (1.0 - p);
  });
  return design_.transpose() * w.asDiagonal() * design_;
}

FittedModel fit(const EncodedMatrix& X, const FitOptions& options) {
  std::vector<std::string> features;
  for (const auto& g : model_groups(X)) features.insert(features.end(), g.members.begin(), g.members.end());
  return fit(X, features, options);
}

FittedModel fit(const EncodedMatrix& X, std::span<const std::string> features, const FitOptions& options) {
  if (!X.target) throw Error(ErrorCode::InvalidTarget, "fit requires a target vector");
  {
    std::set<std::string> seen;
    for (const auto& f : features) {
      if (!seen.insert(f).second) throw Error(ErrorCode::DuplicateFeature, "feature '" + f + "' repeated");
    }
  }
  const Eigen::VectorXd& y = *X.target;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) throw Error(ErrorCode::InvalidTarget, "target values must be 0 or 1");
  }
  const double positives = y.sum();
  if (y.size() == 0 || positives == 0.0 || positives == static_cast<double>(y.size())) {
    throw Error(ErrorCode::SingleClass, "target has a single class");
  }

  const auto n = X.values.rows();
  const auto q = static_cast<Eigen::Index>(features.size());
  Eigen::MatrixXd design(n, q + 1);
  design.col(0).setOnes();
  for (Eigen::Index j = 0; j < q; ++j) {
    const auto it = std::find(X.feature_names.begin(), X.feature_names.end(), features[static_cast<std::size_t>(j)]);
    if (it == X.feature_names.end()) {
      throw Error(ErrorCode::MissingFeature, "no column '" + features[static_cast<std::size_t>(j)] + "'");
    }
    design.col(j + 1) = X.values.col(it - X.feature_names.begin());
  }
  const LogisticLikelihood objective(std::move(design), y);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q + 1);
  beta(0) = logit(positives / static_cast<double>(y.size()));

  auto check_conditioning = [&](const Eigen::MatrixXd& info) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(info, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > options.max_condition) {
      throw Error(ErrorCode::PerfectSeparation, "information matrix is numerically singular");
    }
  };

  FittedModel model;
  double ll = objective.value(beta);
  bool converged = false;
  int iter = 0;
  for (; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd grad = objective.gradient(beta);
    if (grad.lpNorm<Eigen::Infinity>() <= options.tol) {
      converged = true;
      break;
    }
    if (iter == options.max_iter) break;
    const Eigen::MatrixXd info = objective.information(beta);
    check_conditioning(info);
    const Eigen::VectorXd step = info.ldlt().solve(grad);

    // Step halving until the likelihood does not drop (up to rounding).
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    double candidate_ll = ll;
    for (int halving = 0; halving < 60; ++halving, t *= 0.5) {
      candidate = beta + t * step;
      candidate_ll = objective.value(candidate);
      if (std::isfinite(candidate_ll) && candidate_ll >= ll - 1e-12 * (1.0 + std::abs(ll))) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    beta = std::move(candidate);
    ll = candidate_ll;
    if (q > 0 && beta.tail(q).lpNorm<Eigen::Infinity>() > options.max_coefficient) {
      throw Error(ErrorCode::PerfectSeparation, "coefficients diverge (max-norm above " +
                                                    std::to_string(options.max_coefficient) + ")");
    }
  }
  if (!converged) {
    throw Error(ErrorCode::DidNotConverge, "no convergence within " + std::to_string(options.max_iter) + " iterations");
  }

  // The gradient also vanishes along a separating direction, so check the fit itself.
  if (q > 0 && (y - objective.fitted(beta)).lpNorm<Eigen::Infinity>() < options.separation_tol) {
    throw Error(ErrorCode::PerfectSeparation, "fitted probabilities reproduce every label");
  }
  const Eigen::MatrixXd info = objective.information(beta);
  check_conditioning(info);
  const Eigen::MatrixXd covariance = info.ldlt().solve(Eigen::MatrixXd::Identity(q + 1, q + 1));

  model.intercept = beta(0);
  model.intercept_std_error = std::sqrt(covariance(0, 0));
  for (Eigen::Index j = 0; j < q; ++j) {
    const double coef = beta(j + 1);
    const double se = std::sqrt(covariance(j + 1, j + 1));
    model.feature_names.push_back(features[static_cast<std::size_t>(j)]);
    model.coefficients.push_back(coef);
    model.std_errors.push_back(se);
    model.p_values.push_back(wald_p_value(coef, se));
  }
  model.log_likelihood = ll;
  model.converged = true;
  model.iterations = iter;
  model.encoder = X.encoder;
  // References are implicit only for groups that entered the fit.
  for (const auto& c : X.encoder.columns()) {
    if (!c.reference) continue;
    const bool group_active = std::any_of(model.feature_names.begin(), model.feature_names.end(), [&](const auto& f) {
      for (const auto& other : X.encoder.columns()) {
        if (other.name == f) return other.group == c.group;
      }
      return false;
    });
    if (group_active) model.reference_features.push_back(c.name);
  }
  return model;
}

StepwiseResult backward_stepwise(const EncodedMatrix& X, double alpha_level, const FitOptions& options) {
  std::vector<Group> active = model_groups(X);
  if (active.empty()) throw Error(ErrorCode::MissingFeature, "stepwise selection needs at least one feature");

  StepwiseResult result;
  result.trace.alpha_level = alpha_level;
  while (true) {
    std::vector<std::string> features;
    for (const auto& g : active) features.insert(features.end(), g.members.begin(), g.members.end());
    FittedModel model = fit(X, features, options);
    if (!result.trace.steps.empty()) result.trace.steps.back().log_likelihood_after = model.log_likelihood;

    std::optional<std::size_t> worst;
    double worst_p = -1.0;
    for (std::size_t g = 0; g < active.size(); ++g) {
      double group_p = 1.0;
      for (const auto& member : active[g].members) {
        group_p = std::min(group_p, model.p_values[*model.index_of(member)]);
      }
      if (group_p > worst_p || (group_p == worst_p && active[g].name < active[*worst].name)) {
        worst = g;
        worst_p = group_p;
      }
    }
    if (!worst || worst_p <= alpha_level) {
      result.model = std::move(model);
      break;
    }

    SelectionStep step;
    step.removed = active[*worst].name;
    step.removed_features = active[*worst].members;
    step.p_value = worst_p;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(*worst));
    for (const auto& g : active) step.features_after.insert(step.features_after.end(), g.members.begin(), g.members.end());
    result.trace.steps.push_back(std::move(step));
  }
  return result;
}

double linear_predictor(const FittedModel& model, const RawRecord& record) {
  double eta = model.intercept;
  for (std::size_t j = 0; j < model.size(); ++j) {
    eta += model.coefficients[j] * model.encoder.encode(model.encoder.column(model.feature_names[j]), record);
  }
  return eta;
}

double score(const FittedModel& model, const RawRecord& record) { return sigmoid(linear_predictor(model, record)); }

EncodedMatrix make_numeric_matrix(const std::vector<std::string>& names, Eigen::MatrixXd values,
                                  std::optional<Eigen::VectorXd> target) {
  if (static_cast<Eigen::Index>(names.size()) != values.cols()) {
    throw Error(ErrorCode::InvalidRecord, "column names and matrix width differ");
  }
  FeatureSchema schema;
  schema.id_column = "__id";
  std::map<std::string, ScalerParams, std::less<>> scaler;
  for (const auto& name : names) {
    ColumnSpec spec;
    spec.name = name;
    spec.kind = FeatureKind::Numeric;
    scaler.emplace(spec.encoded_base(), ScalerParams{0.0, 1.0});
    schema.columns.push_back(std::move(spec));
  }
  EncodedMatrix m;
  m.encoder = Encoder(std::move(schema), std::move(scaler));
  for (const auto& c : m.encoder.columns()) m.feature_names.push_back(c.name);
  for (Eigen::Index i = 0; i < values.rows(); ++i) m.ids.push_back(std::to_string(i));
  m.values = std::move(values);
  m.target = std::move(target);
  return m;
}

}  // namespace ecx
