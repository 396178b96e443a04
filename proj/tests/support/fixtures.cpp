#include "fixtures.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ecx/csv.hpp"

#ifndef ECX_SOURCE_DIR
#error "ECX_SOURCE_DIR must point at the repository root"
#endif

namespace ecx::testing {
namespace {

std::string fmt(double v, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

double clamp_grade(double v) { return std::clamp(v, 40.0, 98.0); }

std::string pick(Rng& rng, std::initializer_list<std::pair<const char*, double>> levels) {
  double u = uniform_unit(rng);
  for (const auto& [level, p] : levels) {
    if (u < p) return level;
    u -= p;
  }
  return std::data(levels)[levels.size() - 1].first;
}

}  // namespace

std::filesystem::path source_dir() { return ECX_SOURCE_DIR; }

std::filesystem::path data_path(const std::string& name) { return source_dir() / "data" / name; }

const std::vector<std::pair<std::string, double>>& reference_scores() {
  static const std::vector<std::pair<std::string, double>> scores{
      {"00034", 0.99933}, {"00029", 0.99648}, {"00139", 0.9959},  {"00097", 0.99578}, {"00079", 0.99418},
      {"00188", 0.9872},  {"00140", 0.98367}, {"00070", 0.98218}, {"00063", 0.9769},  {"00072", 0.97364},
  };
  return scores;
}

Dataset reference_dataset() {
  return load_csv(data_path("reference_pool.csv"), load_schema(data_path("reference_pool.schema")));
}

RawReferenceFit reference_least_squares() {
  const Dataset ds = reference_dataset();
  const auto& scores = reference_scores();
  const char* numeric[] = {"degree_p", "hsc_p", "ssc_p"};
  Eigen::MatrixXd X(static_cast<Eigen::Index>(scores.size()), 6);
  Eigen::VectorXd y(static_cast<Eigen::Index>(scores.size()));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Row& row = ds.row(scores[i].first);
    X(r, 0) = 1.0;
    for (int c = 0; c < 3; ++c) X(r, c + 1) = *parse_double(row.values.at(numeric[c]));
    X(r, 4) = row.values.at("hsc_s") == "Commerce" ? 1.0 : 0.0;
    X(r, 5) = *parse_binary(row.values.at("workex")) ? 1.0 : 0.0;
    y(r) = logit(scores[i].second);
  }
  const Eigen::VectorXd b = X.colPivHouseholderQr().solve(y);
  RawReferenceFit fit;
  fit.intercept = b(0);
  fit.slopes = {{"DEGREE_P", b(1)}, {"HSC_P", b(2)}, {"SSC_P", b(3)}, {"HSC_S_COM", b(4)}, {"WORKEX_YES", b(5)}};
  fit.max_abs_residual = (X * b - y).cwiseAbs().maxCoeff();
  return fit;
}

FittedModel derive_reference_model() {
  const Dataset ds = reference_dataset();
  const RawReferenceFit raw = reference_least_squares();
  std::vector<std::size_t> all(ds.n());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const Encoder encoder = encode(ds, all).encoder;

  constexpr double kScience = 1.0;
  FittedModel m;
  m.encoder = encoder;
  m.feature_names = {"DEGREE_P", "HSC_P", "HSC_S_COM", "HSC_S_SCI", "SSC_P", "WORKEX_YES"};
  m.reference_features = {"HSC_S_ART"};
  // Raw rows are science when COM=0, so the raw intercept already carries the
  // science effect.
  double intercept = raw.intercept - kScience;
  for (const auto& name : m.feature_names) {
    double coef = 0.0;
    if (name == "HSC_S_SCI") {
      coef = kScience;
    } else if (name == "HSC_S_COM") {
      coef = kScience + raw.slopes.at(name);
    } else if (name == "WORKEX_YES") {
      coef = raw.slopes.at(name);
    } else {
      const auto& s = encoder.scaler().at(name);
      coef = raw.slopes.at(name) * s.stddev;
      intercept += raw.slopes.at(name) * s.mean;
    }
    m.coefficients.push_back(coef);
  }
  m.intercept = intercept;
  m.std_errors.assign(m.size(), 0.0);
  m.p_values.assign(m.size(), 0.0);
  m.converged = true;
  return m;
}

Dataset synthetic_campus(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.schema = campus_schema();
  for (std::size_t i = 0; i < n; ++i) {
    Row row;
    char id[32];
    std::snprintf(id, sizeof id, "%05zu", i + 1);
    row.id = id;
    const double ssc = clamp_grade(67.0 + 10.8 * standard_normal(rng));
    const double hsc = clamp_grade(66.0 + 10.9 * standard_normal(rng));
    const double degree = clamp_grade(66.0 + 7.3 * standard_normal(rng));
    const double etest = clamp_grade(72.0 + 13.3 * standard_normal(rng));
    const double mba = clamp_grade(62.0 + 5.8 * standard_normal(rng));
    const bool workex = uniform_unit(rng) < 0.35;
    const std::string track = pick(rng, {{"Arts", 0.12}, {"Commerce", 0.5}, {"Science", 0.38}});
    row.values = {
        {"gender", pick(rng, {{"M", 0.65}, {"F", 0.35}})},
        {"ssc_p", fmt(ssc, 2)},
        {"ssc_b", pick(rng, {{"Central", 0.54}, {"Others", 0.46}})},
        {"hsc_p", fmt(hsc, 2)},
        {"hsc_b", pick(rng, {{"Central", 0.39}, {"Others", 0.61}})},
        {"hsc_s", track},
        {"degree_p", fmt(degree, 2)},
        {"degree_t", pick(rng, {{"Comm&Mgmt", 0.67}, {"Sci&Tech", 0.27}, {"Others", 0.06}})},
        {"workex", workex ? "Yes" : "No"},
        {"etest_p", fmt(etest, 1)},
        {"specialisation", pick(rng, {{"Mkt&Fin", 0.56}, {"Mkt&HR", 0.44}})},
        {"mba_p", fmt(mba, 2)},
    };
    const double eta = 0.6 + 0.11 * (ssc - 67.0) + 0.07 * (hsc - 66.0) + 0.08 * (degree - 66.0) +
                       (workex ? 2.2 : 0.0) + (track == "Arts" ? -1.8 : 0.0);
    row.label = uniform_unit(rng) < sigmoid(eta) ? 1 : 0;
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

std::string dataset_csv(const Dataset& ds) {
  csv::Record header{ds.schema.id_column};
  for (const auto& c : ds.schema.columns) header.push_back(c.name);
  if (ds.has_target()) header.push_back(ds.schema.target);
  std::string out = csv::join(header) + "\n";
  for (const auto& row : ds.rows) {
    csv::Record rec{row.id};
    for (const auto& c : ds.schema.columns) rec.push_back(row.values.at(c.name));
    if (ds.has_target()) rec.push_back(*row.label ? ds.schema.positive_label : ds.schema.negative_label);
    out += csv::join(rec) + "\n";
  }
  return out;
}

EncodedMatrix synthetic_logistic(std::size_t n, const std::vector<double>& beta, Rng& rng) {
  const auto p = static_cast<Eigen::Index>(beta.size() - 1);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), p);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double eta = beta[0];
    for (Eigen::Index j = 0; j < p; ++j) {
      X(i, j) = standard_normal(rng);
      eta += beta[static_cast<std::size_t>(j) + 1] * X(i, j);
    }
    y(i) = uniform_unit(rng) < sigmoid(eta) ? 1.0 : 0.0;
  }
  std::vector<std::string> names;
  for (Eigen::Index j = 0; j < p; ++j) names.push_back("X" + std::to_string(j + 1));
  return make_numeric_matrix(names, std::move(X), std::move(y));
}

FittedModel random_numeric_model(std::size_t p, Rng& rng) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "F%02zu", j);
    names.push_back(buf);
  }
  const auto base = make_numeric_matrix(names, Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(p)), std::nullopt);
  FittedModel m;
  m.encoder = base.encoder;
  m.feature_names = names;
  for (std::size_t j = 0; j < p; ++j) m.coefficients.push_back(uniform_real(rng, -3.0, 3.0));
  m.std_errors.assign(p, 0.0);
  m.p_values.assign(p, 0.0);
  m.intercept = uniform_real(rng, -1.0, 1.0);
  m.converged = true;
  return m;
}

Dataset random_numeric_pool(const FittedModel& model, std::size_t n, Rng& rng) {
  Dataset ds;
  ds.schema = model.encoder.schema();
  for (std::size_t i = 0; i < n; ++i) {
    Row row;
    char id[32];
    std::snprintf(id, sizeof id, "%05zu", i + 1);
    row.id = id;
    for (const auto& c : ds.schema.columns) {
      // Coarse grid so exact ties in the linear predictor actually occur.
      row.values[c.name] = fmt(std::round(uniform_real(rng, -3.0, 3.0) * 4.0) / 4.0, 2);
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

ContrastReport report_from_deltas(const std::vector<double>& deltas) {
  Rng unused(0);
  FittedModel m = random_numeric_model(deltas.size(), unused);
  m.coefficients = deltas;
  Row a{"A", {}, std::nullopt};
  Row b{"B", {}, std::nullopt};
  for (const auto& c : m.encoder.schema().columns) {
    a.values[c.name] = "1";
    b.values[c.name] = "0";
  }
  return decompose(m, a, b);
}

std::vector<std::string> cumulative_prefix_oracle(const ContrastReport& report, double tau) {
  double total = 0.0;
  for (const auto& c : report.contributions) total += c.importance;
  if (total == 0.0) return {};
  for (std::size_t len = 1; len <= report.contributions.size(); ++len) {
    double covered = 0.0;
    for (std::size_t i = 0; i < len; ++i) covered += report.contributions[i].importance;
    if (covered >= tau * total) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < len; ++i) {
        if (report.contributions[i].importance > 0) out.push_back(report.contributions[i].feature);
      }
      return out;
    }
  }
  return {};
}

}  // namespace ecx::testing
