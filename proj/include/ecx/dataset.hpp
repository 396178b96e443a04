#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ecx {

enum class FeatureKind { Numeric, Categorical, Binary };

std::string_view to_string(FeatureKind kind) noexcept;

struct ColumnSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  // Categorical only: levels in lexicographic order, and the suffix used for
  // each level's one-hot column (HSC_S + "SCI" -> HSC_S_SCI).
  std::vector<std::string> levels;
  std::vector<std::string> codes;

  // Uppercase SNAKE_CASE stem of every encoded column derived from this one.
  std::string encoded_base() const;
};

struct FeatureSchema {
  std::vector<ColumnSpec> columns;
  std::string target;
  std::string positive_label = "1";
  std::string negative_label = "0";
  std::string id_column;
  // Numeric ids shorter than this are left-padded with zeros ("34" -> "00034").
  std::size_t id_width = 0;
  // Columns present in the file but deliberately not modeled (e.g. salary).
  std::vector<std::string> ignored;

  const ColumnSpec* find(std::string_view column) const;

  // Throws InvalidSchema when an invariant is broken.
  void validate() const;
};

// Flat "key = value" configuration. Directives start with '@':
//
//   @id = sl_no
//   @id_width = 5
//   @target = status
//   @positive = Placed
//   @negative = Not Placed
//   @ignore = salary
//   ssc_p = numeric
//   workex = binary
//   hsc_s = categorical(Arts:ART, Commerce:COM, Science:SCI)
//
// Categorical levels may carry an explicit one-hot suffix after ':'; levels
// are re-sorted into canonical order.
FeatureSchema parse_schema(std::string_view text);
FeatureSchema load_schema(const std::filesystem::path& path);

// The bundled Campus Recruitment schema (salary ignored, sl_no as id).
FeatureSchema campus_schema();

using RawRecord = std::map<std::string, std::string, std::less<>>;

struct Row {
  std::string id;
  RawRecord values;  // schema feature columns only, trimmed
  std::optional<int> label;
};

struct Dataset {
  FeatureSchema schema;
  std::vector<Row> rows;

  std::size_t n() const noexcept { return rows.size(); }
  bool has_target() const noexcept;
  std::optional<std::size_t> index_of(std::string_view id) const;
  // Throws UnknownItem.
  const Row& row(std::string_view id) const;
};

// Reads an RFC-4180 CSV. The header must contain every schema column and the
// id column; the target column may be absent (scoring mode), in which case no
// row carries a label.
Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema);
Dataset parse_csv(std::string_view text, const FeatureSchema& schema);

enum class EncodedKind { Numeric, Binary, Dummy };

struct EncodedColumn {
  std::string name;    // HSC_S_SCI
  std::string source;  // hsc_s
  std::string group;   // HSC_S; equals name for numeric and binary columns
  EncodedKind kind = EncodedKind::Numeric;
  std::string level;   // dummy columns: the raw level this column indicates
  bool reference = false;
};

struct ScalerParams {
  double mean = 0.0;
  double stddev = 1.0;
};

// Maps raw records to the encoded/scaled representation. Numeric columns use
// (x - mean) / stddev with the population standard deviation of the rows the
// scaler was fitted on.
class Encoder {
 public:
  Encoder() = default;
  Encoder(FeatureSchema schema, std::map<std::string, ScalerParams, std::less<>> scaler);

  const FeatureSchema& schema() const noexcept { return schema_; }
  const std::vector<EncodedColumn>& columns() const noexcept { return columns_; }
  const std::map<std::string, ScalerParams, std::less<>>& scaler() const noexcept {
    return scaler_;
  }

  // Throws MissingFeature for an unknown encoded name.
  const EncodedColumn& column(std::string_view name) const;

  // Scaled value fed to the model. Throws MissingFeature / UnknownLevel /
  // InvalidNumber.
  double encode(const EncodedColumn& column, const RawRecord& record) const;
  // Unscaled value for display: raw numeric, or 0/1 indicator.
  double raw_value(const EncodedColumn& column, const RawRecord& record) const;
  double unscale(const EncodedColumn& column, double scaled) const;

 private:
  FeatureSchema schema_;
  std::map<std::string, ScalerParams, std::less<>> scaler_;
  std::vector<EncodedColumn> columns_;
};

struct EncodedMatrix {
  std::vector<std::string> feature_names;
  std::vector<std::string> ids;
  Eigen::MatrixXd values;  // n x p
  std::optional<Eigen::VectorXd> target;
  Encoder encoder;

  std::size_t rows() const noexcept { return ids.size(); }
  std::size_t cols() const noexcept { return feature_names.size(); }
};

// Fits the scaler on `fit_scaler_on` only and encodes every row of `ds`.
// Throws ZeroVariance when a numeric column is constant on the fit rows.
EncodedMatrix encode(const Dataset& ds, std::span<const std::size_t> fit_scaler_on);
EncodedMatrix select_rows(const EncodedMatrix& m, std::span<const std::size_t> rows);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> holdout;
};

// Per class, round-half-up(train_fraction * class_count) rows go to train and
// the remainder to holdout. Both index lists come back sorted ascending.
Split stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

struct LevelCount {
  std::string level;
  std::size_t count = 0;
  double share = 0.0;
};

struct ColumnSummary {
  std::string name;
  FeatureKind kind = FeatureKind::Numeric;
  std::size_t count = 0;
  // numeric
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  // categorical / binary
  std::vector<LevelCount> levels;
};

struct DatasetSummary {
  std::size_t n = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::vector<ColumnSummary> columns;

  const ColumnSummary* find(std::string_view column) const;
};

DatasetSummary dataset_summary(const Dataset& ds);

// Helpers shared by the loaders.
std::optional<double> parse_double(std::string_view text);
std::optional<bool> parse_binary(std::string_view text);

}  // namespace ecx
