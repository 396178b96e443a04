#include "ecx/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ecx/csv.hpp"
#include "ecx/error.hpp"
#include "ecx/random.hpp"

namespace ecx {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// "Comm&Mgmt" -> "COMM_MGMT"
std::string snake_upper(std::string_view s) {
  std::string out;
  bool pending = false;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      if (pending && !out.empty()) out.push_back('_');
      pending = false;
      out.push_back(static_cast<char>(std::toupper(c)));
    } else {
      pending = true;
    }
  }
  return out;
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto pos = s.find(sep, start);
    const auto end = pos == std::string_view::npos ? s.size() : pos;
    out.emplace_back(trim(s.substr(start, end - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

ColumnSpec parse_column(const std::string& name, std::string_view kind_spec) {
  ColumnSpec spec;
  spec.name = name;
  const std::string kind = lower(kind_spec.substr(0, kind_spec.find('(')));
  if (trim(kind) == "numeric") {
    spec.kind = FeatureKind::Numeric;
  } else if (trim(kind) == "binary") {
    spec.kind = FeatureKind::Binary;
  } else if (trim(kind) == "categorical") {
    spec.kind = FeatureKind::Categorical;
    const auto open = kind_spec.find('(');
    const auto close = kind_spec.rfind(')');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
      throw Error(ErrorCode::InvalidSchema, "categorical '" + name + "' needs a level list");
    }
    std::vector<std::pair<std::string, std::string>> levels;
    for (const auto& item : split_list(kind_spec.substr(open + 1, close - open - 1), ',')) {
      const auto colon = item.find(':');
      std::string level(trim(std::string_view(item).substr(0, colon)));
      std::string code = colon == std::string::npos
                             ? snake_upper(level)
                             : snake_upper(trim(std::string_view(item).substr(colon + 1)));
      levels.emplace_back(std::move(level), std::move(code));
    }
    std::sort(levels.begin(), levels.end());
    for (auto& [level, code] : levels) {
      spec.levels.push_back(std::move(level));
      spec.codes.push_back(std::move(code));
    }
  } else {
    throw Error(ErrorCode::InvalidSchema, "unknown kind '" + std::string(kind_spec) + "' for " + name);
  }
  return spec;
}

std::string pad_id(std::string id, std::size_t width) {
  const bool numeric = !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
  if (numeric && id.size() < width) id.insert(0, width - id.size(), '0');
  return id;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string_view to_string(FeatureKind kind) noexcept {
  switch (kind) {
    case FeatureKind::Numeric: return "numeric";
    case FeatureKind::Categorical: return "categorical";
    case FeatureKind::Binary: return "binary";
  }
  return "numeric";
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<bool> parse_binary(std::string_view text) {
  const std::string v = lower(trim(text));
  if (v == "yes" || v == "y" || v == "true" || v == "1") return true;
  if (v == "no" || v == "n" || v == "false" || v == "0") return false;
  return std::nullopt;
}

std::string ColumnSpec::encoded_base() const { return snake_upper(name); }

const ColumnSpec* FeatureSchema::find(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

void FeatureSchema::validate() const {
  if (id_column.empty()) throw Error(ErrorCode::InvalidSchema, "no id column declared");
  if (!target.empty() && target == id_column) {
    throw Error(ErrorCode::InvalidSchema, "target and id column must differ");
  }
  std::set<std::string> names;
  std::set<std::string> encoded;
  for (const auto& c : columns) {
    if (c.name == target || c.name == id_column) {
      throw Error(ErrorCode::InvalidSchema, "'" + c.name + "' cannot be both a feature and target/id");
    }
    if (!names.insert(c.name).second) {
      throw Error(ErrorCode::InvalidSchema, "duplicate column '" + c.name + "'");
    }
    if (c.kind != FeatureKind::Categorical) continue;
    if (c.levels.empty()) {
      throw Error(ErrorCode::InvalidSchema, "categorical '" + c.name + "' has no levels");
    }
    if (c.codes.size() != c.levels.size()) {
      throw Error(ErrorCode::InvalidSchema, "categorical '" + c.name + "' has mismatched codes");
    }
    if (!std::is_sorted(c.levels.begin(), c.levels.end()) ||
        std::adjacent_find(c.levels.begin(), c.levels.end()) != c.levels.end()) {
      throw Error(ErrorCode::InvalidSchema, "levels of '" + c.name + "' must be unique and sorted");
    }
    for (const auto& code : c.codes) {
      if (code.empty() || !encoded.insert(c.encoded_base() + "_" + code).second) {
        throw Error(ErrorCode::InvalidSchema, "bad one-hot code in '" + c.name + "'");
      }
    }
  }
}

FeatureSchema parse_schema(std::string_view text) {
  FeatureSchema schema;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string_view content = trim(std::string_view(line).substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidSchema, "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(content.substr(0, eq)));
    const std::string value(trim(content.substr(eq + 1)));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::InvalidSchema, "line " + std::to_string(line_no) + ": empty key or value");
    }
    if (key == "@id") {
      schema.id_column = value;
    } else if (key == "@id_width") {
      const auto width = parse_double(value);
      if (!width || *width < 0 || *width != std::floor(*width)) {
        throw Error(ErrorCode::InvalidSchema, "@id_width must be a non-negative integer");
      }
      schema.id_width = static_cast<std::size_t>(*width);
    } else if (key == "@target") {
      schema.target = value;
    } else if (key == "@positive") {
      schema.positive_label = value;
    } else if (key == "@negative") {
      schema.negative_label = value;
    } else if (key == "@ignore") {
      for (auto& col : split_list(value, ',')) schema.ignored.push_back(std::move(col));
    } else if (key.front() == '@') {
      throw Error(ErrorCode::InvalidSchema, "unknown directive " + key);
    } else {
      schema.columns.push_back(parse_column(key, value));
    }
  }
  schema.validate();
  return schema;
}

FeatureSchema load_schema(const std::filesystem::path& path) { return parse_schema(read_file(path)); }

FeatureSchema campus_schema() {
  return parse_schema(R"(# Campus Recruitment (placement) dataset
@id = sl_no
@id_width = 5
@target = status
@positive = Placed
@negative = Not Placed
@ignore = salary
gender = categorical(F, M)
ssc_p = numeric
ssc_b = categorical(Central, Others)
hsc_p = numeric
hsc_b = categorical(Central, Others)
hsc_s = categorical(Arts:ART, Commerce:COM, Science:SCI)
degree_p = numeric
degree_t = categorical(Comm&Mgmt:COMM_MGMT, Others, Sci&Tech:SCI_TECH)
workex = binary
etest_p = numeric
specialisation = categorical(Mkt&Fin:MKT_FIN, Mkt&HR:MKT_HR)
mba_p = numeric
)");
}

bool Dataset::has_target() const noexcept {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.label.has_value(); });
}

std::optional<std::size_t> Dataset::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].id == id) return i;
  }
  return std::nullopt;
}

const Row& Dataset::row(std::string_view id) const {
  const auto idx = index_of(id);
  if (!idx) throw Error(ErrorCode::UnknownItem, "no item with id '" + std::string(id) + "'");
  return rows[*idx];
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  return parse_csv(read_file(path), schema);
}

Dataset parse_csv(std::string_view text, const FeatureSchema& schema) {
  schema.validate();
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorCode::EmptyFile, "no header row");

  std::map<std::string, std::size_t, std::less<>> header;
  for (std::size_t i = 0; i < records.front().size(); ++i) {
    header.emplace(std::string(trim(records.front()[i])), i);
  }
  auto require = [&](const std::string& name) {
    const auto it = header.find(name);
    if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in header");
    return it->second;
  };
  const std::size_t id_col = require(schema.id_column);
  std::vector<std::size_t> feature_cols;
  for (const auto& c : schema.columns) feature_cols.push_back(require(c.name));
  std::optional<std::size_t> target_col;
  if (!schema.target.empty() && header.contains(schema.target)) target_col = header.at(schema.target);
  for (const auto& [name, idx] : header) {
    const bool known = name == schema.id_column || name == schema.target || schema.find(name) ||
                       std::find(schema.ignored.begin(), schema.ignored.end(), name) != schema.ignored.end();
    if (!known) throw Error(ErrorCode::UnexpectedColumn, "column '" + name + "' not declared in schema");
  }

  Dataset ds;
  ds.schema = schema;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = "data row " + std::to_string(r);
    if (rec.size() != records.front().size()) {
      throw Error(ErrorCode::MalformedRow, where + ": expected " + std::to_string(records.front().size()) +
                                               " fields, got " + std::to_string(rec.size()));
    }
    Row row;
    row.id = pad_id(std::string(trim(rec[id_col])), schema.id_width);
    if (row.id.empty()) throw Error(ErrorCode::MalformedRow, where + ": empty id");
    if (!seen.insert(row.id).second) throw Error(ErrorCode::DuplicateId, "id '" + row.id + "' repeated");

    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const auto& spec = schema.columns[c];
      std::string value(trim(rec[feature_cols[c]]));
      if (value.empty()) throw Error(ErrorCode::MalformedRow, where + ": empty value for " + spec.name);
      switch (spec.kind) {
        case FeatureKind::Numeric:
          if (!parse_double(value)) {
            throw Error(ErrorCode::InvalidNumber, where + ", column " + spec.name + ": '" + value + "'");
          }
          break;
        case FeatureKind::Binary:
          if (!parse_binary(value)) {
            throw Error(ErrorCode::UnknownLevel, where + ", column " + spec.name + ": '" + value + "'");
          }
          break;
        case FeatureKind::Categorical:
          if (std::find(spec.levels.begin(), spec.levels.end(), value) == spec.levels.end()) {
            throw Error(ErrorCode::UnknownLevel, where + ", column " + spec.name + ": '" + value + "'");
          }
          break;
      }
      row.values.emplace(spec.name, std::move(value));
    }
    if (target_col) {
      const std::string_view t = trim(rec[*target_col]);
      if (t == schema.positive_label) {
        row.label = 1;
      } else if (t == schema.negative_label) {
        row.label = 0;
      } else {
        throw Error(ErrorCode::InvalidTarget, where + ": target '" + std::string(t) + "'");
      }
    }
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw Error(ErrorCode::EmptyFile, "header but no data rows");
  return ds;
}

Encoder::Encoder(FeatureSchema schema, std::map<std::string, ScalerParams, std::less<>> scaler)
    : schema_(std::move(schema)), scaler_(std::move(scaler)) {
  for (const auto& spec : schema_.columns) {
    const std::string base = spec.encoded_base();
    switch (spec.kind) {
      case FeatureKind::Numeric:
        columns_.push_back({base, spec.name, base, EncodedKind::Numeric, {}, false});
        break;
      case FeatureKind::Binary:
        columns_.push_back({base + "_YES", spec.name, base + "_YES", EncodedKind::Binary, {}, false});
        break;
      case FeatureKind::Categorical:
        for (std::size_t i = 0; i < spec.levels.size(); ++i) {
          columns_.push_back(
              {base + "_" + spec.codes[i], spec.name, base, EncodedKind::Dummy, spec.levels[i], i == 0});
        }
        break;
    }
  }
}

const EncodedColumn& Encoder::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::MissingFeature, "no encoded feature '" + std::string(name) + "'");
}

double Encoder::raw_value(const EncodedColumn& column, const RawRecord& record) const {
  const auto it = record.find(column.source);
  if (it == record.end()) throw Error(ErrorCode::MissingFeature, "record lacks '" + column.source + "'");
  switch (column.kind) {
    case EncodedKind::Numeric: {
      const auto v = parse_double(it->second);
      if (!v) throw Error(ErrorCode::InvalidNumber, column.source + ": '" + it->second + "'");
      return *v;
    }
    case EncodedKind::Binary: {
      const auto v = parse_binary(it->second);
      if (!v) throw Error(ErrorCode::UnknownLevel, column.source + ": '" + it->second + "'");
      return *v ? 1.0 : 0.0;
    }
    case EncodedKind::Dummy: {
      const std::string_view value = trim(it->second);
      const auto* spec = schema_.find(column.source);
      if (spec && std::find(spec->levels.begin(), spec->levels.end(), value) == spec->levels.end()) {
        throw Error(ErrorCode::UnknownLevel, column.source + ": '" + it->second + "'");
      }
      return value == column.level ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

double Encoder::encode(const EncodedColumn& column, const RawRecord& record) const {
  const double raw = raw_value(column, record);
  if (column.kind != EncodedKind::Numeric) return raw;
  const auto it = scaler_.find(column.name);
  if (it == scaler_.end()) throw Error(ErrorCode::MissingFeature, "no scaler for '" + column.name + "'");
  return (raw - it->second.mean) / it->second.stddev;
}

double Encoder::unscale(const EncodedColumn& column, double scaled) const {
  if (column.kind != EncodedKind::Numeric) return scaled;
  const auto it = scaler_.find(column.name);
  if (it == scaler_.end()) throw Error(ErrorCode::MissingFeature, "no scaler for '" + column.name + "'");
  return scaled * it->second.stddev + it->second.mean;
}

EncodedMatrix encode(const Dataset& ds, std::span<const std::size_t> fit_scaler_on) {
  if (fit_scaler_on.empty()) throw Error(ErrorCode::InvalidRecord, "scaler fit set is empty");
  for (const auto idx : fit_scaler_on) {
    if (idx >= ds.n()) throw Error(ErrorCode::InvalidRecord, "fit row " + std::to_string(idx) + " out of range");
  }

  std::map<std::string, ScalerParams, std::less<>> scaler;
  for (const auto& spec : ds.schema.columns) {
    if (spec.kind != FeatureKind::Numeric) continue;
    std::vector<double> xs;
    xs.reserve(fit_scaler_on.size());
    for (const auto idx : fit_scaler_on) xs.push_back(*parse_double(ds.rows[idx].values.at(spec.name)));
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo == *hi) throw Error(ErrorCode::ZeroVariance, "column '" + spec.name + "' is constant on fit rows");
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    scaler.emplace(spec.encoded_base(), ScalerParams{mean, std::sqrt(ss / static_cast<double>(xs.size()))});
  }

  EncodedMatrix m;
  m.encoder = Encoder(ds.schema, std::move(scaler));
  const auto& cols = m.encoder.columns();
  for (const auto& c : cols) m.feature_names.push_back(c.name);
  m.values.resize(static_cast<Eigen::Index>(ds.n()), static_cast<Eigen::Index>(cols.size()));
  const bool labeled = ds.has_target();
  if (labeled) m.target = Eigen::VectorXd(static_cast<Eigen::Index>(ds.n()));
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto& row = ds.rows[i];
    m.ids.push_back(row.id);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.encoder.encode(cols[j], row.values);
    }
    if (labeled) (*m.target)(static_cast<Eigen::Index>(i)) = *row.label;
  }
  return m;
}

EncodedMatrix select_rows(const EncodedMatrix& m, std::span<const std::size_t> rows) {
  EncodedMatrix out;
  out.feature_names = m.feature_names;
  out.encoder = m.encoder;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), m.values.cols());
  if (m.target) out.target = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = static_cast<Eigen::Index>(rows[i]);
    out.ids.push_back(m.ids.at(rows[i]));
    out.values.row(static_cast<Eigen::Index>(i)) = m.values.row(src);
    if (m.target) (*out.target)(static_cast<Eigen::Index>(i)) = (*m.target)(src);
  }
  return out;
}

Split stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidRecord, "train_fraction must lie in (0, 1)");
  }
  if (!ds.has_target()) throw Error(ErrorCode::InvalidTarget, "stratified split needs a labeled dataset");

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < ds.n(); ++i) by_class[*ds.rows[i].label].push_back(i);

  Rng rng(seed);
  Split split;
  for (int cls : {1, 0}) {
    auto& members = by_class[cls];
    const auto count = members.size();
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(count) + 0.5));
    if (count < 2 || n_train == 0 || n_train == count) {
      throw Error(ErrorCode::DegenerateClass, "class " + std::to_string(cls) + " with " + std::to_string(count) +
                                                  " rows cannot appear in both splits");
    }
    shuffle(std::span<std::size_t>(members), rng);
    split.train.insert(split.train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.holdout.insert(split.holdout.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.holdout.begin(), split.holdout.end());
  return split;
}

const ColumnSummary* DatasetSummary::find(std::string_view column) const {
  for (const auto& c : columns) {
    if (c.name == column) return &c;
  }
  return nullptr;
}

DatasetSummary dataset_summary(const Dataset& ds) {
  DatasetSummary s;
  s.n = ds.n();
  for (const auto& row : ds.rows) {
    if (!row.label) continue;
    (*row.label ? s.positives : s.negatives) += 1;
  }
  for (const auto& spec : ds.schema.columns) {
    ColumnSummary col;
    col.name = spec.name;
    col.kind = spec.kind;
    col.count = ds.n();
    if (spec.kind == FeatureKind::Numeric) {
      bool first = true;
      for (const auto& row : ds.rows) {
        const double x = *parse_double(row.values.at(spec.name));
        col.mean += x;
        col.min = first ? x : std::min(col.min, x);
        col.max = first ? x : std::max(col.max, x);
        first = false;
      }
      if (ds.n()) col.mean /= static_cast<double>(ds.n());
    } else {
      std::vector<std::string> levels =
          spec.kind == FeatureKind::Binary ? std::vector<std::string>{"no", "yes"} : spec.levels;
      for (const auto& level : levels) {
        std::size_t count = 0;
        for (const auto& row : ds.rows) {
          const auto& v = row.values.at(spec.name);
          const bool hit = spec.kind == FeatureKind::Binary ? (*parse_binary(v) == (level == "yes")) : v == level;
          count += hit ? 1 : 0;
        }
        col.levels.push_back({level, count, ds.n() ? static_cast<double>(count) / static_cast<double>(ds.n()) : 0.0});
      }
    }
    s.columns.push_back(std::move(col));
  }
  return s;
}

}  // namespace ecx
