#include "ecx/service.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <httplib.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <mutex>
#include <regex>

#include "ecx/error.hpp"

namespace ecx {
namespace {

std::string now_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <typename E>
E parse_enum(const json& j, const char* field, std::initializer_list<std::pair<const char*, E>> options) {
  if (!j.contains(field) || !j.at(field).is_string()) {
    throw Error(ErrorCode::InvalidRecord, std::string("field '") + field + "' missing or not a string");
  }
  const auto value = j.at(field).get<std::string>();
  for (const auto& [name, e] : options) {
    if (value == name) return e;
  }
  throw Error(ErrorCode::InvalidRecord, std::string("field '") + field + "' has unknown value '" + value + "'");
}

std::string required_string(const json& j, const char* field) {
  if (!j.contains(field) || !j.at(field).is_string() || j.at(field).get<std::string>().empty()) {
    throw Error(ErrorCode::InvalidRecord, std::string("field '") + field + "' missing or empty");
  }
  return j.at(field).get<std::string>();
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownItem: return 404;
    case ErrorCode::InvalidRecord:
    case ErrorCode::InvalidPolicy:
    case ErrorCode::InvalidK:
    case ErrorCode::Parse: return 422;
    default: return 500;
  }
}

ApiResponse error_response(const Error& e) {
  const int status = status_for(e.code());
  const std::string title = status == 404 ? "Not Found" : status == 422 ? "Unprocessable Entity" : "Internal Error";
  return {status, problem(status, title, e.what(), std::string(to_string(e.code())))};
}

std::size_t parse_size(const std::map<std::string, std::string>& params, const std::string& key,
                       std::size_t fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  const auto v = parse_double(it->second);
  if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
    throw Error(ErrorCode::InvalidK, "query parameter '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(*v);
}

void write_all(int fd, const std::string& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::Io, std::string("decision log write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

int DecisionRecord::scenario() const noexcept {
  const int base = justification == Justification::Agree ? 1 : 3;
  return base + (position == PositionVerdict::Unsatisfied ? 1 : 0);
}

void DecisionRecord::validate() const {
  if (item_a.empty() || item_b.empty()) throw Error(ErrorCode::InvalidRecord, "item ids are required");
  if (item_a == item_b) throw Error(ErrorCode::InvalidRecord, "a decision needs two different items");
  if (action == DecisionAction::Swap && position == PositionVerdict::Satisfied) {
    throw Error(ErrorCode::InvalidRecord, "swap is only allowed when the position is unsatisfied");
  }
}

void to_json(json& j, const DecisionRecord& r) {
  j = json{{"timestamp", r.timestamp},
           {"item_a", r.item_a},
           {"item_b", r.item_b},
           {"justification", r.justification == Justification::Agree ? "agree" : "disagree"},
           {"position", r.position == PositionVerdict::Satisfied ? "satisfied" : "unsatisfied"},
           {"action", r.action == DecisionAction::Confirm ? "confirm" : "swap"},
           {"scenario", r.scenario()}};
  if (r.note) j["note"] = *r.note;
}

void from_json(const json& j, DecisionRecord& r) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidRecord, "decision must be a JSON object");
  r = {};
  r.item_a = required_string(j, "item_a");
  r.item_b = required_string(j, "item_b");
  r.justification = parse_enum<Justification>(
      j, "justification", {{"agree", Justification::Agree}, {"disagree", Justification::Disagree}});
  r.position = parse_enum<PositionVerdict>(
      j, "position", {{"satisfied", PositionVerdict::Satisfied}, {"unsatisfied", PositionVerdict::Unsatisfied}});
  r.action = parse_enum<DecisionAction>(j, "action", {{"confirm", DecisionAction::Confirm}, {"swap", DecisionAction::Swap}});
  if (j.contains("timestamp") && j.at("timestamp").is_string()) r.timestamp = j.at("timestamp").get<std::string>();
  if (j.contains("note") && j.at("note").is_string()) r.note = j.at("note").get<std::string>();
}

void to_json(json& j, const DecisionSummary& s) {
  json features = json::array();
  for (const auto& [feature, count] : s.disagreement_features) {
    features.push_back({{"feature", feature}, {"count", count}});
  }
  std::size_t total = 0;
  for (auto c : s.scenarios) total += c;
  j = json{{"scenarios", {{"1", s.scenarios[0]}, {"2", s.scenarios[1]}, {"3", s.scenarios[2]}, {"4", s.scenarios[3]}}},
           {"total", total},
           {"disagreement_features", std::move(features)}};
}

void to_json(json& j, const ContrastBundle& b) {
  j = json{{"report", b.report}, {"text", b.text}, {"chart_data", b.chart}};
}

json problem(int status, const std::string& title, const std::string& detail, const std::string& code) {
  return json{{"type", "about:blank"}, {"title", title}, {"status", status}, {"detail", detail}, {"code", code}};
}

DecisionLog::DecisionLog(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::Io, "cannot open " + path_.string() + ": " + std::strerror(errno));
}

DecisionLog::~DecisionLog() {
  if (fd_ >= 0) ::close(fd_);
}

DecisionLog::DecisionLog(DecisionLog&& other) noexcept : path_(std::move(other.path_)), fd_(other.fd_) {
  other.fd_ = -1;
}

DecisionLog& DecisionLog::operator=(DecisionLog&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void DecisionLog::append(const DecisionRecord& record) {
  write_all(fd_, json(record).dump() + "\n");
  if (::fsync(fd_) != 0) throw Error(ErrorCode::Io, std::string("fsync failed: ") + std::strerror(errno));
}

std::vector<DecisionRecord> DecisionLog::read(const std::filesystem::path& path) {
  std::vector<DecisionRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line).get<DecisionRecord>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

RankedList replay(const RankedList& initial, const std::vector<DecisionRecord>& records) {
  RankedList list = initial;
  for (const auto& r : records) {
    if (r.action == DecisionAction::Swap) list = apply_swap(list, r.item_a, r.item_b);
  }
  return list;
}

Session::Session(std::filesystem::path dir, ModelDocument model, Dataset pool, RankedList initial,
                 SelectionPolicy policy)
    : dir_(std::move(dir)),
      model_(std::move(model)),
      pool_(std::move(pool)),
      initial_(std::move(initial)),
      current_(initial_),
      default_policy_(policy),
      log_(dir_ / kLogFile) {}

bool Session::exists(const std::filesystem::path& state_dir) {
  return std::filesystem::exists(state_dir / kSnapshotFile);
}

Session Session::create(const std::filesystem::path& state_dir, ModelDocument model, Dataset pool, std::size_t k,
                        SelectionPolicy default_policy) {
  if (exists(state_dir)) throw Error(ErrorCode::Io, "a session already exists in " + state_dir.string());
  std::filesystem::create_directories(state_dir);
  RankedList initial = rank(model.model, pool, k);
  json rows = json::array();
  for (const auto& r : pool.rows) rows.push_back(r);
  const json snapshot{{"format", "ecx-session/1"},
                      {"model", model},
                      {"pool_schema", pool.schema},
                      {"pool", std::move(rows)},
                      {"k", k},
                      {"policy", format_policy(default_policy)},
                      {"initial_ranking", initial}};
  write_text_file(state_dir / kSnapshotFile, snapshot.dump(2) + "\n");
  return Session(state_dir, std::move(model), std::move(pool), std::move(initial), default_policy);
}

Session Session::open(const std::filesystem::path& state_dir) {
  const json snapshot = read_json_file(state_dir / kSnapshotFile);
  try {
    Dataset pool;
    pool.schema = snapshot.at("pool_schema").get<FeatureSchema>();
    for (const auto& r : snapshot.at("pool")) pool.rows.push_back(r.get<Row>());
    Session session(state_dir, snapshot.at("model").get<ModelDocument>(), std::move(pool),
                    snapshot.at("initial_ranking").get<RankedList>(),
                    parse_policy(snapshot.at("policy").get<std::string>()));
    session.decisions_ = DecisionLog::read(state_dir / kLogFile);
    session.current_ = replay(session.initial_, session.decisions_);
    return session;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Parse, (state_dir / kSnapshotFile).string() + ": " + e.what());
  }
}

ContrastBundle Session::contrast(std::string_view id_a, std::string_view id_b, const SelectionPolicy& policy,
                                 const NarrationOptions& narration) const {
  ContrastBundle bundle;
  bundle.report = contrast_pair(model_.model, initial_, pool_, id_a, id_b, policy);
  bundle.text = render_text(bundle.report, {"Candidate " + bundle.report.item_a, "Candidate " + bundle.report.item_b},
                            narration);
  bundle.chart = render_chart_data(bundle.report);
  return bundle;
}

DecisionRecord Session::record(DecisionRecord decision) {
  decision.validate();
  (void)current_.position(decision.item_a);
  (void)current_.position(decision.item_b);
  if (decision.timestamp.empty()) decision.timestamp = now_utc();

  RankedList next = current_;
  if (decision.action == DecisionAction::Swap) next = apply_swap(current_, decision.item_a, decision.item_b);
  log_.append(decision);
  decisions_.push_back(decision);
  current_ = std::move(next);
  if (replay(initial_, decisions_) != current_) {
    throw Error(ErrorCode::Io, "decision log replay diverged from the live ranking");
  }
  return decision;
}

DecisionSummary Session::summary() const {
  DecisionSummary s;
  std::map<std::string, std::size_t> counts;
  for (const auto& d : decisions_) {
    s.scenarios[static_cast<std::size_t>(d.scenario() - 1)] += 1;
    if (d.justification != Justification::Disagree) continue;
    const auto report = contrast_pair(model_.model, initial_, pool_, d.item_a, d.item_b, default_policy_);
    for (const auto& f : report.selected) counts[f] += 1;
  }
  s.disagreement_features.assign(counts.begin(), counts.end());
  std::stable_sort(s.disagreement_features.begin(), s.disagreement_features.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return s;
}

struct Service::Http {
  httplib::Server server;
};

Service::Service(std::optional<Session> session, ServiceOptions options)
    : session_(std::move(session)), options_(std::move(options)), http_(std::make_unique<Http>()) {
  auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest request{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) request.params[k] = v;
    const ApiResponse response = handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), response.status >= 400 ? "application/problem+json" : "application/json");
  };
  auto& server = http_->server;
  server.Get("/health", adapt);
  server.Get("/ranking", adapt);
  server.Get(R"(/contrast/([^/]+)/([^/]+))", adapt);
  server.Post("/decision", adapt);
  server.Get("/decisions", adapt);
  server.Get("/decisions/summary", adapt);
  if (options_.static_dir) server.set_mount_point("/", options_.static_dir->string());
}

Service::~Service() { stop(); }

ApiResponse Service::handle(const ApiRequest& request) {
  static const std::regex contrast_route(R"(/contrast/([^/]+)/([^/]+))");
  try {
    if (request.method == "GET" && request.path == "/health") {
      std::shared_lock lock(mutex_);
      return {200, json{{"status", "ok"}, {"model_loaded", session_.has_value()}}};
    }
    const bool known = request.path == "/ranking" || request.path == "/decision" || request.path == "/decisions" ||
                       request.path == "/decisions/summary" || std::regex_match(request.path, contrast_route);
    if (!known) return {404, problem(404, "Not Found", "no route " + request.path, "NoRoute")};
    if (!session_) return {409, problem(409, "Conflict", "no model is loaded", "NoModel")};

    std::smatch match;
    if (request.method == "GET" && request.path == "/ranking") return get_ranking(request);
    if (request.method == "GET" && std::regex_match(request.path, match, contrast_route)) {
      return get_contrast(request, match[1].str(), match[2].str());
    }
    if (request.method == "POST" && request.path == "/decision") return post_decision(request);
    if (request.method == "GET" && request.path == "/decisions") return get_decisions();
    if (request.method == "GET" && request.path == "/decisions/summary") return get_summary();
    return {405, problem(405, "Method Not Allowed", request.method + " " + request.path, "MethodNotAllowed")};
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    return {500, problem(500, "Internal Error", e.what(), "Internal")};
  }
}

ApiResponse Service::get_ranking(const ApiRequest& request) {
  std::shared_lock lock(mutex_);
  RankedList list = session_->current();
  const std::size_t k = parse_size(request.params, "k", list.k);
  if (k < 1 || k > list.size()) {
    throw Error(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [1, " + std::to_string(list.size()) + "]");
  }
  list.k = k;
  const std::size_t offset = std::min(parse_size(request.params, "offset", 0), list.size());
  const std::size_t limit = parse_size(request.params, "limit", options_.page_size);
  const std::size_t end = limit == 0 ? list.size() : std::min(list.size(), offset + limit);
  json body = list;
  json page = json::array();
  for (std::size_t i = offset; i < end; ++i) page.push_back(body["entries"][i]);
  body["entries"] = std::move(page);
  body["offset"] = offset;
  return {200, std::move(body)};
}

ApiResponse Service::get_contrast(const ApiRequest& request, const std::string& a, const std::string& b) {
  std::shared_lock lock(mutex_);
  const auto it = request.params.find("policy");
  const SelectionPolicy policy = it == request.params.end() ? session_->default_policy() : parse_policy(it->second);
  return {200, json(session_->contrast(a, b, policy, options_.narration))};
}

ApiResponse Service::post_decision(const ApiRequest& request) {
  json body;
  try {
    body = json::parse(request.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidRecord, std::string("body is not JSON: ") + e.what());
  }
  DecisionRecord record = body.get<DecisionRecord>();
  std::unique_lock lock(mutex_);
  record = session_->record(std::move(record));
  return {201, json{{"record", record},
                    {"scenario", record.scenario()},
                    {"overridden", session_->current().overridden}}};
}

ApiResponse Service::get_decisions() {
  std::shared_lock lock(mutex_);
  return {200, json{{"decisions", session_->decisions()}}};
}

ApiResponse Service::get_summary() {
  std::shared_lock lock(mutex_);
  return {200, json(session_->summary())};
}

int Service::bind() {
  if (options_.port == 0) return http_->server.bind_to_any_port(options_.host);
  return http_->server.bind_to_port(options_.host, options_.port) ? options_.port : -1;
}

bool Service::listen_after_bind() { return http_->server.listen_after_bind(); }

void Service::stop() {
  if (http_ && http_->server.is_running()) http_->server.stop();
}

bool Service::running() const { return http_->server.is_running(); }

}  // namespace ecx
