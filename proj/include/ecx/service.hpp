#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ecx/contrast.hpp"
#include "ecx/dataset.hpp"
#include "ecx/narrate.hpp"
#include "ecx/ranking.hpp"
#include "ecx/serialization.hpp"

namespace ecx {

enum class Justification { Agree, Disagree };
enum class PositionVerdict { Satisfied, Unsatisfied };
enum class DecisionAction { Confirm, Swap };

// One human verdict on a contrasted pair. The scenario index crosses
// justification agreement with position satisfaction:
// (agree, satisfied)=1, (agree, unsatisfied)=2, (disagree, satisfied)=3,
// (disagree, unsatisfied)=4. Swapping is only allowed when unsatisfied.
struct DecisionRecord {
  std::string timestamp;  // ISO-8601 UTC
  std::string item_a;
  std::string item_b;
  Justification justification = Justification::Agree;
  PositionVerdict position = PositionVerdict::Satisfied;
  DecisionAction action = DecisionAction::Confirm;
  std::optional<std::string> note;

  int scenario() const noexcept;
  // Throws InvalidRecord.
  void validate() const;

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

void to_json(json& j, const DecisionRecord& record);
// Throws InvalidRecord on missing fields or unknown enum values.
void from_json(const json& j, DecisionRecord& record);

struct DecisionSummary {
  std::array<std::size_t, 4> scenarios{};  // counts for scenarios 1..4
  // Selected features of pairs whose justification was rejected, most
  // frequent first.
  std::vector<std::pair<std::string, std::size_t>> disagreement_features;
};

void to_json(json& j, const DecisionSummary& summary);

// Append-only newline-delimited JSON file; every append is fsync'ed.
class DecisionLog {
 public:
  explicit DecisionLog(std::filesystem::path path);
  ~DecisionLog();
  DecisionLog(const DecisionLog&) = delete;
  DecisionLog& operator=(const DecisionLog&) = delete;
  DecisionLog(DecisionLog&& other) noexcept;
  DecisionLog& operator=(DecisionLog&& other) noexcept;

  void append(const DecisionRecord& record);
  static std::vector<DecisionRecord> read(const std::filesystem::path& path);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

RankedList replay(const RankedList& initial, const std::vector<DecisionRecord>& records);

struct ContrastBundle {
  ContrastReport report;
  ExplanationText text;
  ChartData chart;
};

void to_json(json& j, const ContrastBundle& bundle);

// One model, one candidate pool, one decision log. The live ranking is always
// the model order folded with the recorded swaps. Not thread-safe on its own;
// Service serializes access.
class Session {
 public:
  static constexpr const char* kSnapshotFile = "session.json";
  static constexpr const char* kLogFile = "decisions.ndjson";

  // Writes a fresh snapshot and an empty log into state_dir. Throws Io if a
  // snapshot already exists there.
  static Session create(const std::filesystem::path& state_dir, ModelDocument model, Dataset pool, std::size_t k,
                        SelectionPolicy default_policy);
  // Restores from snapshot and replays the log.
  static Session open(const std::filesystem::path& state_dir);
  static bool exists(const std::filesystem::path& state_dir);

  const RankedList& initial() const noexcept { return initial_; }
  const RankedList& current() const noexcept { return current_; }
  const std::vector<DecisionRecord>& decisions() const noexcept { return decisions_; }
  const ModelDocument& model() const noexcept { return model_; }
  const Dataset& pool() const noexcept { return pool_; }
  const SelectionPolicy& default_policy() const noexcept { return default_policy_; }

  ContrastBundle contrast(std::string_view id_a, std::string_view id_b, const SelectionPolicy& policy,
                          const NarrationOptions& narration = {}) const;

  // Validates, persists, then applies. Throws InvalidRecord / UnknownItem.
  DecisionRecord record(DecisionRecord decision);

  DecisionSummary summary() const;

 private:
  Session(std::filesystem::path dir, ModelDocument model, Dataset pool, RankedList initial,
          SelectionPolicy policy);

  std::filesystem::path dir_;
  ModelDocument model_;
  Dataset pool_;
  RankedList initial_;
  RankedList current_;
  SelectionPolicy default_policy_;
  std::vector<DecisionRecord> decisions_;
  DecisionLog log_;
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  json body;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<std::filesystem::path> static_dir;
  std::size_t page_size = 10;
  NarrationOptions narration;
};

// HTTP+JSON front of a Session. GET handlers share a read lock; decisions take
// the write lock, so readers never observe a half-applied swap.
//
//   GET  /health
//   GET  /ranking?k=&offset=&limit=      (limit=0 returns every entry)
//   GET  /contrast/{id_a}/{id_b}?policy=
//   POST /decision
//   GET  /decisions
//   GET  /decisions/summary
//
// Errors are problem-detail documents: {type,title,status,detail,code}.
class Service {
 public:
  explicit Service(std::optional<Session> session, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Transport-independent dispatch; the HTTP server forwards here.
  ApiResponse handle(const ApiRequest& request);

  // Binds (port 0 picks a free one) and returns the bound port, or -1.
  int bind();
  // Blocks until stop().
  bool listen_after_bind();
  void stop();
  bool running() const;

 private:
  ApiResponse get_ranking(const ApiRequest& request);
  ApiResponse get_contrast(const ApiRequest& request, const std::string& a, const std::string& b);
  ApiResponse post_decision(const ApiRequest& request);
  ApiResponse get_decisions();
  ApiResponse get_summary();

  struct Http;
  std::optional<Session> session_;
  ServiceOptions options_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<Http> http_;
};

json problem(int status, const std::string& title, const std::string& detail, const std::string& code);

}  // namespace ecx
