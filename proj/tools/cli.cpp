#include "cli.hpp"

#include <CLI11.hpp>

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "ecx/contrast.hpp"
#include "ecx/dataset.hpp"
#include "ecx/error.hpp"
#include "ecx/narrate.hpp"
#include "ecx/pipeline.hpp"
#include "ecx/ranking.hpp"
#include "ecx/serialization.hpp"
#include "ecx/service.hpp"

namespace ecx::cli {
namespace {

namespace fs = std::filesystem;

constexpr const char* kDefaultData = "data/Placement_Data_Full_Class.csv";

struct Options {
  std::string data = kDefaultData;
  std::string schema;  // empty: bundled campus schema
  std::string model;
  std::string out;
  std::string chart_out;
  std::string labels;
  std::string state_dir = "ecx_state";
  std::string static_dir;
  std::string host = "127.0.0.1";
  std::string pool = "auto";
  std::string policy = "topz:2";
  std::uint64_t seed = 42;
  double train_fraction = 0.65;
  double alpha = 0.05;
  std::size_t k = 5;
  std::size_t rows = 10;
  int port = 8080;
  bool json_output = false;
  bool strict_labels = false;
  std::string item_a;
  std::string item_b;
};

FeatureSchema schema_for(const Options& o) { return o.schema.empty() ? campus_schema() : load_schema(o.schema); }

Dataset load_data(const Options& o) {
  if (!fs::exists(o.data)) {
    throw Error(ErrorCode::Io, "dataset not found: " + o.data +
                                   (o.data == kDefaultData
                                        ? " (download the Campus Recruitment CSV there, or pass --data)"
                                        : ""));
  }
  return load_csv(o.data, schema_for(o));
}

void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

// Items ranked by a trained model default to that model's holdout rows.
Dataset pool_for(const Options& o, const ModelDocument& doc, const Dataset& data) {
  const bool holdout = o.pool == "holdout" || (o.pool == "auto" && doc.training);
  if (!holdout) return data;
  if (!doc.training) throw Error(ErrorCode::InvalidSchema, "--pool holdout needs a model trained by `ecx train`");
  return subset_by_ids(data, doc.training->holdout_ids);
}

NarrationOptions narration_for(const Options& o) {
  NarrationOptions n;
  n.strict = o.strict_labels;
  if (!o.labels.empty()) n.labels = read_json_file(o.labels).get<LabelTable>();
  return n;
}

std::string model_summary(const FittedModel& model) {
  std::ostringstream s;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %10.4f %10.4f\n", "(intercept)", model.intercept, model.intercept_std_error);
  s << buf;
  for (std::size_t j = 0; j < model.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%-24s %10.4f %10.4f  p=%.3g\n", model.feature_names[j].c_str(),
                  model.coefficients[j], model.std_errors[j], model.p_values[j]);
    s << buf;
  }
  return s.str();
}

int cmd_train(const Options& o, std::ostream& out) {
  const Dataset data = load_data(o);
  ExperimentConfig config;
  config.seed = o.seed;
  config.train_fraction = o.train_fraction;
  config.alpha_level = o.alpha;
  config.k = o.k;
  const auto split = stratified_split(data, config.train_fraction, config.seed);
  const auto encoded = encode(data, split.train);
  const auto selection = backward_stepwise(select_rows(encoded, split.train), config.alpha_level, config.fit);

  TrainingInfo info{config.seed, config.train_fraction, config.alpha_level, {}, {}};
  for (auto i : split.train) info.train_ids.push_back(data.rows[i].id);
  for (auto i : split.holdout) info.holdout_ids.push_back(data.rows[i].id);
  const ModelDocument doc{selection.model, selection.trace, std::move(info)};

  const std::string path = o.out.empty() ? "model.json" : o.out;
  save_model(path, doc);
  out << "trained on " << split.train.size() << " rows, " << selection.trace.steps.size()
      << " stepwise removals, model written to " << path << "\n";
  out << model_summary(selection.model);
  return kExitOk;
}

int cmd_rank(const Options& o, std::ostream& out) {
  const ModelDocument doc = load_model(o.model);
  const Dataset pool = pool_for(o, doc, load_data(o));
  const RankedList list = rank(doc.model, pool, o.k);
  write_or_print(o.out, o.json_output ? json(list).dump(2) + "\n" : ranking_csv(list, doc.model, pool), out);
  return kExitOk;
}

int cmd_explain(const Options& o, std::ostream& out) {
  const ModelDocument doc = load_model(o.model);
  const Dataset pool = pool_for(o, doc, load_data(o));
  const RankedList list = rank(doc.model, pool, std::min(o.k, pool.n()));
  const ContrastReport report = contrast_pair(doc.model, list, pool, o.item_a, o.item_b, parse_policy(o.policy));
  const ExplanationText text =
      render_text(report, {"Candidate " + report.item_a, "Candidate " + report.item_b}, narration_for(o));
  const ChartData chart = render_chart_data(report);
  if (o.json_output) {
    out << json(ContrastBundle{report, text, chart}).dump(2) << "\n";
  } else {
    out << text.str() << "\n";
  }
  if (!o.chart_out.empty()) write_text_file(o.chart_out, json(chart).dump(2) + "\n");
  return kExitOk;
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  const Dataset data = load_data(o);
  ExperimentConfig config;
  config.seed = o.seed;
  config.train_fraction = o.train_fraction;
  config.alpha_level = o.alpha;
  config.k = o.k;
  config.policy = parse_policy(o.policy);
  const ExperimentResult result = run_experiment(data, config);
  write_or_print(o.out, experiment_report(result, data, o.rows), out);
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  std::optional<Session> session;
  if (Session::exists(o.state_dir)) {
    session = Session::open(o.state_dir);
    out << "resumed session in " << o.state_dir << " (" << session->decisions().size() << " decisions)\n";
  } else if (!o.model.empty()) {
    const ModelDocument doc = load_model(o.model);
    Dataset pool = pool_for(o, doc, load_data(o));
    session = Session::create(o.state_dir, doc, std::move(pool), o.k, parse_policy(o.policy));
    out << "new session in " << o.state_dir << "\n";
  } else {
    out << "no model loaded; data routes answer 409 until one is supplied with --model\n";
  }

  ServiceOptions options;
  options.host = o.host;
  options.port = o.port;
  if (!o.static_dir.empty()) options.static_dir = o.static_dir;
  options.narration = narration_for(o);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Service service(std::move(session), options);
  const int port = service.bind();
  if (port < 0) throw Error(ErrorCode::Io, "cannot bind " + o.host + ":" + std::to_string(o.port));
  out << "listening on http://" << o.host << ":" << port << std::endl;

  std::atomic<bool> signalled{false};
  std::thread waiter([&service, &signalled, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    signalled = true;
    service.stop();
  });
  service.listen_after_bind();
  // The server can also end on its own (socket error); wake the waiter then.
  if (!signalled) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return kExitOk;
}

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "Candidate CSV")->capture_default_str();
  cmd->add_option("--schema", o.schema, "Schema file (default: bundled campus schema)");
}

void add_model_options(CLI::App* cmd, Options& o, bool required) {
  auto* opt = cmd->add_option("--model", o.model, "Model JSON written by `train`");
  if (required) opt->required();
  cmd->add_option("--pool", o.pool, "Items to rank: auto, all or holdout")
      ->check(CLI::IsMember({"auto", "all", "holdout"}))
      ->capture_default_str();
  cmd->add_option("-k", o.k, "Top-k cut")->check(CLI::PositiveNumber)->capture_default_str();
}

const CLI::Validator kPolicy(
    [](const std::string& text) -> std::string {
      try {
        (void)parse_policy(text);
        return {};
      } catch (const Error& e) {
        return e.what();
      }
    },
    "POLICY");

void add_narration_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--policy", o.policy, "topz:<z>, cum:<tau> or mixed:<tau>,<m>")
      ->check(kPolicy)
      ->capture_default_str();
  cmd->add_option("--labels", o.labels, "Feature label table (JSON)");
  cmd->add_flag("--strict-labels", o.strict_labels, "Fail instead of falling back on unlabeled features");
}

void add_training_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Split seed")->capture_default_str();
  cmd->add_option("--train-fraction", o.train_fraction, "Stratified training share")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Stepwise significance level")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Contrastive explanations for ranked candidate lists", "ecx"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Fit the logistic model with backward stepwise selection");
  add_data_options(train, o);
  add_training_options(train, o);
  train->add_option("-o,--out", o.out, "Model JSON path (default model.json)");

  auto* rank_cmd = app.add_subcommand("rank", "Rank a candidate pool");
  add_data_options(rank_cmd, o);
  add_model_options(rank_cmd, o, true);
  rank_cmd->add_option("-o,--out", o.out, "Output path (default stdout)");
  rank_cmd->add_flag("--json", o.json_output, "Emit the ranked list as JSON instead of CSV");

  auto* explain = app.add_subcommand("explain", "Contrast two ranked candidates");
  explain->add_option("item_a", o.item_a, "First item id")->required();
  explain->add_option("item_b", o.item_b, "Second item id")->required();
  add_data_options(explain, o);
  add_model_options(explain, o, true);
  add_narration_options(explain, o);
  explain->add_option("--chart-out", o.chart_out, "Write chart data JSON here");
  explain->add_flag("--json", o.json_output, "Print report, text and chart data as one JSON document");

  auto* serve = app.add_subcommand("serve", "Run the HTTP review service");
  add_data_options(serve, o);
  add_model_options(serve, o, false);
  add_narration_options(serve, o);
  serve->add_option("--state", o.state_dir, "Session directory")->capture_default_str();
  serve->add_option("--static", o.static_dir, "Directory served at /");
  serve->add_option("--host", o.host)->capture_default_str();
  serve->add_option("--port", o.port)->check(CLI::Range(0, 65535))->capture_default_str();

  auto* reproduce = app.add_subcommand("reproduce", "Run the hiring experiment end to end and print a report");
  add_data_options(reproduce, o);
  add_training_options(reproduce, o);
  reproduce->add_option("-k", o.k, "Top-k cut")->check(CLI::PositiveNumber)->capture_default_str();
  reproduce->add_option("--policy", o.policy, "Selection policy for the boundary pair")
      ->check(kPolicy)
      ->capture_default_str();
  reproduce->add_option("--rows", o.rows, "Ranking rows to print")->capture_default_str();
  reproduce->add_option("-o,--out", o.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (argc > 1) err << "error: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(o, out);
    if (*rank_cmd) return cmd_rank(o, out);
    if (*explain) return cmd_explain(o, out);
    if (*serve) return cmd_serve(o, out);
    if (*reproduce) return cmd_reproduce(o, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitUsage;
}

}  // namespace ecx::cli
