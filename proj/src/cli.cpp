// Copyright 2026 The Trilingua Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trilingua/cli.hpp"

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "trilingua/config.hpp"
#include "trilingua/corpus.hpp"
#include "trilingua/eval.hpp"
#include "trilingua/metrics.hpp"
#include "trilingua/mockserve.hpp"
#include "trilingua/pipeline.hpp"

namespace trilingua {

namespace {

using nlohmann::ordered_json;

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested.store(true); }

struct RunArgs {
  std::string corpus;
  std::string config;
  std::string out;
  std::string mock;
  std::string checkpoint;
  std::size_t parallelism = 0;
  std::size_t stop_after = 0;
};

struct EvalArgs {
  std::string pred;
  std::string gold;
  std::string embed_endpoint;
  std::string out;
  std::string per_record;
};

struct ReportArgs {
  std::string judgments;
  std::string scores;
  std::string out;
  std::string format = "markdown";
  std::string ties = "loss";
};

struct ServeArgs {
  std::string behavior = "identity";
  int port = 0;
  std::string host = "127.0.0.1";
};

// Error summary written to stdout under --json; the message also goes to stderr.
int fail(std::ostream& out, std::ostream& err, bool json, std::string_view command, int code,
         const std::string& message) {
  err << "error: " << message << "\n";
  if (json) {
    ordered_json j;
    j["command"] = command;
    j["ok"] = false;
    j["exit_code"] = code;
    j["error"] = message;
    out << j.dump() << "\n";
  }
  return code;
}

PipelineConfig resolve_config(const RunArgs& a) {
  std::string path = a.config;
  if (path.empty()) {
    if (const char* env = std::getenv("TRILINGUA_CONFIG"); env && *env) {
      path = env;
    }
  }
  PipelineConfig cfg;
  if (!path.empty()) {
    cfg = load_config(path);
  }
  if (!a.mock.empty()) {
    cfg.mock = resolve_behavior(a.mock);
  }
  if (a.parallelism > 0) {
    cfg.parallelism = a.parallelism;
  }
  if (!a.checkpoint.empty()) {
    cfg.checkpoint_path = a.checkpoint;
  }
  return cfg;
}

int cmd_run(const RunArgs& a, bool json, std::ostream& out, std::ostream& err) {
  PipelineConfig cfg;
  try {
    cfg = resolve_config(a);
  } catch (const std::exception& e) {
    return fail(out, err, json, "run", kExitUsage, e.what());
  }
  try {
    std::unique_ptr<MockServer> mock;
    if (cfg.mock) {
      mock = std::make_unique<MockServer>(*cfg.mock);
      cfg.point_all_endpoints_at(mock->base_url());
    }
    cfg.validate(false);
    Pipeline pipeline(cfg);
    RunOptions options;
    if (a.stop_after > 0) {
      options.stop_after = a.stop_after;
    }
    const RunSummary summary = pipeline.run_corpus(a.corpus, a.out, options);
    if (json) {
      ordered_json j;
      j["command"] = "run";
      j["ok"] = true;
      j["exit_code"] = 0;
      j["processed"] = summary.processed;
      j["skipped"] = summary.skipped;
      j["failed"] = summary.failed;
      j["out"] = a.out;
      out << j.dump() << "\n";
    } else {
      err << "processed " << summary.processed << ", skipped " << summary.skipped << ", failed "
          << summary.failed << "\n";
    }
    return kExitOk;
  } catch (const CorpusError& e) {
    return fail(out, err, json, "run", kExitCorpus, e.what());
  } catch (const std::exception& e) {
    return fail(out, err, json, "run", kExitRuntime, e.what());
  }
}

int cmd_validate(const std::string& corpus, bool json, std::ostream& out, std::ostream& err) {
  try {
    const auto records = load_corpus(corpus);
    if (json) {
      ordered_json j;
      j["command"] = "validate";
      j["ok"] = true;
      j["exit_code"] = 0;
      j["records"] = records.size();
      out << j.dump() << "\n";
    } else {
      err << records.size() << " records ok\n";
    }
    return kExitOk;
  } catch (const CorpusError& e) {
    return fail(out, err, json, "validate", kExitCorpus, e.what());
  } catch (const std::exception& e) {
    return fail(out, err, json, "validate", kExitRuntime, e.what());
  }
}

int cmd_eval(const EvalArgs& a, bool json, std::ostream& out, std::ostream& err) {
  try {
    const auto preds = load_results(a.pred);
    const auto gold = load_gold(a.gold);
    std::optional<BackendClient> embedder;
    if (!a.embed_endpoint.empty()) {
      BackendEndpoint ep;
      ep.role = BackendRole::embed;
      ep.base_url = a.embed_endpoint;
      ep.validate();
      embedder.emplace(ep);
    }
    const auto report = evaluate(preds, gold, embedder ? &*embedder : nullptr);
    if (!a.out.empty()) {
      write_scores(a.out, report.rows);
    }
    if (!a.per_record.empty()) {
      std::ofstream per(a.per_record, std::ios::binary | std::ios::trunc);
      if (!per) {
        throw IoError(a.per_record, "cannot open for writing");
      }
      for (const auto& item : report.items) {
        per << eval_item_to_json_line(item) << "\n";
      }
    }
    if (json) {
      ordered_json j;
      j["command"] = "eval";
      j["ok"] = true;
      j["exit_code"] = 0;
      j["items"] = report.items.size();
      j["missing"] = report.missing;
      j["rows"] = ordered_json::array();
      for (const auto& row : report.rows) {
        j["rows"].push_back(ordered_json::parse(score_to_json_line(row)));
      }
      out << j.dump() << "\n";
    } else if (a.out.empty()) {
      for (const auto& row : report.rows) {
        out << score_to_json_line(row) << "\n";
      }
    }
    return kExitOk;
  } catch (const CorpusError& e) {
    return fail(out, err, json, "eval", kExitCorpus, e.what());
  } catch (const std::exception& e) {
    return fail(out, err, json, "eval", kExitRuntime, e.what());
  }
}

int cmd_report(const ReportArgs& a, bool json, std::ostream& out, std::ostream& err) {
  ReportOptions options;
  options.format = a.format == "plain" ? ReportFormat::plain : ReportFormat::markdown;
  options.ties = a.ties == "exclude" ? TieRule::exclude : TieRule::count_as_loss;
  try {
    std::vector<Judgment> judgments;
    std::vector<ScoreRow> scores;
    if (!a.judgments.empty()) {
      judgments = load_judgments(a.judgments);
    }
    if (!a.scores.empty()) {
      scores = load_scores(a.scores);
    }
    const std::string text = render_report(judgments, scores, options);
    if (a.out.empty()) {
      if (json) {
        ordered_json j;
        j["command"] = "report";
        j["ok"] = true;
        j["exit_code"] = 0;
        j["report"] = text;
        out << j.dump() << "\n";
      } else {
        out << text;
      }
    } else {
      std::ofstream f(a.out, std::ios::binary | std::ios::trunc);
      if (!f) {
        throw IoError(a.out, "cannot open for writing");
      }
      f << text;
      if (json) {
        ordered_json j;
        j["command"] = "report";
        j["ok"] = true;
        j["exit_code"] = 0;
        j["out"] = a.out;
        out << j.dump() << "\n";
      }
    }
    return kExitOk;
  } catch (const CorpusError& e) {
    return fail(out, err, json, "report", kExitCorpus, e.what());
  } catch (const std::exception& e) {
    return fail(out, err, json, "report", kExitRuntime, e.what());
  }
}

int cmd_serve(const ServeArgs& a, bool json, std::ostream& out, std::ostream& err) {
  MockBehavior behavior;
  try {
    behavior = resolve_behavior(a.behavior);
  } catch (const std::exception& e) {
    return fail(out, err, json, "serve-mock", kExitUsage, e.what());
  }
  try {
    g_stop_requested.store(false);
    auto prev_int = std::signal(SIGINT, on_stop_signal);
    auto prev_term = std::signal(SIGTERM, on_stop_signal);
    MockServer server(behavior, a.port, a.host);
    if (json) {
      ordered_json j;
      j["command"] = "serve-mock";
      j["ok"] = true;
      j["base_url"] = server.base_url();
      j["port"] = server.port();
      out << j.dump() << std::endl;
    } else {
      out << "listening on " << server.base_url() << std::endl;
    }
    while (!g_stop_requested.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    server.stop();
    std::signal(SIGINT, prev_int);
    std::signal(SIGTERM, prev_term);
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(out, err, json, "serve-mock", kExitRuntime, e.what());
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Translate-generate-translate pipeline over multilingual dialogues", "trilingua"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "Machine-readable summary on stdout");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the pipeline over a corpus");
  run_cmd->add_option("--corpus", run.corpus, "Corpus JSONL")->required();
  run_cmd->add_option("--config", run.config, "Config JSON (falls back to $TRILINGUA_CONFIG)");
  run_cmd->add_option("--out", run.out, "Results JSONL")->required();
  run_cmd->add_option("--mock", run.mock, "Serve all roles from an in-process mock (preset, JSON or file)");
  run_cmd->add_option("--parallelism", run.parallelism, "Records in flight")->check(CLI::PositiveNumber);
  run_cmd->add_option("--checkpoint", run.checkpoint, "Checkpoint path (default <out>.checkpoint)");
  run_cmd->add_option("--stop-after", run.stop_after, "Stop after N records, leaving a resumable checkpoint")
      ->check(CLI::PositiveNumber);
  run_cmd->add_flag("--json", json);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score predictions against references");
  eval_cmd->add_option("--pred", ev.pred, "Results JSONL")->required();
  eval_cmd->add_option("--gold", ev.gold, "Reference JSONL")->required();
  eval_cmd->add_option("--embed-endpoint", ev.embed_endpoint, "Embedding backend base URL");
  eval_cmd->add_option("--out", ev.out, "Aggregate scores JSONL");
  eval_cmd->add_option("--per-record", ev.per_record, "Per-item scores JSONL");
  eval_cmd->add_flag("--json", json);

  ReportArgs rep;
  auto* report_cmd = app.add_subcommand("report", "Render win-rate and metric tables");
  report_cmd->add_option("--judgments", rep.judgments, "Judgments JSONL");
  report_cmd->add_option("--scores", rep.scores, "Scores JSONL");
  report_cmd->add_option("--out", rep.out, "Write the report here instead of stdout");
  report_cmd->add_option("--format", rep.format, "markdown or plain")
      ->check(CLI::IsMember({"markdown", "plain"}));
  report_cmd->add_option("--ties", rep.ties, "loss or exclude")->check(CLI::IsMember({"loss", "exclude"}));
  report_cmd->add_flag("--json", json);

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve-mock", "Serve a deterministic mock backend");
  serve_cmd->add_option("--behavior", serve.behavior, "Preset name, inline JSON or file");
  serve_cmd->add_option("--port", serve.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_flag("--json", json);

  std::string validate_corpus;
  auto* validate_cmd = app.add_subcommand("validate", "Check a corpus without running it");
  validate_cmd->add_option("--corpus", validate_corpus, "Corpus JSONL")->required();
  validate_cmd->add_flag("--json", json);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  if (run_cmd->parsed()) {
    return cmd_run(run, json, out, err);
  }
  if (eval_cmd->parsed()) {
    return cmd_eval(ev, json, out, err);
  }
  if (report_cmd->parsed()) {
    if (rep.judgments.empty() && rep.scores.empty()) {
      return fail(out, err, json, "report", kExitUsage, "report needs --judgments and/or --scores");
    }
    return cmd_report(rep, json, out, err);
  }
  if (serve_cmd->parsed()) {
    return cmd_serve(serve, json, out, err);
  }
  return cmd_validate(validate_corpus, json, out, err);
}

}  // namespace trilingua
