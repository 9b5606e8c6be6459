#include "sqlpbe/cli.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sqlpbe/disambiguator.hpp"
#include "sqlpbe/fuzzy_eval.hpp"
#include "sqlpbe/service.hpp"
#include "sqlpbe/sql.hpp"
#include "sqlpbe/synthesizer.hpp"

namespace sqlpbe::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct SynthFlags {
  std::size_t workers = 1;
  double timeout = 60;
  std::string mode = "first";
  std::uint64_t seed = 0;
  std::string ratio = "1:2";
  bool deterministic = false;
  std::size_t max_size = 0;
};

void add_synth_flags(CLI::App* app, SynthFlags& f) {
  app->add_option("--workers", f.workers, "Worker threads")->check(CLI::PositiveNumber);
  app->add_option("--timeout", f.timeout, "Time limit in seconds")->check(CLI::NonNegativeNumber);
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--ratio", f.ratio, "Workers on sequences with inner or cross joins to those without, F:B");
  app->add_flag("--deterministic", f.deterministic, "Single thread, reproducible for a seed");
  app->add_option("--max-size", f.max_size, "Largest program size (0 grows until the time limit)");
}

SynthesisOptions to_options(const SynthFlags& f) {
  SynthesisOptions o;
  o.workers = f.workers;
  o.time_limit = std::chrono::milliseconds(static_cast<std::int64_t>(f.timeout * 1000));
  o.mode = f.mode == "all" ? SearchMode::All : SearchMode::First;
  o.seed = f.seed;
  o.deterministic = f.deterministic;
  o.max_size = f.max_size;
  const auto colon = f.ratio.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(f.ratio);
    o.ratio_f = std::stoul(f.ratio.substr(0, colon));
    o.ratio_b = std::stoul(f.ratio.substr(colon + 1));
  } catch (const std::exception&) {
    throw CLI::ValidationError("--ratio", "expected F:B, got " + f.ratio);
  }
  if (o.ratio_f == 0 || o.ratio_b == 0) throw CLI::ValidationError("--ratio", "both parts must be positive");
  return o;
}

json solution_json(const Solution& s) {
  return json{{"sql", s.sql}, {"program", to_string(s.program)}, {"elapsed", s.elapsed_seconds}};
}

int cmd_synth(const std::string& manifest, const SynthFlags& flags, bool as_json) {
  const Instance inst = load_instance(manifest);
  const SynthesisResult r = synthesize(inst, to_options(flags));
  json solutions = json::array();
  for (const auto& s : r.solutions) solutions.push_back(solution_json(s));
  if (as_json) {
    std::cout << json{{"instance", inst.id},
                      {"status", std::string(to_string(r.status))},
                      {"elapsed", r.elapsed_seconds},
                      {"programs", r.stats.programs},
                      {"cubes", r.stats.cubes},
                      {"solutions", solutions}}
                     .dump(2)
              << '\n';
  } else if (flags.mode == "all") {
    // Timings would make deterministic runs differ, so they are left out there.
    for (const auto& s : r.solutions) {
      if (flags.deterministic) {
        std::cout << s.sql << '\n';
      } else {
        std::cout << fmt::format("[{:.3f}s] {}\n", s.elapsed_seconds, s.sql);
      }
    }
  } else if (!r.solutions.empty()) {
    std::cout << r.solutions.front().sql << '\n';
  }
  if (r.solutions.empty()) {
    spdlog::warn("no solution: {}", to_string(r.status));
    return kTimeout;
  }
  return kOk;
}

/// Prints each question and reads y/n; q or end of input quits.
class PromptOracle : public Oracle {
 public:
  PromptOracle(std::istream& in, std::ostream& out, bool echo) : in_(in), out_(out), echo_(echo) {}

  Answer answer(const Database& input, const Table& output) override {
    out_ << "\nFor this input:\n";
    for (const auto& t : input) out_ << t.name << "\n" << t.table->render();
    out_ << "\nis this the output you expect?\n" << output.render();
    for (;;) {
      out_ << "[y/n/q] " << std::flush;
      std::string line;
      if (!std::getline(in_, line)) throw OracleAbort("end of input");
      line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
      if (echo_) out_ << line << '\n';
      if (line == "y" || line == "yes") return Answer::Yes;
      if (line == "n" || line == "no") return Answer::No;
      if (line == "q" || line == "quit") throw OracleAbort("user quit");
    }
  }

 private:
  std::istream& in_;
  std::ostream& out_;
  bool echo_;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw MissingTable("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct DisambiguateFlags {
  std::size_t rounds = 16;
  std::string oracle = "interactive";
  std::string answers;
  bool json_output = false;
};

int cmd_disambiguate(const std::string& manifest, SynthFlags synth, const DisambiguateFlags& flags) {
  const Instance inst = load_instance(manifest);
  std::unique_ptr<Oracle> oracle;
  std::ifstream answers;
  if (flags.oracle == "interactive") {
    if (!flags.answers.empty()) {
      answers.open(flags.answers);
      if (!answers) throw MissingTable("cannot read " + flags.answers);
      oracle = std::make_unique<PromptOracle>(answers, std::cerr, true);
    } else {
      oracle = std::make_unique<PromptOracle>(std::cin, std::cerr, false);
    }
  } else if (flags.oracle == "groundtruth") {
    if (!inst.ground_truth) throw ParseError("manifest has no ground truth");
    oracle = std::make_unique<GroundTruthOracle>(Query::sql(*inst.ground_truth));
  } else if (flags.oracle.rfind("groundtruth=", 0) == 0) {
    oracle = std::make_unique<GroundTruthOracle>(Query::sql(read_text(flags.oracle.substr(12))));
  } else {
    throw CLI::ValidationError("--oracle", "expected interactive, groundtruth or groundtruth=PATH");
  }

  synth.mode = "all";
  const std::vector<Query> candidates = collect_candidates(inst, to_options(synth));
  if (candidates.empty()) {
    spdlog::warn("no candidate query found");
    return kTimeout;
  }
  DisambiguationOptions o;
  o.rounds = flags.rounds;
  o.seed = synth.seed;
  const DisambiguationResult r = disambiguate(candidates, inst.inputs, inst.foreign_keys, *oracle, o);
  const std::string sql = r.query.to_sql(inst.inputs);
  if (flags.json_output) {
    std::cout << json{{"instance", inst.id},
                      {"candidates", candidates.size()},
                      {"sql", sql},
                      {"question_count", r.log.size()},
                      {"aborted", r.aborted},
                      {"log", log_to_json(r.log)}}
                     .dump(2)
              << '\n';
  } else {
    std::cout << sql << '\n' << "candidates: " << candidates.size() << ", questions: " << r.log.size() << '\n';
  }
  return r.aborted ? kOracleAbort : kOk;
}

std::vector<fs::path> find_manifests(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) throw MissingTable("not a directory: " + dir.string());
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() == "manifest.json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_bench(const std::string& dir, const SynthFlags& synth, std::size_t rounds, const std::string& report_path) {
  std::ofstream report;
  if (!report_path.empty()) {
    report.open(report_path);
    if (!report) throw MissingTable("cannot write " + report_path);
  }
  std::size_t total = 0, solved = 0;
  std::map<VerdictKind, std::size_t> counts;
  for (const auto& manifest : find_manifests(dir)) {
    ++total;
    Instance inst;
    try {
      inst = load_instance(manifest);
    } catch (const Error& e) {
      spdlog::error("{}: {}", manifest.string(), e.what());
      continue;
    }
    const SynthesisResult r = synthesize(inst, to_options(synth));
    ReportLine line{inst.id, EvalVerdict{}, r.elapsed_seconds, {}};
    if (r.solutions.empty()) {
      line.verdict.detail = std::string("unsolved: ") + std::string(to_string(r.status));
    } else {
      ++solved;
      const Solution& s = r.solutions.front();
      line.sql = s.sql;
      if (inst.ground_truth) {
        FuzzyCheckOptions fo;
        fo.rounds = rounds;
        fo.seed = synth.seed;
        line.verdict = fuzzy_check(Query::program(s.program, s.projection), Query::sql(*inst.ground_truth), inst, fo);
        ++counts[line.verdict.kind];
      } else {
        line.verdict.detail = "no ground truth";
      }
    }
    spdlog::info("{}: {} {}", inst.id, to_string(r.status), to_string(line.verdict.kind));
    if (report) report << to_json(line).dump() << '\n';
  }
  std::cout << fmt::format("{:<22}{:>6}\n", "Instances", total);
  std::cout << fmt::format("{:<22}{:>6}\n", "Solved", solved);
  std::cout << fmt::format("{:<22}{:>6}\n", "Possibly Correct", counts[VerdictKind::PossiblyCorrect]);
  std::cout << fmt::format("{:<22}{:>6}\n", "Incorrect by Fuzzing", counts[VerdictKind::IncorrectByFuzzing]);
  std::cout << fmt::format("{:<22}{:>6}\n", "Inconclusive", counts[VerdictKind::Inconclusive]);
  std::cout << fmt::format("{:<22}{:>6}\n", "Execution Error", counts[VerdictKind::ExecutionError]);
  return kOk;
}

int cmd_serve(const std::string& host, int port) {
  SessionManager sessions;
  httplib::Server server;
  install_routes(server, sessions);
  spdlog::info("listening on {}:{}", host, port);
  if (!server.listen(host, port)) {
    spdlog::error("cannot listen on {}:{}", host, port);
    return kInvalidInput;
  }
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("sqlpbe"));
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"SQL query synthesis from input-output examples"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  std::string manifest;
  SynthFlags synth;
  bool json_output = false;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize queries for an instance");
  synth_cmd->add_option("manifest", manifest, "Instance manifest")->required();
  add_synth_flags(synth_cmd, synth);
  synth_cmd->add_option("--mode", synth.mode, "first or all")->check(CLI::IsMember({"first", "all"}));
  synth_cmd->add_flag("--json", json_output, "Print a JSON report");

  DisambiguateFlags dis;
  SynthFlags dis_synth;
  dis_synth.timeout = 10;
  auto* dis_cmd = app.add_subcommand("disambiguate", "Synthesize candidates and ask which one is meant");
  dis_cmd->add_option("manifest", manifest, "Instance manifest")->required();
  add_synth_flags(dis_cmd, dis_synth);
  dis_cmd->add_option("--rounds", dis.rounds, "Fuzzed inputs per question")->check(CLI::PositiveNumber);
  dis_cmd->add_option("--oracle", dis.oracle, "interactive, groundtruth or groundtruth=PATH");
  dis_cmd->add_option("--answers", dis.answers, "Read interactive answers from a file");
  dis_cmd->add_flag("--json", dis.json_output, "Print a JSON report");

  std::string bench_dir;
  SynthFlags bench_synth;
  bench_synth.timeout = 60;
  std::size_t bench_rounds = 16;
  std::string report;
  auto* bench_cmd = app.add_subcommand("bench", "Run every manifest under a directory and check the results");
  bench_cmd->add_option("dir", bench_dir, "Benchmark directory")->required();
  add_synth_flags(bench_cmd, bench_synth);
  bench_cmd->add_option("--rounds", bench_rounds, "Fuzzing rounds per check")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--report", report, "Write JSON lines here");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve disambiguation sessions over HTTP");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--host", host, "Address to bind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalidInput;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    if (*synth_cmd) return cmd_synth(manifest, synth, json_output);
    if (*dis_cmd) return cmd_disambiguate(manifest, dis_synth, dis);
    if (*bench_cmd) return cmd_bench(bench_dir, bench_synth, bench_rounds, report);
    if (*serve_cmd) return cmd_serve(host, port);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kInvalidInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace sqlpbe::cli
