#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "t2veval/alignment.hpp"
#include "t2veval/annotation.hpp"
#include "t2veval/backend_factory.hpp"
#include "t2veval/benchmark.hpp"
#include "t2veval/error.hpp"
#include "t2veval/media.hpp"
#include "t2veval/prompt_generation.hpp"
#include "t2veval/reporting.hpp"
#include "t2veval/suite.hpp"
#include "t2veval/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace t2veval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitPartial = 2;
constexpr int kExitUsage = 64;

void write_text(const std::optional<fs::path>& out, const std::string& text) {
  if (!out) {
    std::cout << text;
    return;
  }
  if (out->has_parent_path()) fs::create_directories(out->parent_path());
  std::ofstream f(*out, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + out->string());
  f << text;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

// Run configuration: file values first, then explicit flags on top.
struct RunArgs {
  std::vector<fs::path> model_dirs;
  fs::path benchmark;
  std::optional<fs::path> config;
  fs::path out;
  std::optional<std::string> sampling;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> metrics;
};

int cmd_run(const RunArgs& a) {
  json bindings = json::object();
  SuiteOptions opts;
  fs::path base = fs::current_path();
  if (a.config) {
    const json cfg = read_json_file(*a.config);
    if (!cfg.is_object()) throw ConfigError(a.config->string() + ": config must be an object");
    base = fs::absolute(*a.config).parent_path();
    for (const auto& [key, value] : cfg.items()) {
      try {
        if (key == "backends") bindings = value;
        else if (key == "metrics") opts.config = metric_config_from_json(value);
        else if (key == "metric_ids") opts.metrics = value.get<std::vector<std::string>>();
        else if (key == "required_metrics") opts.required_metrics = value.get<std::vector<std::string>>();
        else if (key == "sampling") opts.sampling = value.get<std::string>();
        else if (key == "seed") opts.seed = value.get<std::uint64_t>();
        else if (key == "workers") opts.workers = value.get<int>();
        else throw ConfigError(a.config->string() + ": unknown config key '" + key + "'");
      } catch (const json::exception& e) {
        throw ConfigError(a.config->string() + ": key '" + key + "': " + e.what());
      }
    }
  }
  if (a.sampling) opts.sampling = *a.sampling;
  if (a.workers) opts.workers = *a.workers;
  if (a.seed) opts.seed = *a.seed;
  if (!a.metrics.empty()) opts.metrics = a.metrics;
  if (opts.workers < 1) throw ConfigError("workers must be >= 1");
  for (const auto& id : opts.metrics)
    (void)metric_info(id);

  const FrameSamplingPolicy sampling = FrameSamplingPolicy::parse(opts.sampling);
  for (const auto& dir : a.model_dirs)
    if (!fs::is_directory(dir)) throw ConfigError("model directory not found: " + dir.string());
  const Benchmark benchmark = load_benchmark(a.benchmark);
  opts.benchmark_version = benchmark.version;
  // Fail on bad bindings before decoding anything.
  (void)make_registry(bindings, base);
  const RegistryFactory factory = [bindings, base] { return make_registry(bindings, base); };

  const bool single_file = a.model_dirs.size() == 1 && a.out.extension() == ".jsonl";
  bool partial = false;
  for (const auto& dir : a.model_dirs) {
    IngestResult ingested = ingest(dir, benchmark, sampling, opts.workers);
    spdlog::info("{}: {} videos decoded, {} missing, {} undecodable", ingested.set.model_id,
                 ingested.set.items.size(), ingested.missing.size(), ingested.errors.size());
    SuiteResult result = run_suite(ingested.set, factory, opts);
    attach_ingest(result, ingested);
    const fs::path target = single_file ? a.out : a.out / (result.meta.model_id + ".jsonl");
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    save_suite(target, result);
    for (const auto& s : result.skipped) spdlog::warn("{}: skipped {}: {}", result.meta.model_id, s.metric_id, s.reason);
    for (const auto& e : result.errors)
      spdlog::warn("{}: {} on {}: {}", result.meta.model_id, e.metric_id, e.prompt_id, e.message);
    partial = partial || result.partial();
    spdlog::info("wrote {}", target.string());
  }
  return partial ? kExitPartial : kExitOk;
}

std::vector<AspectLabel> labels_from(const fs::path& ratings) { return aggregate_ratings(load_ratings(ratings)); }

int cmd_fit(const fs::path& ratings, const fs::path& results, std::uint64_t seed, std::size_t train,
            std::size_t holdout, const std::optional<fs::path>& out) {
  FitOptions opts;
  opts.seed = seed;
  opts.train = train;
  opts.holdout = holdout;
  const AlignmentModel model = fit_alignment(labels_from(ratings), load_suite_dir(results), opts);
  write_text(out, to_json(model).dump(2) + "\n");
  return kExitOk;
}

int cmd_correlate(const fs::path& model_path, const fs::path& ratings, const fs::path& results,
                  const std::string& format, const std::optional<fs::path>& out) {
  const AlignmentModel model = load_alignment(model_path);
  const CorrelationReport report = evaluate_alignment(model, labels_from(ratings), load_suite_dir(results));
  if (format == "json") write_text(out, to_json(report).dump(2) + "\n");
  else write_text(out, to_markdown(report));
  return kExitOk;
}

struct ReportArgs {
  fs::path results_dir;
  std::optional<fs::path> ratings;
  std::optional<fs::path> alignment;
  std::optional<fs::path> final_scores;
  std::optional<fs::path> benchmark;
  std::optional<fs::path> out;
  std::string format = "md";
  std::string group_by = "none";
  std::uint64_t seed = 0;
  bool paper_scale = false;
};

int cmd_report(const ReportArgs& a) {
  const ExportFormat format = parse_export_format(a.format);
  const auto group = parse_group_by(a.group_by);
  if (!group) throw ConfigError("unknown --group-by '" + a.group_by + "' (expected none|meta|subtype)");
  const auto suites = load_suite_dir(a.results_dir);
  if (suites.empty()) throw ConfigError("no result files in " + a.results_dir.string());

  std::vector<FinalScore> scores;
  if (a.final_scores) {
    scores = load_final_scores(*a.final_scores);
  } else if (a.ratings) {
    const auto labels = labels_from(*a.ratings);
    AlignmentModel model;
    if (a.alignment) {
      model = load_alignment(*a.alignment);
    } else {
      FitOptions opts;
      opts.seed = a.seed;
      model = fit_alignment(labels, suites, opts);
    }
    scores = apply_alignment(model, suites, labels);
  }

  std::string text = export_leaderboard(build_leaderboard(suites, scores, a.paper_scale), format);
  if (*group != GroupBy::none) {
    if (!a.benchmark) throw ConfigError("--group-by needs --benchmark");
    const RadarData radar = build_breakdown(suites, load_benchmark(*a.benchmark), *group);
    if (format == ExportFormat::json) {
      json doc = {{"leaderboard", json::parse(text)}, {"breakdown", to_json(radar)}};
      text = doc.dump(2) + "\n";
    } else {
      text += "\n" + export_radar(radar, format);
    }
  }
  write_text(a.out, text);
  return kExitOk;
}

AnnotationServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const fs::path& study_path, const fs::path& log, const std::string& host, int port,
              const std::optional<fs::path>& static_dir) {
  AnnotationStore store(Study::load(study_path), log);
  ServerOptions opts;
  opts.host = host;
  opts.port = port;
  opts.static_dir = static_dir;
  AnnotationServer server(store, opts);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  spdlog::info("serving study '{}' ({} items) on {}:{}", store.study().study_id, store.study().items.size(), host, port);
  server.run();
  g_server = nullptr;
  return kExitOk;
}

int cmd_generate(const std::string& meta, int n, const std::optional<fs::path>& recorded,
                 const std::optional<fs::path>& out) {
  const auto mc = parse_meta_class(meta);
  if (!mc) throw ConfigError("unknown meta class '" + meta + "'");
  std::unique_ptr<LlmClient> client;
  if (recorded) client = std::make_unique<RecordedLlmClient>(*recorded);
  else client = HttpLlmClient::from_environment();
  const auto candidates = generate_prompts(*mc, n, *client);
  std::ostringstream s;
  std::size_t accepted = 0;
  for (const auto& c : candidates) {
    s << to_json(c).dump() << '\n';
    accepted += c.accepted ? 1 : 0;
  }
  write_text(out, s.str());
  spdlog::info("{} of {} candidates passed the self-check", accepted, candidates.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_st("t2veval"));
  spdlog::set_pattern("%^%l%$: %v");

  CLI::App app{"Text-to-video evaluation harness"};
  app.require_subcommand(0, 1);
  bool show_version = false;
  bool verbose = false;
  app.add_flag("--version", show_version, "Print harness and schema versions");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  fs::path bench_path;
  auto* validate = app.add_subcommand("validate-benchmark", "Check a benchmark file");
  validate->add_option("path", bench_path)->required();

  bool stats_json = false;
  auto* stats = app.add_subcommand("stats", "Prompt statistics for a benchmark file");
  stats->add_option("path", bench_path)->required();
  stats->add_flag("--json", stats_json, "Emit JSON instead of text");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Evaluate generated videos");
  run->add_option("--model-dir", run_args.model_dirs, "Directory of <prompt_id>.<ext> videos (repeatable)")->required();
  run->add_option("--benchmark", run_args.benchmark)->required();
  run->add_option("--config", run_args.config, "Backend bindings and metric config (JSON)");
  run->add_option("--out", run_args.out, "Results directory, or a .jsonl file for a single model")->required();
  run->add_option("--sampling", run_args.sampling, "all | uniform:K");
  run->add_option("--workers", run_args.workers);
  run->add_option("--seed", run_args.seed);
  run->add_option("--metric", run_args.metrics, "Restrict to these metric ids (repeatable)");

  fs::path ratings_path, results_path, model_path;
  std::optional<fs::path> out_path;
  std::uint64_t seed = 0;
  std::size_t train = 300, holdout = 200;
  auto* fit = app.add_subcommand("fit-alignment", "Fit per-aspect regressions to human ratings");
  fit->add_option("--ratings", ratings_path)->required();
  fit->add_option("--results", results_path, "Directory of result files")->required();
  fit->add_option("--seed", seed);
  fit->add_option("--train", train);
  fit->add_option("--holdout", holdout);
  fit->add_option("--out", out_path);

  std::string corr_format = "md";
  auto* corr = app.add_subcommand("correlate", "Holdout rank correlations of metrics and fitted model");
  corr->add_option("--model", model_path)->required();
  corr->add_option("--ratings", ratings_path)->required();
  corr->add_option("--results", results_path)->required();
  corr->add_option("--format", corr_format)->check(CLI::IsMember({"md", "json"}));
  corr->add_option("--out", out_path);

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Leaderboard and per-category breakdown");
  report->add_option("--results-dir", report_args.results_dir)->required();
  auto* opt_ratings = report->add_option("--ratings", report_args.ratings);
  report->add_option("--alignment", report_args.alignment, "Fitted model; fitted on the fly when omitted")
      ->needs(opt_ratings);
  report->add_option("--final-scores", report_args.final_scores)->excludes(opt_ratings);
  report->add_option("--benchmark", report_args.benchmark, "Needed for --group-by meta|subtype");
  report->add_option("--format", report_args.format, "md | csv | json");
  report->add_option("--group-by", report_args.group_by, "none | meta | subtype");
  report->add_option("--seed", report_args.seed);
  report->add_flag("--paper-scale", report_args.paper_scale, "Show percentage metrics x100");
  report->add_option("--out", report_args.out);

  fs::path study_path, log_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::optional<fs::path> static_dir;
  auto* serve = app.add_subcommand("serve-annotation", "Serve the rating study over HTTP");
  serve->add_option("--study", study_path)->required();
  serve->add_option("--log", log_path, "Append-only rating log")->required();
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--static", static_dir, "Directory served at /");

  std::string meta_class;
  int count = 10;
  std::optional<fs::path> recorded;
  auto* gen = app.add_subcommand("generate-prompts", "Draft prompts through a language model with self-check");
  gen->add_option("--meta-class", meta_class)->required();
  gen->add_option("-n,--count", count);
  gen->add_option("--recorded", recorded, "Replay responses from this directory instead of calling the endpoint");
  gen->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (verbose) spdlog::set_level(spdlog::level::debug);

  if (show_version) {
    std::cout << "t2veval " << kHarnessVersion << "\nbenchmark schema " << kBenchmarkSchemaVersion
              << "\nsuite schema " << kSuiteSchemaVersion << "\n";
    return kExitOk;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return kExitUsage;
  }

  try {
    if (*validate) {
      const Benchmark b = load_benchmark(bench_path);
      std::cout << bench_path.string() << ": " << b.records.size() << " records OK\n";
      return kExitOk;
    }
    if (*stats) {
      const StatsReport s = benchmark_stats(load_benchmark(bench_path));
      if (stats_json) {
        std::cout << to_json(s).dump(2) << "\n";
      } else {
        std::cout << "prompts: " << s.total << "\nmean words: " << s.mean_words << "\n";
        for (const auto& [m, n] : s.per_meta_class) std::cout << "meta " << to_string(m) << ": " << n << "\n";
        for (const auto& [t, n] : s.per_sub_type) std::cout << "sub-type " << to_string(t) << ": " << n << "\n";
        const auto& at = s.attributes;
        std::cout << "with objects: " << at.with_objects << "\nwith counts: " << at.with_counts
                  << "\nwith colors: " << at.with_colors << "\nwith celebrity: " << at.with_celebrity
                  << "\nwith text: " << at.with_render_text << "\nwith action: " << at.with_action
                  << "\nwith amplitude: " << at.with_amplitude << "\n";
      }
      return kExitOk;
    }
    if (*run) return cmd_run(run_args);
    if (*fit) return cmd_fit(ratings_path, results_path, seed, train, holdout, out_path);
    if (*corr) return cmd_correlate(model_path, ratings_path, results_path, corr_format, out_path);
    if (*report) return cmd_report(report_args);
    if (*serve) return cmd_serve(study_path, log_path, host, port, static_dir);
    if (*gen) return cmd_generate(meta_class, count, recorded, out_path);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
