// ranklab: command-line front end over the header-only toolkit.
// One subcommand per analysis; every report carries a provenance header
// (toolkit version, effective configuration, input digests). Seeds are
// always explicit flags: there is no environment fallback.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <ranklab.hpp>

namespace {

using namespace ranklab;

struct LoadedFile {
  std::string path;
  std::string bytes;
};

LoadedFile read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError("cannot open '" + path + "'");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path + "'");
  return LoadedFile{path, bytes.str()};
}

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

// Parse wrappers prefix the originating file so diagnostics stay usable
// when several inputs are in play. ParseError text already names the line.
Run load_run(const LoadedFile& file) {
  std::istringstream in(file.bytes);
  try {
    return parse_run(in);
  } catch (const ParseError& e) {
    throw ParseError(file.path + ": " + e.what());
  } catch (const IntegrityError& e) {
    throw IntegrityError(file.path + ": " + e.what());
  }
}

Qrels load_qrels(const LoadedFile& file, std::string scheme_id) {
  std::istringstream in(file.bytes);
  try {
    return parse_qrels(in, std::move(scheme_id));
  } catch (const ParseError& e) {
    throw ParseError(file.path + ": " + e.what());
  } catch (const IntegrityError& e) {
    throw IntegrityError(file.path + ": " + e.what());
  }
}

LeaderboardManifest load_manifest(const LoadedFile& file) {
  std::istringstream in(file.bytes);
  try {
    return parse_manifest(in);
  } catch (const ParseError& e) {
    throw ParseError(file.path + ": " + e.what());
  } catch (const IntegrityError& e) {
    throw IntegrityError(file.path + ": " + e.what());
  }
}

QueryPartition load_partition(const LoadedFile& file) {
  std::istringstream in(file.bytes);
  try {
    return parse_partition(in);
  } catch (const ParseError& e) {
    throw ParseError(file.path + ": " + e.what());
  } catch (const IntegrityError& e) {
    throw IntegrityError(file.path + ": " + e.what());
  }
}

// Scores file: one "run_id,score" pair per line, '#' comments and blank
// lines ignored.
std::map<std::string, double> load_scores(const LoadedFile& file) {
  std::map<std::string, double> scores;
  std::istringstream in(file.bytes);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(file.path + ": line " + std::to_string(line_no) +
                       ": expected 'run_id,score'");
    }
    const std::string run_id = line.substr(0, comma);
    char* end = nullptr;
    const std::string value = line.substr(comma + 1);
    const double score = std::strtod(value.c_str(), &end);
    if (run_id.empty() || end == value.c_str() || *end != '\0') {
      throw ParseError(file.path + ": line " + std::to_string(line_no) +
                       ": expected 'run_id,score'");
    }
    if (!scores.emplace(run_id, score).second) {
      throw IntegrityError(file.path + ": duplicate score for run '" + run_id + "'");
    }
  }
  return scores;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path == "-") {
    std::cout << text;
    if (!std::cout) throw IoError("write to standard output failed");
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + out_path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed on '" + out_path + "'");
}

void add_input(ReportMeta& meta, const LoadedFile& file) {
  meta.inputs.emplace_back(file.path, digest_bytes(file.bytes));
}

void echo(ReportMeta& meta, std::string key, std::string value) {
  meta.config.emplace_back(std::move(key), std::move(value));
}

bool binarizes(const MetricSpec& spec) {
  return spec.kind == MetricKind::ReciprocalRank ||
         spec.kind == MetricKind::AveragePrecision;
}

// Shared flags: every subcommand emits one report to --out in --format.
struct OutputOptions {
  std::string format = "csv";
  std::string out = "-";
};

void add_output_options(CLI::App* cmd, OutputOptions& opts) {
  cmd->add_option("--format", opts.format, "Output format: csv or structured")
      ->check(CLI::IsMember({"csv", "structured"}))
      ->capture_default_str();
  cmd->add_option("--out", opts.out, "Output file, '-' for standard output")
      ->capture_default_str();
}

void emit(const ReportDoc& doc, const OutputOptions& opts) {
  write_output(render(doc, parse_report_format(opts.format)), opts.out);
}

struct EvalOptions {
  std::vector<std::string> run_paths;
  std::string qrels_path;
  std::string metric;
  std::string agg = "mean";
  OutputOptions output;
};

int run_eval(const EvalOptions& opts) {
  const MetricSpec spec = parse_metric_spec(opts.metric);
  const Aggregation agg = parse_aggregation(opts.agg);
  ReportMeta meta;
  meta.command = "eval";

  std::vector<Run> runs;
  for (const auto& path : opts.run_paths) {
    const LoadedFile file = read_file(path);
    add_input(meta, file);
    runs.push_back(load_run(file));
  }
  const LoadedFile qrels_file = read_file(opts.qrels_path);
  add_input(meta, qrels_file);
  const Qrels qrels = load_qrels(qrels_file, file_stem(opts.qrels_path));

  std::set<QueryId> queries;
  for (const auto& [query, docs] : qrels.grades) queries.insert(query);

  echo(meta, "metric", spec.to_string());
  if (binarizes(spec)) {
    echo(meta, "binarization", std::to_string(spec.resolve_threshold(qrels)));
  }
  echo(meta, "aggregation", to_string(agg));
  echo(meta, "queries", std::to_string(queries.size()));

  const MetricMatrix matrix = score_matrix(runs, qrels, spec, queries);
  emit(eval_report(matrix, agg, std::move(meta)), opts.output);
  return 0;
}

struct BootstrapOptions {
  std::vector<std::string> run_paths;
  std::string qrels_path;
  std::string metric;
  std::string agg = "mean";
  int trials = 1000;
  std::uint64_t seed = 0;
  OutputOptions output;
};

int run_bootstrap(const BootstrapOptions& opts) {
  const MetricSpec spec = parse_metric_spec(opts.metric);
  const Aggregation agg = parse_aggregation(opts.agg);
  ReportMeta meta;
  meta.command = "bootstrap";

  std::vector<Run> runs;
  for (const auto& path : opts.run_paths) {
    const LoadedFile file = read_file(path);
    add_input(meta, file);
    runs.push_back(load_run(file));
  }
  const LoadedFile qrels_file = read_file(opts.qrels_path);
  add_input(meta, qrels_file);
  const Qrels qrels = load_qrels(qrels_file, file_stem(opts.qrels_path));

  std::set<QueryId> queries;
  for (const auto& [query, docs] : qrels.grades) queries.insert(query);

  echo(meta, "metric", spec.to_string());
  if (binarizes(spec)) {
    echo(meta, "binarization", std::to_string(spec.resolve_threshold(qrels)));
  }
  echo(meta, "aggregation", to_string(agg));
  echo(meta, "queries", std::to_string(queries.size()));
  echo(meta, "trials", std::to_string(opts.trials));
  echo(meta, "seed", std::to_string(opts.seed));

  const MetricMatrix matrix = score_matrix(runs, qrels, spec, queries);
  // Rows enter the bootstrap in leaderboard order so the report reads
  // top-down; ties break toward the lexically smaller run id.
  const MetricMatrix ordered =
      detail::permute_rows(matrix, detail::leaderboard_order(matrix, agg));
  const RankDistribution dist = bootstrap_ranks(ordered, opts.trials, opts.seed, agg);
  emit(bootstrap_report(dist, std::move(meta)), opts.output);
  return 0;
}

struct AgreementOptions {
  std::vector<std::string> run_paths;
  std::string qrels_path;
  std::string metric;
  int splits = 100;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  bool include_t_median = false;
  OutputOptions output;
};

int run_agreement(const AgreementOptions& opts) {
  const MetricSpec spec = parse_metric_spec(opts.metric);
  ReportMeta meta;
  meta.command = "agreement";

  std::vector<Run> runs;
  for (const auto& path : opts.run_paths) {
    const LoadedFile file = read_file(path);
    add_input(meta, file);
    runs.push_back(load_run(file));
  }
  const LoadedFile qrels_file = read_file(opts.qrels_path);
  add_input(meta, qrels_file);
  const Qrels qrels = load_qrels(qrels_file, file_stem(opts.qrels_path));

  std::set<QueryId> queries;
  for (const auto& [query, docs] : qrels.grades) queries.insert(query);

  echo(meta, "metric", spec.to_string());
  if (binarizes(spec)) {
    echo(meta, "binarization", std::to_string(spec.resolve_threshold(qrels)));
  }
  echo(meta, "queries", std::to_string(queries.size()));
  echo(meta, "splits", std::to_string(opts.splits));
  echo(meta, "seed", std::to_string(opts.seed));
  echo(meta, "alpha", format_rate(opts.alpha));

  const MetricMatrix matrix = score_matrix(runs, qrels, spec, queries);

  // Column layout mirrors the usual agreement grid: all four tests under
  // mean aggregation, then the rank-based tests under median. The t test
  // under median is a nonstandard pairing, available behind a flag.
  std::vector<std::pair<TestMethod, Aggregation>> columns = {
      {TestMethod::SignTest, Aggregation::Mean},
      {TestMethod::WilcoxonRankSum, Aggregation::Mean},
      {TestMethod::WilcoxonSignedRank, Aggregation::Mean},
      {TestMethod::PairedT, Aggregation::Mean},
      {TestMethod::SignTest, Aggregation::Median},
      {TestMethod::WilcoxonRankSum, Aggregation::Median},
      {TestMethod::WilcoxonSignedRank, Aggregation::Median},
  };
  if (opts.include_t_median) {
    columns.emplace_back(TestMethod::PairedT, Aggregation::Median);
  }
  std::vector<AgreementReport> reports;
  reports.reserve(columns.size());
  for (const auto& [test, agg] : columns) {
    reports.push_back(
        agreement_analysis(matrix, test, agg, opts.splits, opts.seed, opts.alpha));
  }
  emit(agreement_grid(reports, std::move(meta)), opts.output);
  return 0;
}

struct HoldoutOptions {
  std::vector<std::string> run_paths;
  std::string partition_path;
  std::vector<std::string> qrels_specs;  // "scheme=path" or bare path
  std::vector<std::string> metrics;
  std::vector<std::string> focus_runs;
  std::string agg = "mean";
  int trials = 1000;
  std::uint64_t seed = 0;
  OutputOptions output;
};

int run_holdout(const HoldoutOptions& opts) {
  const Aggregation agg = parse_aggregation(opts.agg);
  ReportMeta meta;
  meta.command = "holdout";

  std::vector<Run> runs;
  for (const auto& path : opts.run_paths) {
    const LoadedFile file = read_file(path);
    add_input(meta, file);
    runs.push_back(load_run(file));
  }
  const LoadedFile partition_file = read_file(opts.partition_path);
  add_input(meta, partition_file);
  const QueryPartition partition = load_partition(partition_file);

  std::vector<Qrels> schemes;
  for (const auto& entry : opts.qrels_specs) {
    const auto eq = entry.find('=');
    const std::string path = eq == std::string::npos ? entry : entry.substr(eq + 1);
    const std::string scheme_id =
        eq == std::string::npos ? file_stem(entry) : entry.substr(0, eq);
    if (scheme_id.empty() || path.empty()) {
      throw ArgumentError("bad --qrels entry '" + entry + "' (expected scheme=path)");
    }
    const LoadedFile file = read_file(path);
    add_input(meta, file);
    schemes.push_back(load_qrels(file, scheme_id));
  }

  std::vector<MetricSpec> specs;
  for (const auto& text : opts.metrics) specs.push_back(parse_metric_spec(text));

  for (const auto& spec : specs) echo(meta, "metric", spec.to_string());
  for (const auto& spec : specs) {
    if (!binarizes(spec)) continue;
    for (const auto& scheme : schemes) {
      echo(meta, "binarization:" + spec.to_string() + "@" + scheme.scheme_id,
           std::to_string(spec.resolve_threshold(scheme)));
    }
  }
  echo(meta, "aggregation", to_string(agg));
  echo(meta, "trials", std::to_string(opts.trials));
  echo(meta, "seed", std::to_string(opts.seed));

  const HoldoutReport report = holdout_compare(runs, partition, schemes, specs,
                                               opts.trials, opts.seed, opts.focus_runs, agg);
  emit(holdout_report(report, std::move(meta)), opts.output);
  return 0;
}

struct MonitorOptions {
  std::string manifest_path;
  std::string scores_path;
  double baseline_score = 0.0;
  bool baseline_given = false;
  int max_runs = 2;
  int max_variants = 1;
  std::string window = "month";
  int rolling_days = 30;
  OutputOptions output;
};

int run_monitor(const MonitorOptions& opts) {
  ReportMeta meta;
  meta.command = "monitor";

  const LoadedFile manifest_file = read_file(opts.manifest_path);
  add_input(meta, manifest_file);
  const LeaderboardManifest manifest = load_manifest(manifest_file);

  SubmissionPolicy policy;
  policy.max_runs_per_window = opts.max_runs;
  policy.max_minor_variants_per_window = opts.max_variants;
  policy.window =
      opts.window == "rolling" ? PolicyWindow::RollingDays : PolicyWindow::CalendarMonth;
  policy.rolling_days = opts.rolling_days;

  echo(meta, "max-runs", std::to_string(policy.max_runs_per_window));
  echo(meta, "max-variants", std::to_string(policy.max_minor_variants_per_window));
  echo(meta, "window", opts.window);
  if (policy.window == PolicyWindow::RollingDays) {
    echo(meta, "rolling-days", std::to_string(policy.rolling_days));
  }

  std::optional<std::vector<SotaPoint>> sota;
  if (!opts.scores_path.empty()) {
    const LoadedFile scores_file = read_file(opts.scores_path);
    add_input(meta, scores_file);
    const std::map<std::string, double> scores = load_scores(scores_file);
    echo(meta, "baseline-score", format_rate(opts.baseline_score));
    sota = sota_trajectory(manifest, scores, opts.baseline_score);
  }

  const PolicyCheckReport policy_report = check_submission_policy(manifest, policy);
  emit(monitor_report(policy_report, group_stats(manifest), sota, std::move(meta)),
       opts.output);
  return 0;
}

struct ScaleCheckOptions {
  std::string metric;
  int depth = 0;
  int grades = 2;
  std::size_t cap = std::size_t{1} << 20;
  OutputOptions output;
};

int run_scale_check(const ScaleCheckOptions& opts) {
  const MetricSpec spec = parse_metric_spec(opts.metric);
  ReportMeta meta;
  meta.command = "scale-check";
  echo(meta, "metric", spec.to_string());
  echo(meta, "depth", std::to_string(opts.depth));
  echo(meta, "grades", std::to_string(opts.grades));
  echo(meta, "binarization", std::to_string(spec.binarization_threshold.value_or(1)));
  echo(meta, "state-cap", std::to_string(opts.cap));

  const ScaleCheckResult result = scale_check(spec, opts.depth, opts.grades, opts.cap);
  emit(scale_report(result, std::move(meta)), opts.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"IR evaluation and leaderboard meta-evaluation toolkit"};
  app.require_subcommand(1);

  EvalOptions eval_opts;
  CLI::App* eval = app.add_subcommand("eval", "Score runs against judgments, per query");
  eval->add_option("--run", eval_opts.run_paths, "Run file (repeatable)")
      ->required();
  eval->add_option("--qrels", eval_opts.qrels_path, "Judgments file")->required();
  eval->add_option("--metric", eval_opts.metric,
                   "Metric spec, e.g. rr@10, ndcg@10, map, ncg@100:bin=2")
      ->required();
  eval->add_option("--agg", eval_opts.agg, "Aggregate row: mean or median")
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  add_output_options(eval, eval_opts.output);

  BootstrapOptions boot_opts;
  CLI::App* boot = app.add_subcommand("bootstrap", "Rank stability under query resampling");
  boot->add_option("--run", boot_opts.run_paths, "Run file (repeatable)")->required();
  boot->add_option("--qrels", boot_opts.qrels_path, "Judgments file")->required();
  boot->add_option("--metric", boot_opts.metric, "Metric spec")->required();
  boot->add_option("--agg", boot_opts.agg, "Aggregation: mean or median")
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  boot->add_option("--trials", boot_opts.trials, "Bootstrap trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  boot->add_option("--seed", boot_opts.seed, "PRNG seed (always explicit)")->required();
  add_output_options(boot, boot_opts.output);

  AgreementOptions agree_opts;
  CLI::App* agree =
      app.add_subcommand("agreement", "Split-half verdict agreement across tests");
  agree->add_option("--run", agree_opts.run_paths, "Run file (repeatable, at least two)")
      ->required();
  agree->add_option("--qrels", agree_opts.qrels_path, "Judgments file")->required();
  agree->add_option("--metric", agree_opts.metric, "Metric spec")->required();
  agree->add_option("--splits", agree_opts.splits, "Random half-splits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  agree->add_option("--seed", agree_opts.seed, "PRNG seed (always explicit)")->required();
  agree->add_option("--alpha", agree_opts.alpha, "Significance level")
      ->capture_default_str();
  agree->add_flag("--include-t-median", agree_opts.include_t_median,
                  "Add the t test under median aggregation");
  add_output_options(agree, agree_opts.output);

  HoldoutOptions hold_opts;
  CLI::App* hold =
      app.add_subcommand("holdout", "Public/private leaderboard comparison");
  hold->add_option("--run", hold_opts.run_paths, "Run file (repeatable)")->required();
  hold->add_option("--partition", hold_opts.partition_path,
                   "Query partition file (public/private)")
      ->required();
  hold->add_option("--qrels", hold_opts.qrels_specs,
                   "Labeling scheme as scheme=path (repeatable)")
      ->required();
  hold->add_option("--metric", hold_opts.metrics, "Metric spec (repeatable)")->required();
  hold->add_option("--focus", hold_opts.focus_runs,
                   "Run ids whose rank distributions to report (default: all)");
  hold->add_option("--agg", hold_opts.agg, "Aggregation: mean or median")
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  hold->add_option("--trials", hold_opts.trials, "Bootstrap trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  hold->add_option("--seed", hold_opts.seed, "PRNG seed (always explicit)")->required();
  add_output_options(hold, hold_opts.output);

  MonitorOptions mon_opts;
  CLI::App* mon = app.add_subcommand("monitor", "Submission-policy and trajectory checks");
  mon->add_option("--manifest", mon_opts.manifest_path, "Leaderboard manifest (JSON)")
      ->required();
  auto* scores_opt =
      mon->add_option("--scores", mon_opts.scores_path,
                      "run_id,score file enabling the best-so-far trajectory");
  auto* baseline_opt = mon->add_option("--baseline-score", mon_opts.baseline_score,
                                       "Organizer baseline for the trajectory");
  scores_opt->needs(baseline_opt);
  baseline_opt->needs(scores_opt);
  mon->add_option("--max-runs", mon_opts.max_runs, "Runs allowed per group per window")
      ->capture_default_str();
  mon->add_option("--max-variants", mon_opts.max_variants,
                  "Minor variants allowed per group per window")
      ->capture_default_str();
  mon->add_option("--window", mon_opts.window, "Window kind: month or rolling")
      ->check(CLI::IsMember({"month", "rolling"}))
      ->capture_default_str();
  mon->add_option("--rolling-days", mon_opts.rolling_days, "Rolling window length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_output_options(mon, mon_opts.output);

  ScaleCheckOptions scale_opts;
  CLI::App* scale =
      app.add_subcommand("scale-check", "Exact metric value sets and interval-scale check");
  scale->add_option("--metric", scale_opts.metric, "Metric spec (rr, map, or ncg)")
      ->required();
  scale->add_option("--depth", scale_opts.depth, "Results per ranking")
      ->required()
      ->check(CLI::PositiveNumber);
  scale->add_option("--grades", scale_opts.grades, "Relevance grades (2 = binary)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scale->add_option("--cap", scale_opts.cap, "State-count cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_output_options(scale, scale_opts.output);

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) return run_eval(eval_opts);
    if (boot->parsed()) return run_bootstrap(boot_opts);
    if (agree->parsed()) return run_agreement(agree_opts);
    if (hold->parsed()) return run_holdout(hold_opts);
    if (mon->parsed()) return run_monitor(mon_opts);
    if (scale->parsed()) return run_scale_check(scale_opts);
  } catch (const std::exception& e) {
    std::cerr << "ranklab: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
