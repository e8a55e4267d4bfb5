#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ranklab/agreement.hpp"
#include "ranklab/bootstrap.hpp"
#include "ranklab/errors.hpp"
#include "ranklab/holdout.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/monitor.hpp"
#include "ranklab/scale.hpp"

namespace ranklab {

inline constexpr std::string_view kToolkitName = "ranklab";
inline constexpr std::string_view kToolkitVersion = "0.1.0";

namespace detail {

/// FNV-1a, 64 bit. Used to fingerprint report inputs; not cryptographic.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

inline std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf);
}

}  // namespace detail

inline std::string digest_bytes(std::string_view bytes) {
  return "fnv1a64:" + detail::hex64(detail::fnv1a64(bytes));
}

inline std::string digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFileError("cannot open '" + path + "' for digesting");
  std::ostringstream bytes;
  bytes << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path + "'");
  return digest_bytes(bytes.str());
}

/// "72.7%": percentage with one decimal, the table rendering of a rate.
inline std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", fraction * 100.0);
  return std::string(buf);
}

/// "0.7270": a rate or score with fixed four decimals.
inline std::string format_rate(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return std::string(buf);
}

inline std::string format_fixed(double value, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return std::string(buf);
}

inline std::string csv_quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

/// One report cell. The kind fixes the CSV rendering; structured output
/// keeps the full-precision value.
struct Cell {
  enum class Kind { Text, Rate, Percent, Rank, Count, Flag };

  Kind kind = Kind::Text;
  std::string text;
  double value = 0.0;
  std::int64_t count = 0;
  bool flag = false;

  static Cell of_text(std::string s) {
    Cell c;
    c.kind = Kind::Text;
    c.text = std::move(s);
    return c;
  }
  static Cell of_rate(double v) {
    Cell c;
    c.kind = Kind::Rate;
    c.value = v;
    return c;
  }
  static Cell of_percent(double fraction) {
    Cell c;
    c.kind = Kind::Percent;
    c.value = fraction;
    return c;
  }
  static Cell of_rank(double v) {
    Cell c;
    c.kind = Kind::Rank;
    c.value = v;
    return c;
  }
  static Cell of_count(std::int64_t n) {
    Cell c;
    c.kind = Kind::Count;
    c.count = n;
    return c;
  }
  static Cell of_flag(bool b) {
    Cell c;
    c.kind = Kind::Flag;
    c.flag = b;
    return c;
  }

  /// CSV rendering: rates 4 decimals, percentages one decimal with '%',
  /// ranks 2 decimals, '.' decimal separator throughout.
  std::string to_csv() const {
    switch (kind) {
      case Kind::Text:
        return csv_quote(text);
      case Kind::Rate:
        return format_rate(value);
      case Kind::Percent:
        return format_pct(value);
      case Kind::Rank:
        return format_fixed(value, 2);
      case Kind::Count:
        return std::to_string(count);
      case Kind::Flag:
        return flag ? "true" : "false";
    }
    return {};
  }

  /// Structured rendering keeps full precision; percentages stay fractions.
  nlohmann::json to_json() const {
    switch (kind) {
      case Kind::Text:
        return text;
      case Kind::Rate:
      case Kind::Percent:
      case Kind::Rank:
        return value;
      case Kind::Count:
        return count;
      case Kind::Flag:
        return flag;
    }
    return nullptr;
  }
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Provenance carried by every report: the subcommand, the full effective
/// configuration (defaults included), and a digest per input. No clocks.
struct ReportMeta {
  std::string command;
  std::vector<std::pair<std::string, std::string>> config;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
};

struct ReportDoc {
  ReportMeta meta;
  std::vector<std::string> notes;
  std::vector<Table> tables;
};

/// CSV form: '#' provenance header, then one header+rows block per table,
/// blank-line separated and introduced by "# table: <name>".
inline std::string render_csv(const ReportDoc& doc) {
  std::ostringstream out;
  out << "# " << kToolkitName << ' ' << kToolkitVersion << '\n';
  out << "# command: " << doc.meta.command << '\n';
  for (const auto& [key, value] : doc.meta.config) {
    out << "# config: " << key << '=' << value << '\n';
  }
  for (const auto& [path, digest] : doc.meta.inputs) {
    out << "# input: " << path << ' ' << digest << '\n';
  }
  for (const auto& note : doc.notes) {
    out << "# note: " << note << '\n';
  }
  for (const Table& table : doc.tables) {
    out << '\n' << "# table: " << table.name << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      if (i) out << ',';
      out << csv_quote(table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << row[i].to_csv();
      }
      out << '\n';
    }
  }
  return out.str();
}

/// Structured form: one JSON document with the same provenance and tables,
/// numeric cells at full precision. Config entries stay an ordered array of
/// [key, value] pairs so repeated keys and echo order survive.
inline std::string render_structured(const ReportDoc& doc) {
  nlohmann::json root;
  root["toolkit"] = std::string(kToolkitName);
  root["version"] = std::string(kToolkitVersion);
  root["command"] = doc.meta.command;
  nlohmann::json config = nlohmann::json::array();
  for (const auto& [key, value] : doc.meta.config) {
    config.push_back(nlohmann::json::array({key, value}));
  }
  root["config"] = std::move(config);
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [path, digest] : doc.meta.inputs) {
    inputs.push_back({{"path", path}, {"digest", digest}});
  }
  root["inputs"] = std::move(inputs);
  root["notes"] = doc.notes;
  nlohmann::json tables = nlohmann::json::array();
  for (const Table& table : doc.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
      nlohmann::json cells = nlohmann::json::array();
      for (const Cell& cell : row) cells.push_back(cell.to_json());
      rows.push_back(std::move(cells));
    }
    tables.push_back(
        {{"name", table.name}, {"columns", table.columns}, {"rows", std::move(rows)}});
  }
  root["tables"] = std::move(tables);
  return root.dump(2) + "\n";
}

enum class ReportFormat { Csv, Structured };

inline ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "structured") return ReportFormat::Structured;
  throw ArgumentError("unknown output format '" + std::string(text) +
                      "' (expected csv or structured)");
}

inline std::string render(const ReportDoc& doc, ReportFormat format) {
  return format == ReportFormat::Csv ? render_csv(doc) : render_structured(doc);
}

/// Per-query score table, one column per run, closed by an aggregate row
/// whose first cell names the aggregation.
inline ReportDoc eval_report(const MetricMatrix& matrix, Aggregation aggregation,
                             ReportMeta meta) {
  ReportDoc doc;
  doc.meta = std::move(meta);
  Table scores;
  scores.name = "scores";
  scores.columns.push_back("query");
  for (const auto& run : matrix.run_ids) scores.columns.push_back(run);
  for (std::size_t q = 0; q < matrix.query_ids.size(); ++q) {
    std::vector<Cell> row;
    row.push_back(Cell::of_text(matrix.query_ids[q]));
    for (std::size_t r = 0; r < matrix.run_ids.size(); ++r) {
      row.push_back(Cell::of_rate(matrix.scores[r * matrix.query_ids.size() + q]));
    }
    scores.rows.push_back(std::move(row));
  }
  std::vector<Cell> footer;
  footer.push_back(Cell::of_text(to_string(aggregation)));
  for (std::size_t r = 0; r < matrix.run_ids.size(); ++r) {
    std::vector<double> row(matrix.row(r).begin(), matrix.row(r).end());
    footer.push_back(Cell::of_rate(aggregate(row, aggregation)));
  }
  scores.rows.push_back(std::move(footer));
  doc.tables.push_back(std::move(scores));
  return doc;
}

namespace detail {

inline void append_quantiles(std::vector<Cell>& row, const RankQuantiles& q) {
  row.push_back(Cell::of_rank(q.min));
  row.push_back(Cell::of_rank(q.q1));
  row.push_back(Cell::of_rank(q.median));
  row.push_back(Cell::of_rank(q.q3));
  row.push_back(Cell::of_rank(q.max));
}

}  // namespace detail

/// Rank-stability table: one row per run in leaderboard order, a percent
/// cell per rank, plus expected rank and boxplot quantiles.
inline ReportDoc bootstrap_report(const RankDistribution& dist, ReportMeta meta) {
  ReportDoc doc;
  doc.meta = std::move(meta);
  Table table;
  table.name = "rank_distribution";
  table.columns = {"run", "expected_rank", "min", "q1", "median", "q3", "max"};
  const std::size_t runs = dist.run_ids.size();
  for (std::size_t rank = 1; rank <= runs; ++rank) {
    table.columns.push_back("rank_" + std::to_string(rank));
  }
  for (std::size_t r = 0; r < runs; ++r) {
    std::vector<Cell> row;
    row.push_back(Cell::of_text(dist.run_ids[r]));
    row.push_back(Cell::of_rank(dist.expected_rank[r]));
    detail::append_quantiles(row, dist.rank_quantiles[r]);
    for (std::size_t rank = 1; rank <= runs; ++rank) {
      row.push_back(Cell::of_percent(dist.proportion_at(r, rank)));
    }
    table.rows.push_back(std::move(row));
  }
  doc.tables.push_back(std::move(table));
  return doc;
}

/// Agreement grid: one column per (test, aggregation) report, rate rows
/// agree / partial / disagree / perc_signif, then unit counts.
inline ReportDoc agreement_grid(std::span<const AgreementReport> reports,
                                ReportMeta meta) {
  if (reports.empty()) throw ArgumentError("agreement grid needs at least one report");
  ReportDoc doc;
  doc.meta = std::move(meta);
  Table table;
  table.name = "agreement";
  table.columns.push_back("rate");
  for (const auto& r : reports) {
    table.columns.push_back(to_string(r.test) + ":" + to_string(r.aggregation));
  }
  auto rate_row = [&](std::string label, auto getter) {
    std::vector<Cell> row;
    row.push_back(Cell::of_text(std::move(label)));
    for (const auto& r : reports) row.push_back(Cell::of_percent(getter(r)));
    return row;
  };
  table.rows.push_back(rate_row("agree", [](const AgreementReport& r) { return r.agree_rate; }));
  table.rows.push_back(
      rate_row("partial", [](const AgreementReport& r) { return r.partial_rate; }));
  table.rows.push_back(
      rate_row("disagree", [](const AgreementReport& r) { return r.disagree_rate; }));
  table.rows.push_back(
      rate_row("perc_signif", [](const AgreementReport& r) { return r.perc_signif; }));
  auto count_row = [&](std::string label, auto getter) {
    std::vector<Cell> row;
    row.push_back(Cell::of_text(std::move(label)));
    for (const auto& r : reports) row.push_back(Cell::of_count(getter(r)));
    return row;
  };
  table.rows.push_back(count_row(
      "units", [](const AgreementReport& r) { return static_cast<std::int64_t>(r.units); }));
  table.rows.push_back(count_row("degenerate_units", [](const AgreementReport& r) {
    return static_cast<std::int64_t>(r.degenerate_units);
  }));
  doc.tables.push_back(std::move(table));
  return doc;
}

/// Holdout report: a flat leaderboard table over all conditions, plus
/// per-condition boxplot rows (focus runs only, when any are named).
/// Pruned conditions surface as notes.
inline ReportDoc holdout_report(const HoldoutReport& report, ReportMeta meta) {
  ReportDoc doc;
  doc.meta = std::move(meta);
  for (const auto& note : report.pruned) doc.notes.push_back("pruned " + note);

  Table board;
  board.name = "leaderboard";
  board.columns = {"queryset", "scheme", "metric", "rank", "run", "aggregate"};
  Table ranks;
  ranks.name = "bootstrap_ranks";
  ranks.columns = {"queryset", "scheme",  "metric", "run", "expected_rank",
                   "min",      "q1",      "median", "q3",  "max"};
  for (const auto& cond : report.conditions) {
    const auto condition_cells = [&]() {
      return std::vector<Cell>{Cell::of_text(cond.condition.queryset),
                               Cell::of_text(cond.condition.scheme_id),
                               Cell::of_text(cond.condition.metric.to_string())};
    };
    for (std::size_t r = 0; r < cond.leaderboard.size(); ++r) {
      std::vector<Cell> row = condition_cells();
      row.push_back(Cell::of_count(static_cast<std::int64_t>(r + 1)));
      row.push_back(Cell::of_text(cond.leaderboard[r]));
      row.push_back(Cell::of_rate(cond.aggregates[r]));
      board.rows.push_back(std::move(row));
    }
    for (std::size_t r = 0; r < cond.distribution.run_ids.size(); ++r) {
      const std::string& run = cond.distribution.run_ids[r];
      if (!report.focus_runs.empty() &&
          std::find(report.focus_runs.begin(), report.focus_runs.end(), run) ==
              report.focus_runs.end()) {
        continue;
      }
      std::vector<Cell> row = condition_cells();
      row.push_back(Cell::of_text(run));
      row.push_back(Cell::of_rank(cond.distribution.expected_rank[r]));
      detail::append_quantiles(row, cond.distribution.rank_quantiles[r]);
      ranks.rows.push_back(std::move(row));
    }
  }
  doc.tables.push_back(std::move(board));
  doc.tables.push_back(std::move(ranks));
  return doc;
}

/// Submission-policy report: enforceability flag, violations, per-group
/// totals, and (when scores are supplied) the best-so-far trajectory.
inline ReportDoc monitor_report(const PolicyCheckReport& policy,
                                const std::vector<GroupStats>& groups,
                                const std::optional<std::vector<SotaPoint>>& sota,
                                ReportMeta meta) {
  ReportDoc doc;
  doc.meta = std::move(meta);

  Table rule;
  rule.name = "policy";
  rule.columns = {"minor_variant_rule_enforceable"};
  rule.rows.push_back({Cell::of_flag(policy.minor_variant_rule_enforceable)});
  doc.tables.push_back(std::move(rule));

  Table violations;
  violations.name = "violations";
  violations.columns = {"run", "group", "date", "rule", "detail"};
  for (const auto& v : policy.violations) {
    violations.rows.push_back({Cell::of_text(v.run_id), Cell::of_text(v.group_id),
                               Cell::of_text(v.date.to_string()), Cell::of_text(v.rule),
                               Cell::of_text(v.detail)});
  }
  doc.tables.push_back(std::move(violations));

  Table stats;
  stats.name = "group_stats";
  stats.columns = {"group", "submissions", "first", "last"};
  for (const auto& g : groups) {
    stats.rows.push_back({Cell::of_text(g.group_id),
                          Cell::of_count(static_cast<std::int64_t>(g.submissions)),
                          Cell::of_text(g.first.to_string()),
                          Cell::of_text(g.last.to_string())});
  }
  doc.tables.push_back(std::move(stats));

  if (sota) {
    Table trajectory;
    trajectory.name = "sota_trajectory";
    trajectory.columns = {"date", "run", "score", "is_sota"};
    for (const auto& point : *sota) {
      trajectory.rows.push_back({Cell::of_text(point.date.to_string()),
                                 Cell::of_text(point.run_id), Cell::of_rate(point.score),
                                 Cell::of_flag(point.is_current_sota)});
    }
    doc.tables.push_back(std::move(trajectory));
  }
  return doc;
}

/// Scale-check report: flags, then the value set, its gaps, and any
/// counterexample, each value in exact rational and decimal form.
inline ReportDoc scale_report(const ScaleCheckResult& result, ReportMeta meta) {
  ReportDoc doc;
  doc.meta = std::move(meta);

  Table summary;
  summary.name = "summary";
  summary.columns = {"distinct_values", "equi_spaced", "solvable"};
  summary.rows.push_back({Cell::of_count(static_cast<std::int64_t>(result.value_set.size())),
                          Cell::of_flag(result.equi_spaced), Cell::of_flag(result.solvable)});
  doc.tables.push_back(std::move(summary));

  auto value_table = [](std::string name, const std::vector<Rational>& values) {
    Table table;
    table.name = std::move(name);
    table.columns = {"value", "decimal"};
    for (const Rational& v : values) {
      table.rows.push_back({Cell::of_text(v.to_string()), Cell::of_rate(v.to_double())});
    }
    return table;
  };
  doc.tables.push_back(value_table("value_set", result.value_set));
  doc.tables.push_back(value_table("gaps", result.gaps));

  if (result.counterexample) {
    const SolvabilityCounterexample& ce = *result.counterexample;
    Table witness;
    witness.name = "counterexample";
    witness.columns = {"field", "value", "decimal"};
    auto push = [&](std::string field, const Rational& v) {
      witness.rows.push_back(
          {Cell::of_text(std::move(field)), Cell::of_text(v.to_string()),
           Cell::of_rate(v.to_double())});
    };
    push("a", ce.a);
    push("b", ce.b);
    push("c", ce.c);
    push("d", ce.d);
    push("gap", ce.gap);
    for (std::size_t i = 0; i < ce.missing.size(); ++i) {
      push("missing_" + std::to_string(i + 1), ce.missing[i]);
    }
    doc.tables.push_back(std::move(witness));
  }
  return doc;
}

}  // namespace ranklab
