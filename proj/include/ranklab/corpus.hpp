#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ranklab/date.hpp"
#include "ranklab/errors.hpp"

namespace ranklab {

using QueryId = std::string;
using DocId = std::string;

inline constexpr std::size_t kDefaultDepthCap = 1000;

struct RankedResult {
  DocId doc_id;
  double score = 0.0;

  friend bool operator==(const RankedResult&, const RankedResult&) = default;
};

/// One system's ranked results per query. Per-query lists are kept strictly
/// descending in (score, doc_id); the rank column of the input file is
/// validated but never trusted. Immutable after parsing.
struct Run {
  std::string run_id;
  std::string group_id;
  std::optional<Date> submitted_on;
  std::string description;
  std::map<QueryId, std::vector<RankedResult>> results;

  const std::vector<RankedResult>* results_for(const QueryId& query) const {
    auto it = results.find(query);
    return it == results.end() ? nullptr : &it->second;
  }

  friend bool operator==(const Run&, const Run&) = default;
};

/// A labeling scheme: graded relevance per (query, document).
struct Qrels {
  std::string scheme_id;
  int max_grade = 0;
  std::map<QueryId, std::map<DocId, int>> grades;

  bool has_query(const QueryId& query) const { return grades.count(query) != 0; }

  /// Unjudged documents score grade 0.
  int grade_of(const QueryId& query, const DocId& doc) const {
    auto q = grades.find(query);
    if (q == grades.end()) return 0;
    auto d = q->second.find(doc);
    return d == q->second.end() ? 0 : d->second;
  }

  friend bool operator==(const Qrels&, const Qrels&) = default;
};

struct Submission {
  std::string run_id;
  std::string group_id;
  Date submitted_on;
  std::string description;
  std::string path;
  bool baseline = false;
  std::string variant_group;  // empty = untagged
};

struct LeaderboardManifest {
  std::string task_id;
  std::vector<Submission> submissions;
};

struct QueryPartition {
  std::set<QueryId> public_ids;
  std::set<QueryId> private_ids;
};

struct ValidationReport {
  std::vector<QueryId> covered;
  std::vector<QueryId> missing;
  std::vector<QueryId> extraneous;
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename T>
inline bool parse_number(std::string_view text, T& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

inline std::string format_score(double score) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, score);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parse a run in the standard 6-column submission format:
///   query_id Q0 doc_id rank score tag
/// The tag of the first line becomes the run_id. Lists are re-sorted by
/// (score desc, doc_id desc); a warning is recorded when the file's rank
/// column disagrees with that order, and results beyond `depth_cap` per
/// query are dropped with a warning.
inline Run parse_run(std::istream& in, std::size_t depth_cap = kDefaultDepthCap,
                     std::vector<std::string>* warnings = nullptr) {
  struct Entry {
    DocId doc_id;
    double score;
    long claimed_rank;
  };
  std::map<QueryId, std::vector<Entry>> per_query;
  Run run;
  std::string line;
  std::size_t line_no = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 6) {
      throw ParseError("expected 6 fields, found " + std::to_string(fields.size()), line_no);
    }
    if (fields[1] != "Q0") {
      throw ParseError("expected literal 'Q0' in column 2, found '" + std::string(fields[1]) + "'",
                       line_no);
    }
    long claimed_rank = 0;
    if (!detail::parse_number(fields[3], claimed_rank)) {
      throw ParseError("non-numeric rank '" + std::string(fields[3]) + "'", line_no);
    }
    double score = 0.0;
    if (!detail::parse_number(fields[4], score)) {
      throw ParseError("non-numeric score '" + std::string(fields[4]) + "'", line_no);
    }
    if (!saw_data) {
      run.run_id = std::string(fields[5]);
      saw_data = true;
    }
    per_query[std::string(fields[0])].push_back(
        Entry{std::string(fields[2]), score, claimed_rank});
  }
  if (!saw_data) throw ParseError("run input contains no result lines");

  std::size_t rank_mismatches = 0;
  std::size_t dropped = 0;
  std::size_t truncated_queries = 0;
  for (auto& [query, entries] : per_query) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.doc_id < b.doc_id; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
      if (entries[i].doc_id == entries[i - 1].doc_id) {
        throw IntegrityError("duplicate result for query '" + query + "', document '" +
                             entries[i].doc_id + "'");
      }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.doc_id > b.doc_id;
    });
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].claimed_rank != static_cast<long>(i + 1)) ++rank_mismatches;
    }
    if (entries.size() > depth_cap) {
      dropped += entries.size() - depth_cap;
      ++truncated_queries;
      entries.resize(depth_cap);
    }
    auto& out = run.results[query];
    out.reserve(entries.size());
    for (auto& e : entries) out.push_back(RankedResult{std::move(e.doc_id), e.score});
  }
  if (warnings) {
    if (rank_mismatches > 0) {
      warnings->push_back("run '" + run.run_id + "': " + std::to_string(rank_mismatches) +
                          " rank field(s) disagree with score-derived order; ranks ignored");
    }
    if (dropped > 0) {
      warnings->push_back("run '" + run.run_id + "': dropped " + std::to_string(dropped) +
                          " result(s) beyond depth cap " + std::to_string(depth_cap) + " on " +
                          std::to_string(truncated_queries) + " query(ies)");
    }
  }
  return run;
}

inline void write_run(const Run& run, std::ostream& out) {
  for (const auto& [query, entries] : run.results) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      out << query << " Q0 " << entries[i].doc_id << ' ' << i + 1 << ' '
          << detail::format_score(entries[i].score) << ' ' << run.run_id << '\n';
    }
  }
}

/// Parse judgments in the standard 4-column qrels format:
///   query_id 0 doc_id grade
/// Column 2 is ignored. Identical duplicate lines are accepted; conflicting
/// grades for the same (query, document) are an integrity error.
inline Qrels parse_qrels(std::istream& in, std::string scheme_id = {}) {
  Qrels qrels;
  qrels.scheme_id = std::move(scheme_id);
  std::string line;
  std::size_t line_no = 0;
  bool saw_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields, found " + std::to_string(fields.size()), line_no);
    }
    int grade = 0;
    if (!detail::parse_number(fields[3], grade)) {
      throw ParseError("non-integer grade '" + std::string(fields[3]) + "'", line_no);
    }
    if (grade < 0) {
      throw ParseError("negative grade " + std::to_string(grade), line_no);
    }
    auto [it, inserted] =
        qrels.grades[std::string(fields[0])].emplace(std::string(fields[2]), grade);
    if (!inserted && it->second != grade) {
      throw IntegrityError("conflicting grades for query '" + std::string(fields[0]) +
                           "', document '" + std::string(fields[2]) + "': " +
                           std::to_string(it->second) + " vs " + std::to_string(grade));
    }
    qrels.max_grade = std::max(qrels.max_grade, grade);
    saw_data = true;
  }
  if (!saw_data) throw ParseError("qrels input contains no judgments");
  return qrels;
}

inline void write_qrels(const Qrels& qrels, std::ostream& out) {
  for (const auto& [query, docs] : qrels.grades) {
    for (const auto& [doc, grade] : docs) {
      out << query << " 0 " << doc << ' ' << grade << '\n';
    }
  }
}

/// Manifest format: JSON object with "task_id" and a "submissions" array of
/// {run_id, group_id, submitted_on, description, path, baseline?, variant_group?}.
inline LeaderboardManifest parse_manifest(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  LeaderboardManifest manifest;
  try {
    manifest.task_id = doc.at("task_id").get<std::string>();
    for (const auto& entry : doc.at("submissions")) {
      Submission s;
      s.run_id = entry.at("run_id").get<std::string>();
      s.group_id = entry.at("group_id").get<std::string>();
      s.submitted_on = parse_date(entry.at("submitted_on").get<std::string>());
      s.description = entry.value("description", std::string{});
      s.path = entry.at("path").get<std::string>();
      s.baseline = entry.value("baseline", false);
      s.variant_group = entry.value("variant_group", std::string{});
      manifest.submissions.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  std::set<std::string> seen;
  for (const auto& s : manifest.submissions) {
    if (!seen.insert(s.run_id).second) {
      throw IntegrityError("manifest: duplicate run_id '" + s.run_id + "'");
    }
  }
  return manifest;
}

/// Partition format: JSON object {"public": [ids], "private": [ids]}.
inline QueryPartition parse_partition(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("partition: ") + e.what());
  }
  QueryPartition partition;
  try {
    for (const auto& id : doc.at("public")) partition.public_ids.insert(id.get<std::string>());
    for (const auto& id : doc.at("private")) partition.private_ids.insert(id.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("partition: ") + e.what());
  }
  for (const auto& id : partition.public_ids) {
    if (partition.private_ids.count(id)) {
      throw IntegrityError("partition: query '" + id + "' appears in both public and private sets");
    }
  }
  if (partition.public_ids.empty() && partition.private_ids.empty()) {
    throw IntegrityError("partition: both query sets are empty");
  }
  return partition;
}

/// Load and cross-validate a manifest and a query partition. Run file
/// references are resolved against `base_dir` and must exist.
inline std::pair<LeaderboardManifest, QueryPartition> load_leaderboard_config(
    std::istream& manifest_in, std::istream& partition_in,
    const std::filesystem::path& base_dir) {
  LeaderboardManifest manifest = parse_manifest(manifest_in);
  QueryPartition partition = parse_partition(partition_in);
  for (const auto& s : manifest.submissions) {
    std::filesystem::path path(s.path);
    if (path.is_relative()) path = base_dir / path;
    if (!std::filesystem::exists(path)) {
      throw MissingFileError("manifest: run file for '" + s.run_id + "' not found: " +
                             path.string());
    }
  }
  return {std::move(manifest), std::move(partition)};
}

/// Report-only coverage check of a run against a query set.
inline ValidationReport validate_run_against_queryset(const Run& run,
                                                      const std::set<QueryId>& queries) {
  ValidationReport report;
  for (const auto& query : queries) {
    if (run.results.count(query)) {
      report.covered.push_back(query);
    } else {
      report.missing.push_back(query);
    }
  }
  for (const auto& [query, entries] : run.results) {
    if (!queries.count(query)) report.extraneous.push_back(query);
  }
  return report;
}

}  // namespace ranklab
