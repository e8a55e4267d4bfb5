#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ranklab/bootstrap.hpp"
#include "ranklab/corpus.hpp"
#include "ranklab/errors.hpp"
#include "ranklab/metrics.hpp"

namespace ranklab {

/// One cell of the holdout cross-product: which query subset, which labeling
/// scheme, which metric.
struct HoldoutCondition {
  std::string queryset;  // "public" | "private"
  std::string scheme_id;
  MetricSpec metric;
};

/// Per-condition leaderboard plus its bootstrap rank distribution. Rows of
/// the distribution follow the leaderboard order (best aggregate first).
struct ConditionResult {
  HoldoutCondition condition;
  std::vector<std::string> leaderboard;  // run ids, rank 1 first
  std::vector<double> aggregates;        // aligned with leaderboard
  std::map<std::string, int> rank_of;    // run id -> 1-based rank
  RankDistribution distribution;
};

struct HoldoutReport {
  std::vector<ConditionResult> conditions;
  std::vector<std::string> focus_runs;
  std::vector<std::string> pruned;  // conditions dropped for missing labels
  int trials = 0;
  std::uint64_t seed = 0;
  Aggregation aggregation = Aggregation::Mean;
};

namespace detail {

/// Leaderboard permutation: aggregate descending, run_id ascending on ties.
inline std::vector<std::size_t> leaderboard_order(const MetricMatrix& matrix,
                                                  Aggregation aggregation) {
  std::vector<double> totals(matrix.run_ids.size());
  for (std::size_t r = 0; r < matrix.run_ids.size(); ++r) {
    totals[r] = aggregate(matrix.row(r), aggregation);
  }
  std::vector<std::size_t> order(matrix.run_ids.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (totals[a] != totals[b]) return totals[a] > totals[b];
    return matrix.run_ids[a] < matrix.run_ids[b];
  });
  return order;
}

inline MetricMatrix permute_rows(const MetricMatrix& matrix,
                                 const std::vector<std::size_t>& order) {
  MetricMatrix out;
  out.metric = matrix.metric;
  out.query_ids = matrix.query_ids;
  out.run_ids.reserve(order.size());
  out.scores.reserve(matrix.scores.size());
  for (std::size_t r : order) {
    out.run_ids.push_back(matrix.run_ids[r]);
    const auto row = matrix.row(r);
    out.scores.insert(out.scores.end(), row.begin(), row.end());
  }
  return out;
}

}  // namespace detail

/// Evaluates every run under the cross-product of query subsets, labeling
/// schemes, and metrics, with a bootstrap rank distribution per condition.
/// Conditions whose scheme does not label every query of the subset are
/// pruned and listed in the report (a scheme judged only on the holdout
/// queries yields no public condition). All conditions share the same seed.
inline HoldoutReport holdout_compare(const std::vector<Run>& runs,
                                     const QueryPartition& partition,
                                     const std::vector<Qrels>& schemes,
                                     const std::vector<MetricSpec>& metrics, int trials,
                                     std::uint64_t seed,
                                     std::vector<std::string> focus_runs = {},
                                     Aggregation aggregation = Aggregation::Mean) {
  if (runs.empty()) throw ArgumentError("holdout: no runs given");
  if (schemes.empty()) throw ArgumentError("holdout: no labeling schemes given");
  if (metrics.empty()) throw ArgumentError("holdout: no metrics given");
  if (partition.public_ids.empty() || partition.private_ids.empty()) {
    throw ArgumentError("holdout: both partition subsets must be non-empty");
  }

  // Every submitted run must have retrieved every partition query.
  for (const Run& run : runs) {
    for (const auto& [label, subset] : {std::pair{"public", &partition.public_ids},
                                        std::pair{"private", &partition.private_ids}}) {
      std::vector<QueryId> missing;
      for (const QueryId& q : *subset) {
        if (run.results_for(q) == nullptr) missing.push_back(q);
      }
      if (!missing.empty()) {
        throw IntegrityError("run '" + run.run_id + "' is missing " +
                             std::to_string(missing.size()) + " " + label +
                             " queries (first: " + missing.front() + ")");
      }
    }
  }

  for (const std::string& focus : focus_runs) {
    const bool known = std::any_of(runs.begin(), runs.end(),
                                   [&](const Run& r) { return r.run_id == focus; });
    if (!known) throw ArgumentError("holdout: unknown focus run '" + focus + "'");
  }

  HoldoutReport report;
  report.focus_runs = std::move(focus_runs);
  report.trials = trials;
  report.seed = seed;
  report.aggregation = aggregation;

  for (const auto& [label, subset] : {std::pair{"public", &partition.public_ids},
                                      std::pair{"private", &partition.private_ids}}) {
    for (const Qrels& scheme : schemes) {
      std::size_t unlabeled = 0;
      for (const QueryId& q : *subset) {
        if (!scheme.has_query(q)) ++unlabeled;
      }
      if (unlabeled > 0) {
        report.pruned.push_back(std::string(label) + "/" + scheme.scheme_id +
                                ": scheme labels miss " + std::to_string(unlabeled) +
                                " of " + std::to_string(subset->size()) + " queries");
        continue;
      }
      for (const MetricSpec& metric : metrics) {
        const MetricMatrix matrix = score_matrix(runs, scheme, metric, *subset);
        const std::vector<std::size_t> order =
            detail::leaderboard_order(matrix, aggregation);
        const MetricMatrix ordered = detail::permute_rows(matrix, order);

        ConditionResult result;
        result.condition = {label, scheme.scheme_id, metric};
        result.leaderboard = ordered.run_ids;
        result.aggregates.reserve(order.size());
        for (std::size_t r = 0; r < order.size(); ++r) {
          result.aggregates.push_back(aggregate(ordered.row(r), aggregation));
          result.rank_of[ordered.run_ids[r]] = static_cast<int>(r + 1);
        }
        result.distribution = bootstrap_ranks(ordered, trials, seed, aggregation);
        report.conditions.push_back(std::move(result));
      }
    }
  }
  return report;
}

}  // namespace ranklab
