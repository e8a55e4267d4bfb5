#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "ranklab/errors.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/prng.hpp"

namespace ranklab {

/// Five-number summary of a run's rank across trials. Interior quantiles use
/// linear interpolation between closest order statistics, so they may be
/// fractional.
struct RankQuantiles {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Bootstrap rank distribution over a fixed run list. proportions is a
/// row-major run x rank table; each row and each column sums to 1 because
/// every trial assigns each rank exactly once.
struct RankDistribution {
  std::vector<std::string> run_ids;
  int trials = 0;
  std::uint64_t seed = 0;
  Aggregation aggregation = Aggregation::Mean;
  std::vector<double> proportions;
  std::vector<double> expected_rank;
  std::vector<RankQuantiles> rank_quantiles;

  /// Fraction of trials in which run (by row index) placed at rank (1-based).
  double proportion_at(std::size_t run, std::size_t rank) const {
    return proportions[run * run_ids.size() + (rank - 1)];
  }
};

namespace detail {

/// k-th smallest rank (0-based k) in a count histogram over ranks 1..ranks.
inline double rank_order_stat(const std::int64_t* counts, std::size_t ranks,
                              std::int64_t k) {
  std::int64_t cumulative = 0;
  for (std::size_t i = 0; i < ranks; ++i) {
    cumulative += counts[i];
    if (k < cumulative) return static_cast<double>(i + 1);
  }
  return static_cast<double>(ranks);
}

inline RankQuantiles quantiles_from_counts(const std::int64_t* counts,
                                           std::size_t ranks, std::int64_t trials) {
  auto at_fraction = [&](double p) {
    const double h = p * static_cast<double>(trials - 1);
    const double lo = std::floor(h);
    const double lower = rank_order_stat(counts, ranks, static_cast<std::int64_t>(lo));
    if (h == lo) return lower;
    const double upper =
        rank_order_stat(counts, ranks, static_cast<std::int64_t>(lo) + 1);
    return lower + (h - lo) * (upper - lower);
  };
  RankQuantiles q;
  q.min = at_fraction(0.0);
  q.q1 = at_fraction(0.25);
  q.median = at_fraction(0.5);
  q.q3 = at_fraction(0.75);
  q.max = at_fraction(1.0);
  return q;
}

}  // namespace detail

/// Resamples the query set with replacement (same size) `trials` times,
/// re-aggregates every run on each resample, and ranks runs by aggregate,
/// descending, ties broken by input row order. Each trial draws its generator
/// from (seed, trial index), so results are independent of execution order.
inline RankDistribution bootstrap_ranks(const MetricMatrix& matrix, int trials,
                                        std::uint64_t seed,
                                        Aggregation aggregation = Aggregation::Mean) {
  const std::size_t runs = matrix.run_ids.size();
  const std::size_t queries = matrix.query_ids.size();
  if (runs == 0 || queries == 0) {
    throw ArgumentError("bootstrap: score matrix must be non-empty");
  }
  if (trials < 1) throw ArgumentError("bootstrap: trials must be at least 1");

  std::vector<std::int64_t> rank_counts(runs * runs, 0);  // [run][rank-1]
  std::vector<std::uint32_t> draws(queries);
  std::vector<double> aggregates(runs);
  std::vector<std::size_t> order(runs);
  std::vector<double> expanded;
  if (aggregation == Aggregation::Median) expanded.reserve(queries);

  for (int trial = 0; trial < trials; ++trial) {
    SplitMix64 rng = derive_stream(seed, static_cast<std::uint64_t>(trial));
    std::fill(draws.begin(), draws.end(), 0u);
    for (std::size_t q = 0; q < queries; ++q) {
      ++draws[static_cast<std::size_t>(rng.below(queries))];
    }
    for (std::size_t r = 0; r < runs; ++r) {
      const std::span<const double> row = matrix.row(r);
      if (aggregation == Aggregation::Mean) {
        double sum = 0.0;
        for (std::size_t q = 0; q < queries; ++q) {
          sum += static_cast<double>(draws[q]) * row[q];
        }
        aggregates[r] = sum / static_cast<double>(queries);
      } else {
        expanded.clear();
        for (std::size_t q = 0; q < queries; ++q) {
          expanded.insert(expanded.end(), draws[q], row[q]);
        }
        aggregates[r] = aggregate(expanded, Aggregation::Median);
      }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return aggregates[a] > aggregates[b];
    });
    for (std::size_t pos = 0; pos < runs; ++pos) {
      ++rank_counts[order[pos] * runs + pos];
    }
  }

  RankDistribution dist;
  dist.run_ids = matrix.run_ids;
  dist.trials = trials;
  dist.seed = seed;
  dist.aggregation = aggregation;
  dist.proportions.resize(runs * runs);
  dist.expected_rank.resize(runs);
  dist.rank_quantiles.resize(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    double expected = 0.0;
    for (std::size_t k = 0; k < runs; ++k) {
      const double prop =
          static_cast<double>(rank_counts[r * runs + k]) / static_cast<double>(trials);
      dist.proportions[r * runs + k] = prop;
      expected += prop * static_cast<double>(k + 1);
    }
    dist.expected_rank[r] = expected;
    dist.rank_quantiles[r] =
        detail::quantiles_from_counts(&rank_counts[r * runs], runs, trials);
  }
  return dist;
}

struct RankSummaryRow {
  std::string run_id;
  double expected_rank = 0.0;
  RankQuantiles quantiles;
};

/// Rows follow the distribution's run order; callers pass runs already in
/// leaderboard order so summaries read top-down.
inline std::vector<RankSummaryRow> rank_summary(const RankDistribution& dist) {
  std::vector<RankSummaryRow> rows;
  rows.reserve(dist.run_ids.size());
  for (std::size_t r = 0; r < dist.run_ids.size(); ++r) {
    rows.push_back({dist.run_ids[r], dist.expected_rank[r], dist.rank_quantiles[r]});
  }
  return rows;
}

}  // namespace ranklab
