#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ranklab/errors.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/prng.hpp"
#include "ranklab/stat_tests.hpp"

namespace ranklab {

enum class SplitAgreement { Agree, PartialAgree, Disagree };

inline std::string to_string(SplitAgreement outcome) {
  switch (outcome) {
    case SplitAgreement::Agree: return "agree";
    case SplitAgreement::PartialAgree: return "partial";
    case SplitAgreement::Disagree: return "disagree";
  }
  return "?";
}

/// Splits the query ids into two disjoint halves of sizes ceil(n/2) and
/// floor(n/2). Ids are sorted before shuffling, so the result depends only
/// on the id set and the seed, not on input order.
inline std::pair<std::vector<QueryId>, std::vector<QueryId>> random_half_split(
    std::span<const QueryId> ids, std::uint64_t seed) {
  if (ids.size() < 2) throw ArgumentError("half split: need at least 2 query ids");
  std::vector<QueryId> pool(ids.begin(), ids.end());
  std::sort(pool.begin(), pool.end());
  SplitMix64 rng(seed);
  rng.shuffle(pool);
  const auto middle = pool.begin() + static_cast<std::ptrdiff_t>((pool.size() + 1) / 2);
  std::vector<QueryId> first(pool.begin(), middle);
  std::vector<QueryId> second(middle, pool.end());
  return {std::move(first), std::move(second)};
}

/// Verdict comparison between the two halves of one split. A direction tie
/// (delta exactly 0) counts as same-direction with either side, so ties can
/// soften a verdict to PartialAgree but never manufacture a Disagree.
inline SplitAgreement classify_agreement(const PairVerdict& v1, const PairVerdict& v2) {
  using Better = PairVerdict::Better;
  const bool same_direction =
      v1.better == v2.better || v1.better == Better::Tie || v2.better == Better::Tie;
  const int significant = (v1.significant ? 1 : 0) + (v2.significant ? 1 : 0);
  if (same_direction) {
    return significant == 1 ? SplitAgreement::PartialAgree : SplitAgreement::Agree;
  }
  return significant == 0 ? SplitAgreement::PartialAgree : SplitAgreement::Disagree;
}

/// Split-half reliability summary for one (test, aggregation) cell. A unit
/// is one (run pair, split); rates are unit fractions and sum to 1.
/// perc_signif counts units significant in at least one of the two halves.
/// Degenerate units (a test rejected a half's input, scored p = 1) stay in
/// the denominator so unit counts match across tests.
struct AgreementReport {
  TestMethod test = TestMethod::SignTest;
  Aggregation aggregation = Aggregation::Mean;
  int splits = 0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  double agree_rate = 0.0;
  double partial_rate = 0.0;
  double disagree_rate = 0.0;
  double perc_signif = 0.0;
  std::int64_t units = 0;
  std::int64_t degenerate_units = 0;
};

/// Repeatedly bisects the query set and compares per-pair verdicts between
/// the halves, over all unordered run pairs. Split s is derived from
/// (seed, s) alone, so every test/aggregation cell sees identical splits
/// and columns stay comparable.
inline AgreementReport agreement_analysis(const MetricMatrix& matrix, TestMethod test,
                                          Aggregation aggregation, int splits = 100,
                                          std::uint64_t seed = 0, double alpha = 0.05) {
  const std::size_t runs = matrix.run_ids.size();
  const std::size_t queries = matrix.query_ids.size();
  if (runs < 2) throw ArgumentError("agreement analysis: need at least 2 runs");
  if (queries < 2) throw ArgumentError("agreement analysis: need at least 2 queries");
  if (splits < 1) throw ArgumentError("agreement analysis: need at least 1 split");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ArgumentError("agreement analysis: alpha must lie in (0,1)");
  }

  std::map<QueryId, std::size_t> column;
  for (std::size_t q = 0; q < queries; ++q) column[matrix.query_ids[q]] = q;

  std::int64_t agree = 0, partial = 0, disagree = 0, signif_any = 0, degenerate = 0;
  std::vector<std::vector<double>> half1(runs), half2(runs);
  for (int s = 0; s < splits; ++s) {
    const std::uint64_t split_seed = derive_stream(seed, static_cast<std::uint64_t>(s)).next();
    const auto [ids1, ids2] = random_half_split(matrix.query_ids, split_seed);
    for (std::size_t r = 0; r < runs; ++r) {
      half1[r].clear();
      half2[r].clear();
      for (const QueryId& id : ids1) half1[r].push_back(matrix.at(r, column.at(id)));
      for (const QueryId& id : ids2) half2[r].push_back(matrix.at(r, column.at(id)));
    }
    for (std::size_t i = 0; i < runs; ++i) {
      for (std::size_t j = i + 1; j < runs; ++j) {
        const PairVerdict v1 = compare_pair(half1[i], half1[j], test, aggregation, alpha);
        const PairVerdict v2 = compare_pair(half2[i], half2[j], test, aggregation, alpha);
        switch (classify_agreement(v1, v2)) {
          case SplitAgreement::Agree: ++agree; break;
          case SplitAgreement::PartialAgree: ++partial; break;
          case SplitAgreement::Disagree: ++disagree; break;
        }
        if (v1.significant || v2.significant) ++signif_any;
        if (v1.degenerate || v2.degenerate) ++degenerate;
      }
    }
  }

  AgreementReport report;
  report.test = test;
  report.aggregation = aggregation;
  report.splits = splits;
  report.alpha = alpha;
  report.seed = seed;
  report.units = static_cast<std::int64_t>(runs) * (runs - 1) / 2 * splits;
  report.agree_rate = static_cast<double>(agree) / static_cast<double>(report.units);
  report.partial_rate = static_cast<double>(partial) / static_cast<double>(report.units);
  report.disagree_rate = static_cast<double>(disagree) / static_cast<double>(report.units);
  report.perc_signif = static_cast<double>(signif_any) / static_cast<double>(report.units);
  report.degenerate_units = degenerate;
  return report;
}

}  // namespace ranklab
