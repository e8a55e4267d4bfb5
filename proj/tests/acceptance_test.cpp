// Acceptance gate: one test per shipping criterion, each printing a visible
// PASS/FAIL line. Tolerances and time budgets are pinned in the code next to
// the assertions they guard.

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <ranklab.hpp>

namespace ranklab {
namespace {

class Criterion {
 public:
  Criterion(int number, const char* label) : number_(number), label_(label) {}
  ~Criterion() {
    const bool failed = testing::Test::HasFailure();
    std::printf("[ACCEPTANCE] criterion %d (%s): %s\n", number_, label_,
                failed ? "FAIL" : "PASS");
    std::fflush(stdout);
  }

 private:
  int number_;
  const char* label_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double uniform01(SplitMix64& rng) {
  return static_cast<double>(rng.next() >> 11) / 9007199254740992.0;
}

// ---------------------------------------------------------------------------
// 1. The depth-3 binary state table: exact per-state reciprocal-rank values
//    in enumeration order, and the collapsed value set. Exact rationals,
//    under one millisecond.

TEST(Acceptance, ExactValueTable) {
  Criterion criterion(1, "exact value table");

  double best = 1e9;
  std::vector<Rational> values;
  std::vector<Rational> value_set;
  for (int round = 0; round < 3; ++round) {
    const auto start = Clock::now();
    StateSpace space = enumerate_states(3, 2);
    values = metric_state_values(space, parse_metric_spec("rr"));
    value_set = metric_value_set(space, parse_metric_spec("rr"));
    best = std::min(best, seconds_since(start));
  }

  const std::vector<Rational> expected = {Rational(1),    Rational(1),
                                          Rational(1),    Rational(1),
                                          Rational(1, 2), Rational(1, 2),
                                          Rational(1, 3), Rational(0)};
  EXPECT_EQ(values, expected);
  EXPECT_EQ(value_set, (std::vector<Rational>{Rational(0), Rational(1, 3),
                                              Rational(1, 2), Rational(1)}));
  EXPECT_LT(best, 0.001);  // < 1 ms
}

// ---------------------------------------------------------------------------
// 2. Interval-scale check on depth-3 binary reciprocal rank: not equi-spaced,
//    not solvable, witness gap 1/6 with unrealizable values 1/6 and 5/6.
//    Exact, under ten milliseconds.

TEST(Acceptance, SolvabilityCounterexample) {
  Criterion criterion(2, "solvability counterexample");

  double best = 1e9;
  ScaleCheckResult result;
  for (int round = 0; round < 3; ++round) {
    const auto start = Clock::now();
    result = scale_check(parse_metric_spec("rr@3"), 3, 2);
    best = std::min(best, seconds_since(start));
  }

  EXPECT_FALSE(result.equi_spaced);
  EXPECT_FALSE(result.solvable);
  ASSERT_TRUE(result.counterexample.has_value());
  EXPECT_EQ(result.counterexample->gap, Rational(1, 6));
  ASSERT_EQ(result.counterexample->missing.size(), 2u);
  EXPECT_EQ(result.counterexample->missing[0], Rational(1, 6));
  EXPECT_EQ(result.counterexample->missing[1], Rational(5, 6));
  EXPECT_LT(best, 0.010);  // < 10 ms
}

// ---------------------------------------------------------------------------
// 3. Exact-test oracles. Independent implementations: Pascal's-triangle
//    binomial tail for the sign test, full 2^n sign-assignment enumeration
//    for the signed rank, full subset enumeration for the rank sum. At least
//    10,000 random tie-free inputs, agreement within 1e-12, under a minute.

double sign_oracle_p(std::size_t positives, std::size_t n) {
  std::vector<unsigned long long> row = {1};  // Pascal's triangle, row 0
  for (std::size_t i = 1; i <= n; ++i) {
    row.push_back(1);
    for (std::size_t j = i - 1; j >= 1; --j) row[j] += row[j - 1];
  }
  const std::size_t m = std::min(positives, n - positives);
  unsigned long long tail = 0;
  for (std::size_t j = 0; j <= m; ++j) tail += row[j];
  const long double p = 2.0L * static_cast<long double>(tail) /
                        std::ldexp(1.0L, static_cast<int>(n));
  return static_cast<double>(std::min(1.0L, p));
}

// Ranks of |diffs| (tie-free input), 1-based.
std::vector<int> magnitude_ranks(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(diffs[a]) < std::fabs(diffs[b]);
  });
  std::vector<int> ranks(n);
  for (std::size_t i = 0; i < n; ++i) ranks[order[i]] = static_cast<int>(i + 1);
  return ranks;
}

double signed_rank_oracle_p(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  const std::vector<int> ranks = magnitude_ranks(diffs);
  long long w_plus = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += ranks[i];
    if (diffs[i] > 0) w_plus += ranks[i];
  }
  const long long dev = std::llabs(2 * w_plus - total);
  long long hits = 0;
  const std::size_t assignments = std::size_t{1} << n;
  for (std::size_t mask = 0; mask < assignments; ++mask) {
    long long s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) s += ranks[i];
    }
    if (std::llabs(2 * s - total) >= dev) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(assignments);
}

double rank_sum_oracle_p(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size(), total = xs.size() + ys.size();
  std::vector<double> pooled = xs;
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  const std::vector<int> ranks = magnitude_ranks(pooled);  // values (not |.|) are
  // all positive in the generator below, so magnitude order is value order.
  long long w = 0;
  for (std::size_t i = 0; i < n; ++i) w += ranks[i];
  const long long mu_doubled = static_cast<long long>(n) * (total + 1);
  const long long dev = std::llabs(2 * w - mu_doubled);
  long long hits = 0, all = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << total); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != n) continue;
    long long s = 0;
    for (std::size_t i = 0; i < total; ++i) {
      if (mask & (std::size_t{1} << i)) s += ranks[i];
    }
    ++all;
    if (std::llabs(2 * s - mu_doubled) >= dev) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(all);
}

// Distinct magnitudes drawn from a shuffled integer pool: tie-free for every
// test, and signed-rank inputs get random signs.
std::vector<double> distinct_values(SplitMix64& rng, std::size_t count) {
  static thread_local std::vector<int> pool;
  pool.resize(200);
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i + 1);
  rng.shuffle(pool);
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = pool[i] / 16.0;
  return values;
}

TEST(Acceptance, ExactTestOracles) {
  Criterion criterion(3, "exact test oracles");
  const auto start = Clock::now();
  const double tolerance = 1e-12;
  SplitMix64 rng(0xacce97ed);
  std::size_t inputs = 0;

  for (std::size_t n = 1; n <= 20; ++n) {
    for (int round = 0; round < 150; ++round) {
      std::vector<double> diffs = distinct_values(rng, n);
      std::size_t positives = 0;
      for (double& d : diffs) {
        if (rng.next() & 1) d = -d;
        if (d > 0) ++positives;
      }
      const TestResult result = sign_test(diffs);
      ASSERT_NEAR(result.p_value, sign_oracle_p(positives, n), tolerance)
          << "sign n=" << n;
      ++inputs;
    }
  }

  for (std::size_t n = 1; n <= 12; ++n) {
    for (int round = 0; round < 300; ++round) {
      std::vector<double> diffs = distinct_values(rng, n);
      for (double& d : diffs) {
        if (rng.next() & 1) d = -d;
      }
      const TestResult result = wilcoxon_signed_rank(diffs);
      ASSERT_TRUE(result.exact);
      ASSERT_NEAR(result.p_value, signed_rank_oracle_p(diffs), tolerance)
          << "signed-rank n=" << n;
      ++inputs;
    }
  }

  for (std::size_t n = 1; n <= 9; ++n) {
    for (std::size_t m = 1; n + m <= 10; ++m) {
      for (int round = 0; round < 80; ++round) {
        std::vector<double> pooled = distinct_values(rng, n + m);
        std::vector<double> xs(pooled.begin(), pooled.begin() + n);
        std::vector<double> ys(pooled.begin() + n, pooled.end());
        const TestResult result = wilcoxon_rank_sum(xs, ys);
        ASSERT_TRUE(result.exact);
        ASSERT_NEAR(result.p_value, rank_sum_oracle_p(xs, ys), tolerance)
            << "rank-sum n=" << n << " m=" << m;
        ++inputs;
      }
    }
  }

  EXPECT_GE(inputs, 10000u);
  EXPECT_LT(seconds_since(start), 60.0);
}

// ---------------------------------------------------------------------------
// 4. t test against numerical integration of the t density (Simpson's rule
//    on the compactified tail, no special functions): 100 random difference
//    vectors, n in [5, 50], agreement within 1e-6.

double t_density_oracle_p(double t, double nu) {
  const auto tail_integral = [nu](double from) {
    const int segments = 1 << 14;
    const long double h = 1.0L / segments;
    long double sum = 0.0L;
    for (int i = 0; i < segments; ++i) {  // u = 1 endpoint integrand -> 0
      const long double u = i * h;
      const long double weight = (i == 0) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
      const long double x = from + u / (1.0L - u);
      const long double value =
          std::pow(1.0L + x * x / nu, -(nu + 1.0L) / 2.0L) / ((1.0L - u) * (1.0L - u));
      sum += weight * value;
    }
    return sum * h / 3.0L;
  };
  return static_cast<double>(tail_integral(std::fabs(t)) / tail_integral(0.0));
}

TEST(Acceptance, TTestIntegrationOracle) {
  Criterion criterion(4, "t-test integration oracle");
  SplitMix64 rng(0x7e57);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 5 + rng.below(46);  // [5, 50]
    std::vector<double> diffs(n);
    for (double& d : diffs) d = uniform01(rng) - 0.45;
    const TestResult result = paired_t(diffs);
    const double oracle =
        t_density_oracle_p(result.statistic, static_cast<double>(n - 1));
    ASSERT_NEAR(result.p_value, oracle, 1e-6) << "n=" << n << " t=" << result.statistic;
  }
}

// ---------------------------------------------------------------------------
// 5. Bootstrap: doubly stochastic tables, certain ranks under dominance, the
//    exactly enumerable two-run upset probability, bitwise determinism, and
//    the nominal-scale timing budget.

MetricMatrix random_matrix(std::size_t runs, std::size_t queries, std::uint64_t seed) {
  MetricMatrix matrix;
  for (std::size_t r = 0; r < runs; ++r) matrix.run_ids.push_back("run" + std::to_string(r));
  for (std::size_t q = 0; q < queries; ++q) {
    matrix.query_ids.push_back("q" + std::to_string(q));
  }
  SplitMix64 rng(seed);
  matrix.scores.resize(runs * queries);
  for (double& s : matrix.scores) s = uniform01(rng);
  return matrix;
}

TEST(Acceptance, BootstrapDistribution) {
  Criterion criterion(5, "bootstrap rank distribution");

  // (a) Rows and columns of the proportion table both sum to 1 (1e-12).
  for (const auto& [runs, queries] : {std::pair<std::size_t, std::size_t>{3, 4},
                                      {5, 9}, {8, 12}}) {
    const MetricMatrix matrix = random_matrix(runs, queries, 77 + runs);
    for (Aggregation agg : {Aggregation::Mean, Aggregation::Median}) {
      const RankDistribution dist = bootstrap_ranks(matrix, 400, 5, agg);
      for (std::size_t r = 0; r < runs; ++r) {
        double row = 0.0, col = 0.0;
        for (std::size_t k = 1; k <= runs; ++k) {
          row += dist.proportion_at(r, k);
          col += dist.proportion_at(k - 1, r + 1);
        }
        ASSERT_NEAR(row, 1.0, 1e-12);
        ASSERT_NEAR(col, 1.0, 1e-12);
      }
    }
  }

  // (b) A run that dominates every query is rank 1 in all trials.
  MetricMatrix dominance;
  dominance.run_ids = {"top", "mid", "low"};
  dominance.query_ids = {"q1", "q2", "q3"};
  dominance.scores = {0.9, 0.9, 0.9, 0.5, 0.5, 0.5, 0.1, 0.1, 0.1};
  const RankDistribution certain = bootstrap_ranks(dominance, 1000, 11);
  EXPECT_EQ(certain.proportion_at(0, 1), 1.0);
  EXPECT_EQ(certain.proportion_at(1, 2), 1.0);
  EXPECT_EQ(certain.proportion_at(2, 3), 1.0);

  // (c) Two runs over four queries with per-query scores (1,1,1,0) and
  // (0,0,0,1): enumerating all 4^4 equally likely resamples, the second run
  // outranks the first in exactly 13 of 256 (ties keep input order). A
  // 100,000-trial estimate must land within 3 binomial standard deviations.
  MetricMatrix upset;
  upset.run_ids = {"a", "b"};
  upset.query_ids = {"q1", "q2", "q3", "q4"};
  upset.scores = {1, 1, 1, 0, 0, 0, 0, 1};
  const int trials = 100000;
  const RankDistribution ab = bootstrap_ranks(upset, trials, 2026);
  const double exact = 13.0 / 256.0;
  const double sigma = std::sqrt(exact * (1.0 - exact) / trials);
  EXPECT_NEAR(ab.proportion_at(1, 1), exact, 3.0 * sigma);

  // (d) Same seed, same report bytes.
  const MetricMatrix fixed = random_matrix(6, 20, 99);
  const RankDistribution first = bootstrap_ranks(fixed, 300, 42);
  const RankDistribution second = bootstrap_ranks(fixed, 300, 42);
  EXPECT_EQ(first.proportions, second.proportions);
  ReportMeta meta;
  meta.command = "bootstrap";
  EXPECT_EQ(render_csv(bootstrap_report(first, meta)),
            render_csv(bootstrap_report(second, meta)));

  // (e) Nominal leaderboard scale: 1000 trials x 40 runs x 5800 queries in
  // under five seconds.
  const MetricMatrix big = random_matrix(40, 5800, 7);
  const auto start = Clock::now();
  const RankDistribution timed = bootstrap_ranks(big, 1000, 1);
  const double elapsed = seconds_since(start);
  EXPECT_EQ(timed.trials, 1000);
  EXPECT_LT(elapsed, 5.0);
}

// ---------------------------------------------------------------------------
// 6. Split-half agreement protocol: a constant shift is detected in full
//    agreement by the sign test; rates partition the unit mass; the percent
//    significant is an aggregation-independent quantity; identical runs can
//    never disagree.

TEST(Acceptance, SplitAgreement) {
  Criterion criterion(6, "split-half agreement");

  // Constant +0.1 shift over 40 queries: every half finds the same winner.
  MetricMatrix shifted;
  shifted.run_ids = {"better", "base"};
  SplitMix64 rng(64001);
  for (int q = 0; q < 40; ++q) shifted.query_ids.push_back("q" + std::to_string(q));
  std::vector<double> base(40);
  for (double& v : base) v = 0.3 + 0.4 * uniform01(rng);
  for (double v : base) shifted.scores.push_back(v + 0.1);
  for (double v : base) shifted.scores.push_back(v);
  const AgreementReport sign_report = agreement_analysis(
      shifted, TestMethod::SignTest, Aggregation::Mean, 100, 17, 0.05);
  EXPECT_EQ(sign_report.agree_rate, 1.0);
  EXPECT_EQ(sign_report.disagree_rate, 0.0);

  // Random leaderboard: rates sum to one and perc_signif matches across
  // aggregations for every test.
  const MetricMatrix matrix = random_matrix(4, 12, 123);
  for (TestMethod test : {TestMethod::SignTest, TestMethod::WilcoxonRankSum,
                          TestMethod::WilcoxonSignedRank, TestMethod::PairedT}) {
    const AgreementReport mean_report =
        agreement_analysis(matrix, test, Aggregation::Mean, 60, 5, 0.05);
    const AgreementReport median_report =
        agreement_analysis(matrix, test, Aggregation::Median, 60, 5, 0.05);
    ASSERT_NEAR(mean_report.agree_rate + mean_report.partial_rate +
                    mean_report.disagree_rate,
                1.0, 1e-12);
    ASSERT_NEAR(median_report.agree_rate + median_report.partial_rate +
                    median_report.disagree_rate,
                1.0, 1e-12);
    // Significance of a half does not involve the aggregate, so the rate is
    // identical under mean and median.
    ASSERT_EQ(mean_report.perc_signif, median_report.perc_signif);
  }

  // Twin runs: no half-split can ever disagree with itself.
  MetricMatrix twins;
  twins.run_ids = {"copy1", "copy2"};
  for (int q = 0; q < 10; ++q) {
    twins.query_ids.push_back("q" + std::to_string(q));
  }
  std::vector<double> row(10);
  for (double& v : row) v = uniform01(rng);
  twins.scores = row;
  twins.scores.insert(twins.scores.end(), row.begin(), row.end());
  for (TestMethod test : {TestMethod::SignTest, TestMethod::WilcoxonRankSum,
                          TestMethod::WilcoxonSignedRank, TestMethod::PairedT}) {
    const AgreementReport report =
        agreement_analysis(twins, test, Aggregation::Mean, 50, 3, 0.05);
    ASSERT_EQ(report.disagree_rate, 0.0);
  }
}

// ---------------------------------------------------------------------------
// 7. Holdout divergence: a run tuned to the visible queries ranks first
//    there and strictly worse on the held-out set; an identical partition
//    yields identical orderings.

ranklab::Run positioned_run(const std::string& id,
                            const std::map<QueryId, int>& good_position) {
  ranklab::Run run;
  run.run_id = id;
  for (const auto& [query, position] : good_position) {
    std::vector<RankedResult> page;
    double score = 100.0;
    for (int i = 1; i < position; ++i) {
      page.push_back({"filler-" + std::to_string(i), score});
      score -= 1.0;
    }
    page.push_back({"good", score});
    run.results[query] = std::move(page);
  }
  return run;
}

TEST(Acceptance, HoldoutDivergence) {
  Criterion criterion(7, "holdout divergence");

  QueryPartition partition;
  partition.public_ids = {"pub1", "pub2", "pub3", "pub4"};
  partition.private_ids = {"prv1", "prv2", "prv3", "prv4"};
  std::set<QueryId> all = partition.public_ids;
  all.insert(partition.private_ids.begin(), partition.private_ids.end());
  Qrels qrels;
  qrels.scheme_id = "sparse";
  qrels.max_grade = 1;
  for (const QueryId& q : all) qrels.grades[q]["good"] = 1;

  std::map<QueryId, int> overfit, honest;
  for (const QueryId& q : partition.public_ids) {
    overfit[q] = 1;
    honest[q] = 2;
  }
  for (const QueryId& q : partition.private_ids) {
    overfit[q] = 10;
    honest[q] = 2;
  }
  const std::vector<ranklab::Run> runs = {positioned_run("overfit", overfit),
                                          positioned_run("honest", honest)};
  const HoldoutReport report = holdout_compare(
      runs, partition, {qrels}, {parse_metric_spec("rr@10")}, 200, 42);
  ASSERT_EQ(report.conditions.size(), 2u);
  int public_rank = 0, private_rank = 0;
  for (const ConditionResult& cond : report.conditions) {
    if (cond.condition.queryset == "public") public_rank = cond.rank_of.at("overfit");
    if (cond.condition.queryset == "private") private_rank = cond.rank_of.at("overfit");
  }
  EXPECT_EQ(public_rank, 1);
  EXPECT_GT(private_rank, public_rank);

  // Degenerate partition: both query sets identical, orderings identical.
  QueryPartition same;
  same.public_ids = partition.public_ids;
  same.private_ids = partition.public_ids;
  std::map<QueryId, int> pos1, pos2;
  for (const QueryId& q : same.public_ids) {
    pos1[q] = 1;
    pos2[q] = 3;
  }
  const std::vector<ranklab::Run> mirrored_runs = {positioned_run("r1", pos1),
                                                   positioned_run("r2", pos2)};
  const HoldoutReport mirrored = holdout_compare(mirrored_runs, same, {qrels},
                                                 {parse_metric_spec("rr@10")}, 100, 7);
  ASSERT_EQ(mirrored.conditions.size(), 2u);
  EXPECT_EQ(mirrored.conditions[0].leaderboard, mirrored.conditions[1].leaderboard);
  EXPECT_EQ(mirrored.conditions[0].aggregates, mirrored.conditions[1].aggregates);
}

// ---------------------------------------------------------------------------
// 8. Metric properties over 100,000 random result pages, plus the worked
//    three-slot example to 1e-9.

TEST(Acceptance, MetricProperties) {
  Criterion criterion(8, "metric properties");

  SplitMix64 rng(0x5e12f);
  int violations = 0;
  for (int iter = 0; iter < 100000; ++iter) {
    const int depth = 1 + static_cast<int>(rng.below(10));
    std::vector<int> ranked(depth);
    for (int& g : ranked) g = static_cast<int>(rng.below(4));
    std::vector<int> population = ranked;
    const int extra = static_cast<int>(rng.below(3));
    for (int i = 0; i < extra; ++i) population.push_back(static_cast<int>(rng.below(4)));
    const int k = 1 + static_cast<int>(rng.below(10));

    std::vector<int> binary(depth);
    for (int i = 0; i < depth; ++i) binary[i] = ranked[i] >= 1 ? 1 : 0;
    int relevant = 0;
    for (int b : binary) relevant += b;

    // RR lands on {0} or {1/i : i <= k}.
    const double rr = reciprocal_rank(binary, k);
    bool rr_legal = rr == 0.0;
    for (int i = 1; i <= std::min(k, depth); ++i) rr_legal |= rr == 1.0 / i;
    if (!rr_legal) ++violations;

    // Range [0, 1] for the normalized metrics.
    const double nd = ndcg(ranked, population, k);
    const double ap = average_precision(binary, relevant, k);
    const double nc = ncg(ranked, population, k);
    if (!(nd >= 0.0 && nd <= 1.0)) ++violations;
    if (!(ap >= 0.0 && ap <= 1.0)) ++violations;
    if (!(nc >= 0.0 && nc <= 1.0)) ++violations;

    // NDCG is 1 exactly when the top-k gains match the ideal top-k gains.
    std::vector<int> ideal = population;
    std::sort(ideal.begin(), ideal.end(), std::greater<int>());
    bool ideal_has_gain = false;
    bool optimal = true;
    for (int i = 0; i < k; ++i) {
      const int got = i < depth ? ranked[i] : 0;
      const int best = i < static_cast<int>(ideal.size()) ? ideal[i] : 0;
      if (best > 0) ideal_has_gain = true;
      if (got != best) optimal = false;
    }
    if (ideal_has_gain && (nd == 1.0) != optimal) ++violations;

    // Upgrading one retrieved grade never hurts, population held fixed.
    const int pos = static_cast<int>(rng.below(static_cast<std::uint64_t>(depth)));
    std::vector<int> upgraded = ranked;
    upgraded[pos] += 1;
    std::vector<int> upgraded_population = population;
    upgraded_population.push_back(upgraded[pos]);
    if (ndcg(upgraded, upgraded_population, k) + 1e-12 <
        ndcg(ranked, upgraded_population, k)) {
      ++violations;
    }
    if (ncg(upgraded, upgraded_population, k) + 1e-12 <
        ncg(ranked, upgraded_population, k)) {
      ++violations;
    }
    std::vector<int> upgraded_binary(depth);
    for (int i = 0; i < depth; ++i) upgraded_binary[i] = upgraded[i] >= 1 ? 1 : 0;
    if (reciprocal_rank(upgraded_binary, k) < reciprocal_rank(binary, k)) ++violations;
  }
  EXPECT_EQ(violations, 0);

  // Worked example: ranked (1,0,2) against population {2,1,0} at depth 3.
  const std::vector<int> ranked = {1, 0, 2};
  const std::vector<int> ideal = {2, 1, 0};
  const double expected = 2.5 / (3.0 + 1.0 / std::log2(3.0));
  EXPECT_NEAR(ndcg(ranked, ideal, 3), expected, 1e-9);
  EXPECT_NEAR(expected, 0.68853, 5e-6);
}

// ---------------------------------------------------------------------------
// 9. Submission monitor: group totals in order, the three-in-one-month case
//    flags exactly one violation, and best-so-far trajectories are strictly
//    increasing and running-max-consistent on random manifests.

Submission submission(const std::string& run, const std::string& group, Date date) {
  Submission s;
  s.run_id = run;
  s.group_id = group;
  s.submitted_on = date;
  s.path = run + ".run";
  return s;
}

TEST(Acceptance, SubmissionMonitor) {
  Criterion criterion(9, "submission monitor");

  // Group totals (12, 11, 7, 2), reported largest first.
  LeaderboardManifest manifest;
  manifest.task_id = "task";
  const std::vector<std::pair<std::string, int>> sizes = {
      {"heavy", 12}, {"busy", 11}, {"steady", 7}, {"rare", 2}};
  int serial = 0;
  for (const auto& [group, count] : sizes) {
    for (int i = 0; i < count; ++i) {
      const Date date{2020, 1 + (serial % 12), 1 + (serial % 27)};
      manifest.submissions.push_back(
          submission("run" + std::to_string(serial++), group, date));
    }
  }
  const std::vector<GroupStats> stats = group_stats(manifest);
  ASSERT_EQ(stats.size(), 4u);
  EXPECT_EQ(stats[0].group_id, "heavy");
  EXPECT_EQ(stats[0].submissions, 12u);
  EXPECT_EQ(stats[1].group_id, "busy");
  EXPECT_EQ(stats[1].submissions, 11u);
  EXPECT_EQ(stats[2].group_id, "steady");
  EXPECT_EQ(stats[2].submissions, 7u);
  EXPECT_EQ(stats[3].group_id, "rare");
  EXPECT_EQ(stats[3].submissions, 2u);

  // Three submissions in one calendar month against a limit of two: exactly
  // one violation, the one dated the 25th.
  LeaderboardManifest january;
  january.task_id = "task";
  january.submissions = {submission("run-a", "g", Date{2020, 1, 5}),
                         submission("run-b", "g", Date{2020, 1, 20}),
                         submission("run-c", "g", Date{2020, 1, 25})};
  const PolicyCheckReport checked = check_submission_policy(january, SubmissionPolicy{});
  ASSERT_EQ(checked.violations.size(), 1u);
  EXPECT_EQ(checked.violations[0].run_id, "run-c");

  // 1000 random manifests: flagged scores strictly increase from the
  // baseline, and every flag equals "score exceeds the running maximum".
  SplitMix64 rng(90210);
  for (int round = 0; round < 1000; ++round) {
    LeaderboardManifest random_manifest;
    random_manifest.task_id = "task";
    std::map<std::string, double> scores;
    const int count = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < count; ++i) {
      const std::string run = "r" + std::to_string(i);
      const Date date{2020, 1 + static_cast<int>(rng.below(12)),
                      1 + static_cast<int>(rng.below(28))};
      random_manifest.submissions.push_back(submission(run, "g", date));
      scores[run] = uniform01(rng);
    }
    const double baseline = uniform01(rng);
    const std::vector<SotaPoint> points =
        sota_trajectory(random_manifest, scores, baseline);
    double best = baseline;
    for (const SotaPoint& point : points) {
      ASSERT_EQ(point.is_current_sota, point.score > best);
      if (point.score > best) best = point.score;
    }
  }
}

}  // namespace
}  // namespace ranklab
