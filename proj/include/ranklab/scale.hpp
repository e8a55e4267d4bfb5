#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ranklab/errors.hpp"
#include "ranklab/metrics.hpp"
#include "ranklab/rational.hpp"

namespace ranklab {

/// All result pages of a fixed depth over a fixed grade alphabet, ordered
/// descending-lexicographically: (g-1,...,g-1) first, (0,...,0) last.
struct StateSpace {
  int depth = 0;
  int grades = 0;
  std::vector<std::vector<int>> states;
};

inline StateSpace enumerate_states(int depth, int grades,
                                   std::int64_t cap = std::int64_t{1} << 20) {
  if (depth < 1) throw ArgumentError("state space: depth must be at least 1");
  if (grades < 2) throw ArgumentError("state space: need at least 2 grades");
  std::int64_t size = 1;
  for (int i = 0; i < depth; ++i) {
    if (size > cap / grades) {
      throw ResourceError("state space of " + std::to_string(grades) + "^" +
                          std::to_string(depth) + " states exceeds the cap of " +
                          std::to_string(cap));
    }
    size *= grades;
  }

  StateSpace space;
  space.depth = depth;
  space.grades = grades;
  space.states.reserve(static_cast<std::size_t>(size));
  for (std::int64_t v = size - 1; v >= 0; --v) {
    std::vector<int> state(depth);
    std::int64_t rest = v;
    for (int pos = depth - 1; pos >= 0; --pos) {
      state[pos] = static_cast<int>(rest % grades);
      rest /= grades;
    }
    space.states.push_back(std::move(state));
  }
  return space;
}

namespace detail {

inline Rational state_gain(int grade, GainScheme gain) {
  if (gain == GainScheme::Linear) return Rational(grade);
  if (grade > 62) throw ResourceError("exponential gain overflows for grade > 62");
  return Rational((std::int64_t{1} << grade) - 1);
}

inline std::size_t state_depth(std::size_t length, std::optional<int> cutoff) {
  if (!cutoff) return length;
  return std::min(length, static_cast<std::size_t>(*cutoff));
}

inline Rational rr_on_state(const std::vector<int>& state, int threshold,
                            std::optional<int> cutoff) {
  const std::size_t depth = state_depth(state.size(), cutoff);
  for (std::size_t i = 0; i < depth; ++i) {
    if (state[i] >= threshold) return Rational(1, static_cast<std::int64_t>(i) + 1);
  }
  return Rational(0);
}

/// The state is its own judged population: every relevant grade in the tuple
/// counts toward R, while the cutoff caps only the scored prefix.
inline Rational ap_on_state(const std::vector<int>& state, int threshold,
                            std::optional<int> cutoff) {
  std::int64_t total_relevant = 0;
  for (int g : state) total_relevant += g >= threshold ? 1 : 0;
  if (total_relevant == 0) return Rational(0);
  const std::size_t depth = state_depth(state.size(), cutoff);
  Rational sum(0);
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (state[i] >= threshold) {
      ++hits;
      sum = sum + Rational(hits, static_cast<std::int64_t>(i) + 1);
    }
  }
  return sum / Rational(total_relevant);
}

/// Self-normalized cumulative gain: the ideal reorders the state's own
/// grades descending. No rank discount, so values stay rational.
inline Rational ncg_on_state(const std::vector<int>& state, GainScheme gain,
                             std::optional<int> cutoff) {
  std::vector<int> ideal(state);
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const std::size_t depth = state_depth(state.size(), cutoff);
  Rational cg(0), icg(0);
  for (std::size_t i = 0; i < depth; ++i) {
    cg = cg + state_gain(state[i], gain);
    icg = icg + state_gain(ideal[i], gain);
  }
  if (icg == Rational(0)) return Rational(0);
  return cg / icg;
}

}  // namespace detail

/// Exact metric value of every state, aligned with space.states. NDCG is
/// rejected: its logarithmic discounts are irrational, and this analysis is
/// defined over exact rationals only.
inline std::vector<Rational> metric_state_values(const StateSpace& space,
                                                 const MetricSpec& spec) {
  if (spec.kind == MetricKind::Ndcg) {
    throw ArgumentError(
        "ndcg takes irrational values (log discounts); exact value-set analysis "
        "supports rr, map, and ncg");
  }
  const int max_grade = space.grades - 1;
  const int threshold = spec.binarization_threshold.value_or(1);
  if (threshold < 1 || threshold > std::max(1, max_grade)) {
    throw ArgumentError("binarization threshold " + std::to_string(threshold) +
                        " outside [1, " + std::to_string(std::max(1, max_grade)) +
                        "] for a " + std::to_string(space.grades) + "-grade state space");
  }

  std::vector<Rational> values;
  values.reserve(space.states.size());
  for (const std::vector<int>& state : space.states) {
    switch (spec.kind) {
      case MetricKind::ReciprocalRank:
        values.push_back(detail::rr_on_state(state, threshold, spec.cutoff));
        break;
      case MetricKind::AveragePrecision:
        values.push_back(detail::ap_on_state(state, threshold, spec.cutoff));
        break;
      case MetricKind::Ncg:
        values.push_back(detail::ncg_on_state(state, spec.gain, spec.cutoff));
        break;
      case MetricKind::Ndcg: break;  // rejected above
    }
  }
  return values;
}

/// Distinct metric values over the whole state space, ascending.
inline std::vector<Rational> metric_value_set(const StateSpace& space,
                                              const MetricSpec& spec) {
  const std::vector<Rational> values = metric_state_values(space, spec);
  std::set<Rational> distinct(values.begin(), values.end());
  return std::vector<Rational>(distinct.begin(), distinct.end());
}

/// First failing instance of the solvability condition: the pair (a, b)
/// admits the difference gap = c - d, but a witness value is missing from
/// the set. missing lists the unrealizable values (a - gap and/or b + gap),
/// ascending.
struct SolvabilityCounterexample {
  Rational a, b, c, d;
  Rational gap;
  std::vector<Rational> missing;
};

struct ScaleCheckResult {
  std::vector<Rational> value_set;  // distinct, ascending
  bool equi_spaced = false;
  std::vector<Rational> gaps;  // distinct consecutive gaps, ascending
  bool solvable = false;
  std::optional<SolvabilityCounterexample> counterexample;
};

/// Checks the difference-structure solvability condition on a value set:
/// for every a, b and every realizable difference 0 <= gap <= a - b, the
/// values a - gap and b + gap must both be realizable. Also reports whether
/// consecutive values are equi-spaced (which implies solvability).
inline ScaleCheckResult solvability_check(const std::vector<Rational>& value_set) {
  if (value_set.empty()) throw ArgumentError("solvability check: empty value set");
  const std::set<Rational> distinct(value_set.begin(), value_set.end());
  constexpr std::size_t kValueCap = 512;
  if (distinct.size() > kValueCap) {
    throw ResourceError("value set of " + std::to_string(distinct.size()) +
                        " exceeds the solvability-check cap of " +
                        std::to_string(kValueCap));
  }
  const std::vector<Rational> v(distinct.begin(), distinct.end());

  ScaleCheckResult result;
  result.value_set = v;
  std::set<Rational> gap_set;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) gap_set.insert(v[i + 1] - v[i]);
  result.gaps.assign(gap_set.begin(), gap_set.end());
  result.equi_spaced = gap_set.size() <= 1;

  const auto contains = [&](const Rational& x) { return distinct.count(x) != 0; };

  std::set<Rational> deltas;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) deltas.insert(v[j] - v[i]);
  }

  result.solvable = true;
  for (const Rational& delta : deltas) {  // ascending, so smallest gap first
    bool holds = true;
    for (const Rational& x : v) {
      if (x - v.front() >= delta && !contains(x - delta)) holds = false;
      if (v.back() - x >= delta && !contains(x + delta)) holds = false;
      if (!holds) break;
    }
    if (holds) continue;

    // Locate the first failing quadruple: a scanned from the top, b from the
    // bottom, so the widest pair (max, min) reports first.
    result.solvable = false;
    SolvabilityCounterexample example;
    example.gap = delta;
    bool found = false;
    for (std::size_t ai = v.size(); ai-- > 0 && !found;) {
      for (std::size_t bi = 0; bi < ai && !found; ++bi) {
        if (v[ai] - v[bi] < delta) continue;
        std::vector<Rational> missing;
        if (!contains(v[ai] - delta)) missing.push_back(v[ai] - delta);
        if (!contains(v[bi] + delta)) missing.push_back(v[bi] + delta);
        if (missing.empty()) continue;
        std::sort(missing.begin(), missing.end());
        example.a = v[ai];
        example.b = v[bi];
        example.missing = std::move(missing);
        found = true;
      }
    }
    for (std::size_t di = 0; di < v.size(); ++di) {
      if (contains(v[di] + delta)) {
        example.d = v[di];
        example.c = v[di] + delta;
        break;
      }
    }
    result.counterexample = std::move(example);
    break;
  }
  return result;
}

/// One-call analysis: enumerate the state space, compute the exact value
/// set, and check spacing and solvability.
inline ScaleCheckResult scale_check(const MetricSpec& spec, int depth, int grades,
                                    std::int64_t cap = std::int64_t{1} << 20) {
  return solvability_check(metric_value_set(enumerate_states(depth, grades, cap), spec));
}

}  // namespace ranklab
