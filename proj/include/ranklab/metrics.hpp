#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ranklab/corpus.hpp"
#include "ranklab/errors.hpp"

namespace ranklab {

enum class MetricKind { ReciprocalRank, Ndcg, AveragePrecision, Ncg };

enum class GainScheme { Exponential, Linear };

enum class Aggregation { Mean, Median };

inline std::string to_string(Aggregation agg) {
  return agg == Aggregation::Mean ? "mean" : "median";
}

inline Aggregation parse_aggregation(std::string_view name) {
  if (name == "mean") return Aggregation::Mean;
  if (name == "median") return Aggregation::Median;
  throw ArgumentError("unknown aggregation '" + std::string(name) +
                      "' (expected mean or median)");
}

/// Mean, or median with the even-count midpoint convention.
inline double aggregate(std::span<const double> values, Aggregation agg) {
  if (values.empty()) throw ArgumentError("cannot aggregate an empty sample");
  if (agg == Aggregation::Mean) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

/// Metric selector, expressible as a compact string:
///   "rr@10", "ndcg@10", "map", "ncg@100"
/// with optional suffixes ":bin=2" (binarization threshold for rr/map)
/// and ":gain=linear" (ndcg/ncg gain function; default exponential).
struct MetricSpec {
  MetricKind kind = MetricKind::ReciprocalRank;
  std::optional<int> cutoff;                  // nullopt = unbounded
  std::optional<int> binarization_threshold;  // nullopt = scheme default
  GainScheme gain = GainScheme::Exponential;

  std::string to_string() const {
    std::string out;
    switch (kind) {
      case MetricKind::ReciprocalRank: out = "rr"; break;
      case MetricKind::Ndcg: out = "ndcg"; break;
      case MetricKind::AveragePrecision: out = "map"; break;
      case MetricKind::Ncg: out = "ncg"; break;
    }
    if (cutoff) out += "@" + std::to_string(*cutoff);
    if (binarization_threshold) out += ":bin=" + std::to_string(*binarization_threshold);
    if (gain == GainScheme::Linear) out += ":gain=linear";
    return out;
  }

  /// Effective binarization threshold for a labeling scheme: the explicit
  /// override if set, else 1 for binary schemes and 2 for graded ones.
  int resolve_threshold(const Qrels& qrels) const {
    const int limit = std::max(1, qrels.max_grade);
    if (binarization_threshold) {
      if (*binarization_threshold < 1 || *binarization_threshold > limit) {
        throw ArgumentError("binarization threshold " +
                            std::to_string(*binarization_threshold) + " outside [1, " +
                            std::to_string(limit) + "] for scheme '" + qrels.scheme_id + "'");
      }
      return *binarization_threshold;
    }
    return qrels.max_grade <= 1 ? 1 : 2;
  }

  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

inline MetricSpec parse_metric_spec(std::string_view text) {
  MetricSpec spec;
  std::string_view head = text;
  // Split off ":key=value" suffixes first.
  while (true) {
    auto colon = head.rfind(':');
    if (colon == std::string_view::npos) break;
    std::string_view option = head.substr(colon + 1);
    head = head.substr(0, colon);
    if (option.rfind("bin=", 0) == 0) {
      int value = 0;
      if (!detail::parse_number(option.substr(4), value) || value < 1) {
        throw ArgumentError("bad binarization threshold in metric '" + std::string(text) + "'");
      }
      spec.binarization_threshold = value;
    } else if (option.rfind("gain=", 0) == 0) {
      std::string_view scheme = option.substr(5);
      if (scheme == "linear") {
        spec.gain = GainScheme::Linear;
      } else if (scheme == "exp") {
        spec.gain = GainScheme::Exponential;
      } else {
        throw ArgumentError("unknown gain scheme in metric '" + std::string(text) + "'");
      }
    } else {
      throw ArgumentError("unknown option ':" + std::string(option) + "' in metric '" +
                          std::string(text) + "'");
    }
  }
  std::string_view name = head;
  if (auto at = head.find('@'); at != std::string_view::npos) {
    name = head.substr(0, at);
    int k = 0;
    if (!detail::parse_number(head.substr(at + 1), k) || k < 1) {
      throw ArgumentError("bad cutoff in metric '" + std::string(text) + "'");
    }
    spec.cutoff = k;
  }
  if (name == "rr") {
    spec.kind = MetricKind::ReciprocalRank;
  } else if (name == "ndcg") {
    spec.kind = MetricKind::Ndcg;
  } else if (name == "map" || name == "ap") {
    spec.kind = MetricKind::AveragePrecision;
  } else if (name == "ncg") {
    spec.kind = MetricKind::Ncg;
  } else {
    throw ArgumentError("unknown metric '" + std::string(text) + "'");
  }
  return spec;
}

/// Threshold graded judgments to binary: grade' = 1 iff grade >= threshold.
/// Accepts threshold 1 on an all-zero scheme (result is all zeros).
inline Qrels binarize(const Qrels& qrels, int threshold) {
  if (threshold < 1 || threshold > std::max(1, qrels.max_grade)) {
    throw ArgumentError("binarization threshold " + std::to_string(threshold) +
                        " outside [1, " + std::to_string(std::max(1, qrels.max_grade)) + "]");
  }
  Qrels out;
  out.scheme_id = qrels.scheme_id;
  out.max_grade = 0;
  for (const auto& [query, docs] : qrels.grades) {
    auto& target = out.grades[query];
    for (const auto& [doc, grade] : docs) {
      const int b = grade >= threshold ? 1 : 0;
      target.emplace(doc, b);
      out.max_grade = std::max(out.max_grade, b);
    }
  }
  return out;
}

namespace detail {

inline double gain_of(int grade, GainScheme scheme) {
  if (scheme == GainScheme::Linear) return static_cast<double>(grade);
  return std::ldexp(1.0, grade) - 1.0;  // 2^g - 1
}

inline std::size_t effective_depth(std::size_t size, std::optional<int> cutoff) {
  if (!cutoff) return size;
  return std::min(size, static_cast<std::size_t>(*cutoff));
}

}  // namespace detail

/// 1/r for the first position r <= k holding a relevant (grade >= 1)
/// document, else 0.
inline double reciprocal_rank(std::span<const int> grades, std::optional<int> cutoff) {
  const std::size_t depth = detail::effective_depth(grades.size(), cutoff);
  for (std::size_t i = 0; i < depth; ++i) {
    if (grades[i] >= 1) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

/// DCG@k / IDCG@k with discount 1/log2(i+1). The ideal is computed from the
/// query's full grade population. IDCG = 0 yields 0.
inline double ndcg(std::span<const int> ranked, std::span<const int> ideal_population,
                   std::optional<int> cutoff, GainScheme gain = GainScheme::Exponential) {
  std::vector<int> ideal(ideal_population.begin(), ideal_population.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double dcg = 0.0;
  const std::size_t depth = detail::effective_depth(ranked.size(), cutoff);
  for (std::size_t i = 0; i < depth; ++i) {
    dcg += detail::gain_of(ranked[i], gain) / std::log2(static_cast<double>(i + 2));
  }
  double idcg = 0.0;
  const std::size_t ideal_depth = detail::effective_depth(ideal.size(), cutoff);
  for (std::size_t i = 0; i < ideal_depth; ++i) {
    idcg += detail::gain_of(ideal[i], gain) / std::log2(static_cast<double>(i + 2));
  }
  return idcg == 0.0 ? 0.0 : dcg / idcg;
}

/// (1/R) * sum of precision@r over relevant ranks r within the cutoff;
/// 0 when R = 0. Input grades must already be binary.
inline double average_precision(std::span<const int> binary_grades, int total_relevant,
                                std::optional<int> cutoff = std::nullopt) {
  if (total_relevant < 0) throw ArgumentError("total relevant count must be >= 0");
  if (total_relevant == 0) return 0.0;
  double sum = 0.0;
  int seen_relevant = 0;
  const std::size_t depth = detail::effective_depth(binary_grades.size(), cutoff);
  for (std::size_t i = 0; i < depth; ++i) {
    if (binary_grades[i] >= 1) {
      ++seen_relevant;
      sum += static_cast<double>(seen_relevant) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

/// Sum of top-k gains over sum of top-k ideal gains, no positional discount.
inline double ncg(std::span<const int> ranked, std::span<const int> ideal_population,
                  std::optional<int> cutoff, GainScheme gain = GainScheme::Exponential) {
  std::vector<int> ideal(ideal_population.begin(), ideal_population.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  double cg = 0.0;
  const std::size_t depth = detail::effective_depth(ranked.size(), cutoff);
  for (std::size_t i = 0; i < depth; ++i) cg += detail::gain_of(ranked[i], gain);
  double icg = 0.0;
  const std::size_t ideal_depth = detail::effective_depth(ideal.size(), cutoff);
  for (std::size_t i = 0; i < ideal_depth; ++i) icg += detail::gain_of(ideal[i], gain);
  return icg == 0.0 ? 0.0 : cg / icg;
}

/// Dense run x query score table. Row-major; rows follow the input run
/// order, columns the sorted query ids.
struct MetricMatrix {
  MetricSpec metric;
  std::vector<std::string> run_ids;
  std::vector<QueryId> query_ids;
  std::vector<double> scores;

  double at(std::size_t run, std::size_t query) const {
    return scores[run * query_ids.size() + query];
  }

  std::span<const double> row(std::size_t run) const {
    return {scores.data() + run * query_ids.size(), query_ids.size()};
  }
};

namespace detail {

inline std::vector<int> ranked_grades(const std::vector<RankedResult>& entries,
                                      const std::map<DocId, int>& judgments) {
  std::vector<int> grades;
  grades.reserve(entries.size());
  for (const auto& e : entries) {
    auto it = judgments.find(e.doc_id);
    grades.push_back(it == judgments.end() ? 0 : it->second);
  }
  return grades;
}

}  // namespace detail

/// Score every run on every query. Runs missing a query score 0; unjudged
/// retrieved documents count as grade 0. Queries absent from the qrels
/// domain entirely are an argument error.
inline MetricMatrix score_matrix(const std::vector<Run>& runs, const Qrels& qrels,
                                 const MetricSpec& spec, const std::set<QueryId>& queries) {
  if (queries.empty()) throw ArgumentError("query set is empty");
  std::vector<QueryId> unjudged;
  for (const auto& query : queries) {
    if (!qrels.has_query(query)) unjudged.push_back(query);
  }
  if (!unjudged.empty()) {
    std::string joined;
    for (const auto& q : unjudged) {
      if (!joined.empty()) joined += ", ";
      joined += q;
    }
    throw ArgumentError("queries absent from labeling scheme '" + qrels.scheme_id +
                        "': " + joined);
  }

  const bool binary_metric =
      spec.kind == MetricKind::ReciprocalRank || spec.kind == MetricKind::AveragePrecision;
  Qrels working = binary_metric ? binarize(qrels, spec.resolve_threshold(qrels)) : qrels;

  MetricMatrix matrix;
  matrix.metric = spec;
  matrix.query_ids.assign(queries.begin(), queries.end());
  matrix.scores.resize(runs.size() * matrix.query_ids.size(), 0.0);
  for (const auto& run : runs) matrix.run_ids.push_back(run.run_id);

  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t q = 0; q < matrix.query_ids.size(); ++q) {
      const auto& judgments = working.grades.at(matrix.query_ids[q]);
      const auto* entries = runs[r].results_for(matrix.query_ids[q]);
      double score = 0.0;
      if (entries != nullptr) {
        const std::vector<int> grades = detail::ranked_grades(*entries, judgments);
        switch (spec.kind) {
          case MetricKind::ReciprocalRank:
            score = reciprocal_rank(grades, spec.cutoff);
            break;
          case MetricKind::Ndcg: {
            std::vector<int> population;
            population.reserve(judgments.size());
            for (const auto& [doc, grade] : judgments) population.push_back(grade);
            score = ndcg(grades, population, spec.cutoff, spec.gain);
            break;
          }
          case MetricKind::AveragePrecision: {
            int total_relevant = 0;
            for (const auto& [doc, grade] : judgments) total_relevant += grade >= 1 ? 1 : 0;
            score = average_precision(grades, total_relevant, spec.cutoff);
            break;
          }
          case MetricKind::Ncg: {
            std::vector<int> population;
            population.reserve(judgments.size());
            for (const auto& [doc, grade] : judgments) population.push_back(grade);
            score = ncg(grades, population, spec.cutoff, spec.gain);
            break;
          }
        }
      }
      matrix.scores[r * matrix.query_ids.size() + q] = score;
    }
  }
  return matrix;
}

}  // namespace ranklab
