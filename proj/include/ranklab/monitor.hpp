#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ranklab/corpus.hpp"
#include "ranklab/date.hpp"
#include "ranklab/errors.hpp"

namespace ranklab {

enum class PolicyWindow { CalendarMonth, RollingDays };

/// Submission-rate limits. The default mirrors the common leaderboard rule:
/// at most two runs per calendar month, of which at most one may be a tagged
/// minor variant of an earlier run.
struct SubmissionPolicy {
  int max_runs_per_window = 2;
  PolicyWindow window = PolicyWindow::CalendarMonth;
  int rolling_days = 30;  // used when window == RollingDays
  int max_minor_variants_per_window = 1;
};

struct PolicyViolation {
  std::string run_id;
  std::string group_id;
  Date date;
  std::string rule;  // "max-runs-per-window" | "max-minor-variants-per-window"
  std::string detail;
};

/// Violations are report-only; the minor-variant rule is checkable only when
/// the manifest tags variants, and is otherwise flagged unenforceable.
struct PolicyCheckReport {
  std::vector<PolicyViolation> violations;
  bool minor_variant_rule_enforceable = false;
};

struct GroupStats {
  std::string group_id;
  int submissions = 0;
  Date first;
  Date last;
};

struct SotaPoint {
  std::string run_id;
  Date date;
  double score = 0.0;
  bool is_current_sota = false;
};

namespace detail {

/// Chronological manifest order: date, then run_id. Sorting internally makes
/// every monitor operation independent of manifest file order.
inline std::vector<Submission> submissions_by_date(const LeaderboardManifest& manifest) {
  std::vector<Submission> subs = manifest.submissions;
  std::sort(subs.begin(), subs.end(), [](const Submission& a, const Submission& b) {
    if (a.submitted_on != b.submitted_on) return a.submitted_on < b.submitted_on;
    return a.run_id < b.run_id;
  });
  return subs;
}

}  // namespace detail

inline PolicyCheckReport check_submission_policy(const LeaderboardManifest& manifest,
                                                 const SubmissionPolicy& policy) {
  if (policy.max_runs_per_window < 0 || policy.max_minor_variants_per_window < 0) {
    throw ArgumentError("submission policy: limits must be non-negative");
  }
  if (policy.window == PolicyWindow::RollingDays && policy.rolling_days < 1) {
    throw ArgumentError("submission policy: rolling window must span at least 1 day");
  }

  const std::vector<Submission> subs = detail::submissions_by_date(manifest);

  PolicyCheckReport report;
  report.minor_variant_rule_enforceable =
      std::any_of(subs.begin(), subs.end(),
                  [](const Submission& s) { return !s.variant_group.empty(); });

  std::map<std::string, std::vector<const Submission*>> groups;
  for (const Submission& s : subs) groups[s.group_id].push_back(&s);

  for (const auto& [group, list] : groups) {
    // Count of prior same-window submissions for each entry; windows are
    // either the calendar month or a lookback of rolling_days days.
    auto in_same_window = [&](const Submission& earlier, const Submission& current) {
      if (policy.window == PolicyWindow::CalendarMonth) {
        return earlier.submitted_on.month_key() == current.submitted_on.month_key();
      }
      return earlier.submitted_on.serial_day() >
             current.submitted_on.serial_day() - policy.rolling_days;
    };
    for (std::size_t i = 0; i < list.size(); ++i) {
      int runs_in_window = 1;
      int variants_in_window = list[i]->variant_group.empty() ? 0 : 1;
      for (std::size_t j = 0; j < i; ++j) {
        if (!in_same_window(*list[j], *list[i])) continue;
        ++runs_in_window;
        if (!list[j]->variant_group.empty()) ++variants_in_window;
      }
      const std::string window_name = policy.window == PolicyWindow::CalendarMonth
                                          ? list[i]->submitted_on.month_key()
                                          : std::to_string(policy.rolling_days) + " days";
      if (runs_in_window > policy.max_runs_per_window) {
        report.violations.push_back(
            {list[i]->run_id, group, list[i]->submitted_on, "max-runs-per-window",
             "submission " + std::to_string(runs_in_window) + " within " + window_name +
                 " (limit " + std::to_string(policy.max_runs_per_window) + ")"});
      }
      if (report.minor_variant_rule_enforceable && !list[i]->variant_group.empty() &&
          variants_in_window > policy.max_minor_variants_per_window) {
        report.violations.push_back(
            {list[i]->run_id, group, list[i]->submitted_on,
             "max-minor-variants-per-window",
             "minor variant " + std::to_string(variants_in_window) + " within " +
                 window_name + " (limit " +
                 std::to_string(policy.max_minor_variants_per_window) + ")"});
      }
    }
  }

  std::sort(report.violations.begin(), report.violations.end(),
            [](const PolicyViolation& a, const PolicyViolation& b) {
              if (a.date != b.date) return a.date < b.date;
              if (a.run_id != b.run_id) return a.run_id < b.run_id;
              return a.rule < b.rule;
            });
  return report;
}

/// Per-group submission counts and date spans, largest groups first, ties by
/// group id.
inline std::vector<GroupStats> group_stats(const LeaderboardManifest& manifest) {
  std::map<std::string, GroupStats> acc;
  for (const Submission& s : manifest.submissions) {
    auto [it, fresh] = acc.try_emplace(s.group_id);
    GroupStats& g = it->second;
    if (fresh) {
      g.group_id = s.group_id;
      g.first = s.submitted_on;
      g.last = s.submitted_on;
    }
    ++g.submissions;
    if (s.submitted_on < g.first) g.first = s.submitted_on;
    if (g.last < s.submitted_on) g.last = s.submitted_on;
  }
  std::vector<GroupStats> rows;
  rows.reserve(acc.size());
  for (const auto& [id, g] : acc) rows.push_back(g);
  std::sort(rows.begin(), rows.end(), [](const GroupStats& a, const GroupStats& b) {
    if (a.submissions != b.submissions) return a.submissions > b.submissions;
    return a.group_id < b.group_id;
  });
  return rows;
}

/// Chronological submission scores with the running-max flag: a point is
/// current SOTA iff its score strictly exceeds the baseline and every earlier
/// score. Filtering on the flag yields the strictly increasing trajectory.
inline std::vector<SotaPoint> sota_trajectory(const LeaderboardManifest& manifest,
                                              const std::map<std::string, double>& scores,
                                              double baseline_score) {
  const std::vector<Submission> subs = detail::submissions_by_date(manifest);
  std::vector<SotaPoint> points;
  points.reserve(subs.size());
  double best = baseline_score;
  for (const Submission& s : subs) {
    const auto it = scores.find(s.run_id);
    if (it == scores.end()) {
      throw ArgumentError("no leaderboard score for run '" + s.run_id + "'");
    }
    SotaPoint point{s.run_id, s.submitted_on, it->second, false};
    if (point.score > best) {
      point.is_current_sota = true;
      best = point.score;
    }
    points.push_back(point);
  }
  return points;
}

}  // namespace ranklab
