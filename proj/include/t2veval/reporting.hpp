#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "t2veval/alignment.hpp"
#include "t2veval/benchmark.hpp"
#include "t2veval/suite.hpp"

namespace t2veval {

enum class Mark { none, best, second };

struct LeaderboardRow {
  std::string model_id;
  std::map<std::string, double> metrics;  // raw aggregates
  std::map<std::string, int> ranks;       // 1 = best
  std::map<std::string, Mark> marks;
  std::map<Aspect, std::optional<double>> aspects;
  std::map<Aspect, int> aspect_ranks;
  std::optional<double> subjective_likeness;
  std::optional<double> comprehensive;
  std::optional<int> comprehensive_rank;
  bool complete = true;
  friend bool operator==(const LeaderboardRow&, const LeaderboardRow&) = default;
};

struct Leaderboard {
  std::vector<std::string> metric_ids;  // catalog order
  std::vector<LeaderboardRow> rows;     // by comprehensive score, then model id
  bool has_final_scores = false;
  bool paper_scale = false;

  const LeaderboardRow* find(std::string_view model_id) const;
  friend bool operator==(const Leaderboard&, const Leaderboard&) = default;
};

/// Ranks each column by its direction (target-match columns descending, unmarked);
/// ties break by model id. Throws Error listing the difference when `final_scores`
/// covers a different model set than `suites`.
Leaderboard build_leaderboard(const std::map<std::string, SuiteResult>& suites,
                              const std::vector<FinalScore>& final_scores = {}, bool paper_scale = false);

enum class GroupBy { none, meta_class, sub_type };
std::optional<GroupBy> parse_group_by(std::string_view s);  // none|meta|subtype
std::string_view to_string(GroupBy g);

struct RadarCell {
  double raw = 0.0;
  double normalized = 0.0;
  std::size_t count = 0;  // prompts contributing
  friend bool operator==(const RadarCell&, const RadarCell&) = default;
};

struct RadarData {
  GroupBy group_by = GroupBy::none;
  std::vector<std::string> groups;
  std::vector<std::string> metric_ids;
  std::vector<std::string> inverted;  // lower_better metrics mapped so the smallest raw value is 1
  std::string normalization;
  /// group -> model -> metric -> cell
  std::map<std::string, std::map<std::string, std::map<std::string, RadarCell>>> cells;
  friend bool operator==(const RadarData&, const RadarData&) = default;
};

/// Recomputes per-video metrics within each group's prompts and min-max normalizes
/// across models per metric and group (min = max gives 1.0). Metrics without
/// per-video values (IS) are left out.
RadarData build_breakdown(const std::map<std::string, SuiteResult>& suites, const Benchmark& benchmark, GroupBy group_by);

enum class ExportFormat { md, csv, json };
/// Throws ConfigError for an unknown name.
ExportFormat parse_export_format(std::string_view s);

std::string export_leaderboard(const Leaderboard& lb, ExportFormat format);
std::string export_radar(const RadarData& radar, ExportFormat format);

nlohmann::json to_json(const Leaderboard& lb);
Leaderboard leaderboard_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RadarData& r);
RadarData radar_from_json(const nlohmann::json& j);

/// Value as rendered: percentage metrics x100 on paper scale, two decimals.
std::string format_metric(std::string_view metric_id, double value, bool paper_scale);

}  // namespace t2veval
