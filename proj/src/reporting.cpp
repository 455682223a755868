#include "t2veval/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "t2veval/error.hpp"

namespace t2veval {

using nlohmann::json;

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view arrow(Direction d) {
  switch (d) {
    case Direction::higher_better: return "↑";
    case Direction::lower_better: return "↓";
    case Direction::target_match: return "→";
  }
  return "";
}

std::string_view aspect_title(Aspect a) {
  switch (a) {
    case Aspect::visual_quality: return "Visual Quality";
    case Aspect::tv_alignment: return "Text-Video Alignment";
    case Aspect::motion_quality: return "Motion Quality";
    case Aspect::temporal_consistency: return "Temporal Consistency";
    case Aspect::subjective_likeness: return "Subjective Likeness";
  }
  return "";
}

/// Rank 1 is best. Lower-better columns ascend, everything else descends.
std::map<std::string, int> rank_models(std::vector<std::pair<std::string, double>> values, Direction d) {
  std::sort(values.begin(), values.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return d == Direction::lower_better ? a.second < b.second : a.second > b.second;
    return a.first < b.first;
  });
  std::map<std::string, int> ranks;
  for (std::size_t i = 0; i < values.size(); ++i) ranks[values[i].first] = static_cast<int>(i + 1);
  return ranks;
}

std::string_view to_string(Mark m) {
  switch (m) {
    case Mark::none: return "none";
    case Mark::best: return "best";
    case Mark::second: return "second";
  }
  return "none";
}

Mark parse_mark(std::string_view s) {
  if (s == "best") return Mark::best;
  if (s == "second") return Mark::second;
  if (s == "none") return Mark::none;
  throw Error("unknown mark '" + std::string(s) + "'");
}

std::string scaled(double v, bool paper_scale) { return paper_scale ? fixed(v * 100.0, 2) : fixed(v, 4); }

}  // namespace

const LeaderboardRow* Leaderboard::find(std::string_view model_id) const {
  for (const auto& r : rows)
    if (r.model_id == model_id) return &r;
  return nullptr;
}

std::string format_metric(std::string_view metric_id, double value, bool paper_scale) {
  const MetricInfo& info = metric_info(metric_id);
  if (paper_scale && info.percentage) return fixed(value * 100.0, 2);
  return fixed(value, paper_scale ? 2 : 4);
}

Leaderboard build_leaderboard(const std::map<std::string, SuiteResult>& suites, const std::vector<FinalScore>& final_scores,
                              bool paper_scale) {
  if (suites.empty()) throw Error("no suite results to rank");
  Leaderboard lb;
  lb.paper_scale = paper_scale;
  lb.has_final_scores = !final_scores.empty();

  if (lb.has_final_scores) {
    std::set<std::string> a, b;
    for (const auto& [id, s] : suites) a.insert(id);
    for (const auto& f : final_scores) b.insert(f.model_id);
    if (a != b) {
      std::string msg = "model sets differ between suite results and final scores:";
      for (const auto& m : a)
        if (!b.count(m)) msg += " '" + m + "' has no final score;";
      for (const auto& m : b)
        if (!a.count(m)) msg += " '" + m + "' has no suite result;";
      throw Error(msg);
    }
  }

  std::map<std::string, LeaderboardRow> rows;
  for (const auto& [id, s] : suites) rows[id].model_id = id;

  for (const auto& info : metric_catalog()) {
    std::vector<std::pair<std::string, double>> values;
    for (const auto& [id, s] : suites)
      if (const MetricResult* r = s.find(info.id)) values.emplace_back(id, r->aggregate);
    if (values.empty()) continue;
    const std::string mid(info.id);
    lb.metric_ids.push_back(mid);
    const auto ranks = rank_models(values, info.direction);
    for (const auto& [model, v] : values) {
      auto& row = rows[model];
      row.metrics[mid] = v;
      row.ranks[mid] = ranks.at(model);
      Mark m = Mark::none;
      if (info.direction != Direction::target_match) {
        if (ranks.at(model) == 1) m = Mark::best;
        else if (ranks.at(model) == 2) m = Mark::second;
      }
      row.marks[mid] = m;
    }
  }

  if (lb.has_final_scores) {
    for (const auto& f : final_scores) {
      auto& row = rows[f.model_id];
      row.aspects = f.aspects;
      row.subjective_likeness = f.subjective_likeness;
      row.comprehensive = f.comprehensive;
      row.complete = f.complete;
    }
    for (Aspect a : kFittedAspects) {
      std::vector<std::pair<std::string, double>> values;
      for (const auto& f : final_scores)
        if (auto it = f.aspects.find(a); it != f.aspects.end() && it->second) values.emplace_back(f.model_id, *it->second);
      for (const auto& [model, r] : rank_models(values, Direction::higher_better)) rows[model].aspect_ranks[a] = r;
    }
    std::vector<std::pair<std::string, double>> values;
    for (const auto& f : final_scores)
      if (f.comprehensive) values.emplace_back(f.model_id, *f.comprehensive);
    for (const auto& [model, r] : rank_models(values, Direction::higher_better)) rows[model].comprehensive_rank = r;
  }

  for (auto& [id, row] : rows) lb.rows.push_back(std::move(row));
  std::sort(lb.rows.begin(), lb.rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.comprehensive.has_value() != b.comprehensive.has_value()) return a.comprehensive.has_value();
    if (a.comprehensive && *a.comprehensive != *b.comprehensive) return *a.comprehensive > *b.comprehensive;
    return a.model_id < b.model_id;
  });
  return lb;
}

// ---- breakdown -------------------------------------------------------------

std::optional<GroupBy> parse_group_by(std::string_view s) {
  if (s == "none") return GroupBy::none;
  if (s == "meta" || s == "meta_class") return GroupBy::meta_class;
  if (s == "subtype" || s == "sub_type") return GroupBy::sub_type;
  return std::nullopt;
}

std::string_view to_string(GroupBy g) {
  switch (g) {
    case GroupBy::none: return "none";
    case GroupBy::meta_class: return "meta_class";
    case GroupBy::sub_type: return "sub_type";
  }
  return "none";
}

RadarData build_breakdown(const std::map<std::string, SuiteResult>& suites, const Benchmark& benchmark, GroupBy group_by) {
  if (suites.empty()) throw Error("no suite results to break down");
  RadarData out;
  out.group_by = group_by;
  out.normalization =
      "min-max across models per metric within each group; lower_better metrics inverted so the smallest raw value "
      "maps to 1; min = max maps to 1.0";

  auto group_of = [&](const std::string& prompt_id) -> std::optional<std::string> {
    if (group_by == GroupBy::none) return std::string("all");
    const PromptRecord* r = benchmark.find(prompt_id);
    if (!r) return std::nullopt;
    return std::string(group_by == GroupBy::meta_class ? to_string(r->meta_class) : to_string(r->sub_type));
  };
  if (group_by == GroupBy::none) {
    out.groups = {"all"};
  } else if (group_by == GroupBy::meta_class) {
    for (auto m : {MetaClass::human, MetaClass::animal, MetaClass::object, MetaClass::landscape})
      out.groups.emplace_back(to_string(m));
  } else {
    for (auto s : {SubType::general, SubType::style, SubType::camera_motion}) out.groups.emplace_back(to_string(s));
  }

  for (const auto& info : metric_catalog()) {
    const std::string mid(info.id);
    bool any = false;
    for (const auto& [model, suite] : suites) {
      const MetricResult* r = suite.find(mid);
      if (!r || r->per_video.empty()) continue;
      any = true;
      std::map<std::string, std::pair<double, std::size_t>> acc;
      for (const auto& [pid, v] : r->per_video) {
        auto g = group_of(pid);
        if (!g) continue;
        auto& [sum, n] = acc[*g];
        sum += v;
        ++n;
      }
      for (const auto& [g, sn] : acc) out.cells[g][model][mid] = {sn.first / static_cast<double>(sn.second), 0.0, sn.second};
    }
    if (!any) continue;
    out.metric_ids.push_back(mid);
    if (info.direction == Direction::lower_better) out.inverted.push_back(mid);

    for (auto& [g, models] : out.cells) {
      double lo = INFINITY, hi = -INFINITY;
      for (auto& [model, metrics] : models)
        if (auto it = metrics.find(mid); it != metrics.end()) {
          lo = std::min(lo, it->second.raw);
          hi = std::max(hi, it->second.raw);
        }
      for (auto& [model, metrics] : models) {
        auto it = metrics.find(mid);
        if (it == metrics.end()) continue;
        auto& c = it->second;
        if (hi == lo) c.normalized = 1.0;
        else if (info.direction == Direction::lower_better) c.normalized = (hi - c.raw) / (hi - lo);
        else c.normalized = (c.raw - lo) / (hi - lo);
      }
    }
  }
  return out;
}

// ---- export ----------------------------------------------------------------

ExportFormat parse_export_format(std::string_view s) {
  if (s == "md" || s == "markdown") return ExportFormat::md;
  if (s == "csv") return ExportFormat::csv;
  if (s == "json") return ExportFormat::json;
  throw ConfigError("unknown export format '" + std::string(s) + "' (expected md, csv or json)");
}

json to_json(const Leaderboard& lb) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json rows = json::array();
  for (const auto& r : lb.rows) {
    json marks = json::object();
    for (const auto& [m, k] : r.marks) marks[m] = to_string(k);
    json aspects = json::object();
    for (const auto& [a, v] : r.aspects) aspects[std::string(to_string(a))] = opt(v);
    json aspect_ranks = json::object();
    for (const auto& [a, v] : r.aspect_ranks) aspect_ranks[std::string(to_string(a))] = v;
    rows.push_back({{"model_id", r.model_id},
                    {"metrics", r.metrics},
                    {"ranks", r.ranks},
                    {"marks", marks},
                    {"aspects", aspects},
                    {"aspect_ranks", aspect_ranks},
                    {"subjective_likeness", opt(r.subjective_likeness)},
                    {"comprehensive", opt(r.comprehensive)},
                    {"comprehensive_rank", r.comprehensive_rank ? json(*r.comprehensive_rank) : json(nullptr)},
                    {"complete", r.complete}});
  }
  json directions = json::object();
  for (const auto& m : lb.metric_ids) directions[m] = to_string(metric_info(m).direction);
  return {{"format", "t2veval.leaderboard"},
          {"schema", "1"},
          {"metric_ids", lb.metric_ids},
          {"directions", directions},
          {"has_final_scores", lb.has_final_scores},
          {"paper_scale", lb.paper_scale},
          {"rows", rows}};
}

Leaderboard leaderboard_from_json(const json& j) {
  auto opt = [](const json& v) -> std::optional<double> {
    if (v.is_null()) return std::nullopt;
    return v.get<double>();
  };
  try {
    if (j.at("format") != "t2veval.leaderboard") throw Error("not a leaderboard document");
    Leaderboard lb;
    lb.metric_ids = j.at("metric_ids").get<std::vector<std::string>>();
    lb.has_final_scores = j.at("has_final_scores").get<bool>();
    lb.paper_scale = j.at("paper_scale").get<bool>();
    for (const auto& r : j.at("rows")) {
      LeaderboardRow row;
      row.model_id = r.at("model_id").get<std::string>();
      row.metrics = r.at("metrics").get<std::map<std::string, double>>();
      row.ranks = r.at("ranks").get<std::map<std::string, int>>();
      for (const auto& [m, k] : r.at("marks").items()) row.marks[m] = parse_mark(k.get<std::string>());
      for (const auto& [a, v] : r.at("aspects").items()) {
        auto asp = parse_aspect(a);
        if (!asp) throw Error("unknown aspect '" + a + "'");
        row.aspects[*asp] = opt(v);
      }
      for (const auto& [a, v] : r.at("aspect_ranks").items()) {
        auto asp = parse_aspect(a);
        if (!asp) throw Error("unknown aspect '" + a + "'");
        row.aspect_ranks[*asp] = v.get<int>();
      }
      row.subjective_likeness = opt(r.at("subjective_likeness"));
      row.comprehensive = opt(r.at("comprehensive"));
      if (!r.at("comprehensive_rank").is_null()) row.comprehensive_rank = r.at("comprehensive_rank").get<int>();
      row.complete = r.at("complete").get<bool>();
      lb.rows.push_back(std::move(row));
    }
    return lb;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed leaderboard: ") + e.what());
  }
}

json to_json(const RadarData& r) {
  json cells = json::object();
  for (const auto& [g, models] : r.cells)
    for (const auto& [m, metrics] : models)
      for (const auto& [id, c] : metrics)
        cells[g][m][id] = {{"raw", c.raw}, {"normalized", c.normalized}, {"count", c.count}};
  return {{"format", "t2veval.radar"},
          {"schema", "1"},
          {"group_by", to_string(r.group_by)},
          {"groups", r.groups},
          {"metric_ids", r.metric_ids},
          {"inverted", r.inverted},
          {"normalization", r.normalization},
          {"cells", cells}};
}

RadarData radar_from_json(const json& j) {
  try {
    if (j.at("format") != "t2veval.radar") throw Error("not a radar document");
    RadarData r;
    auto g = parse_group_by(j.at("group_by").get<std::string>());
    if (!g) throw Error("unknown group_by");
    r.group_by = *g;
    r.groups = j.at("groups").get<std::vector<std::string>>();
    r.metric_ids = j.at("metric_ids").get<std::vector<std::string>>();
    r.inverted = j.at("inverted").get<std::vector<std::string>>();
    r.normalization = j.at("normalization").get<std::string>();
    for (const auto& [grp, models] : j.at("cells").items())
      for (const auto& [m, metrics] : models.items())
        for (const auto& [id, c] : metrics.items())
          r.cells[grp][m][id] = {c.at("raw").get<double>(), c.at("normalized").get<double>(), c.at("count").get<std::size_t>()};
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed radar data: ") + e.what());
  }
}

namespace {

std::string leaderboard_md(const Leaderboard& lb) {
  std::ostringstream out;
  out << "| Model |";
  for (const auto& m : lb.metric_ids) {
    const MetricInfo& info = metric_info(m);
    out << ' ' << info.display_name << ' ' << arrow(info.direction) << " |";
  }
  out << " Comprehensive |\n|---|";
  for (std::size_t i = 0; i < lb.metric_ids.size(); ++i) out << "---|";
  out << "---|\n";
  for (const auto& r : lb.rows) {
    out << "| " << r.model_id << " |";
    for (const auto& m : lb.metric_ids) {
      auto it = r.metrics.find(m);
      if (it == r.metrics.end()) {
        out << " n/a |";
        continue;
      }
      std::string cell = format_metric(m, it->second, lb.paper_scale);
      const Mark mark = r.marks.at(m);
      if (mark == Mark::best) cell = "**" + cell + "**";
      else if (mark == Mark::second) cell = "_" + cell + "_";
      out << ' ' << cell << " |";
    }
    if (r.comprehensive)
      out << ' ' << scaled(*r.comprehensive, lb.paper_scale) << " (" << *r.comprehensive_rank << ")"
          << (r.complete ? "" : " *") << " |\n";
    else
      out << " n/a |\n";
  }

  if (lb.has_final_scores) {
    out << "\n| Model |";
    for (Aspect a : kFittedAspects) out << ' ' << aspect_title(a) << " |";
    out << " Subjective Likeness | Comprehensive |\n|---|---|---|---|---|---|---|\n";
    for (const auto& r : lb.rows) {
      out << "| " << r.model_id << " |";
      for (Aspect a : kFittedAspects) {
        auto it = r.aspects.find(a);
        if (it == r.aspects.end() || !it->second) {
          out << " n/a |";
          continue;
        }
        std::string cell = scaled(*it->second, lb.paper_scale) + " (" + std::to_string(r.aspect_ranks.at(a)) + ")";
        if (r.aspect_ranks.at(a) == 1) cell = "**" + cell + "**";
        out << ' ' << cell << " |";
      }
      out << ' ' << (r.subjective_likeness ? scaled(*r.subjective_likeness, lb.paper_scale) : "n/a") << " |";
      out << ' ' << (r.comprehensive ? scaled(*r.comprehensive, lb.paper_scale) : "n/a") << " |\n";
    }
  }

  out << "\nBold marks the best value per metric and underscores the second best, following each metric's "
         "direction. Target-match (→) metrics are ranked by value and left unmarked.\n";
  if (std::find(lb.metric_ids.begin(), lb.metric_ids.end(), "celebrity_id_score") != lb.metric_ids.end())
    out << "Celebrity ID Score is a raw face distance, so lower is better here; published tables that mark it as "
           "higher-better rank it the other way.\n";
  if (std::find(lb.metric_ids.begin(), lb.metric_ids.end(), "warping_error") != lb.metric_ids.end())
    out << "Warping Error is a mean squared difference on the 0-255 pixel scale.\n";
  if (std::any_of(lb.rows.begin(), lb.rows.end(), [](const LeaderboardRow& r) { return r.comprehensive && !r.complete; }))
    out << "* comprehensive score averages fewer than four aspects.\n";
  return out.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string leaderboard_csv(const Leaderboard& lb) {
  std::ostringstream out;
  out << "model_id";
  for (const auto& m : lb.metric_ids) out << ',' << m << ',' << m << "_rank";
  for (Aspect a : kFittedAspects) out << ',' << to_string(a) << ',' << to_string(a) << "_rank";
  out << ",subjective_likeness,comprehensive,comprehensive_rank,complete\n";
  for (const auto& r : lb.rows) {
    out << csv_escape(r.model_id);
    for (const auto& m : lb.metric_ids) {
      auto it = r.metrics.find(m);
      if (it == r.metrics.end()) out << ",,";
      else out << ',' << exact(it->second) << ',' << r.ranks.at(m);
    }
    for (Aspect a : kFittedAspects) {
      auto it = r.aspects.find(a);
      if (it == r.aspects.end() || !it->second) out << ",,";
      else out << ',' << exact(*it->second) << ',' << r.aspect_ranks.at(a);
    }
    out << ',' << (r.subjective_likeness ? exact(*r.subjective_likeness) : "");
    out << ',' << (r.comprehensive ? exact(*r.comprehensive) : "");
    out << ',' << (r.comprehensive_rank ? std::to_string(*r.comprehensive_rank) : "");
    out << ',' << (r.complete ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string radar_md(const RadarData& r) {
  std::ostringstream out;
  out << "Grouping: " << to_string(r.group_by) << "\n\nNormalization: " << r.normalization << ".\n";
  if (!r.inverted.empty()) {
    out << "Inverted metrics:";
    for (const auto& m : r.inverted) out << ' ' << m;
    out << "\n";
  }
  for (const auto& g : r.groups) {
    auto git = r.cells.find(g);
    if (git == r.cells.end()) continue;
    out << "\n### " << g << "\n\n| Model |";
    for (const auto& m : r.metric_ids) out << ' ' << metric_info(m).display_name << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < r.metric_ids.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& [model, metrics] : git->second) {
      out << "| " << model << " |";
      for (const auto& m : r.metric_ids) {
        auto it = metrics.find(m);
        out << ' ' << (it == metrics.end() ? std::string("n/a") : fixed(it->second.normalized, 4)) << " |";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string radar_csv(const RadarData& r) {
  std::ostringstream out;
  out << "group,model_id,metric_id,raw,normalized,count,inverted\n";
  for (const auto& g : r.groups) {
    auto git = r.cells.find(g);
    if (git == r.cells.end()) continue;
    for (const auto& [model, metrics] : git->second)
      for (const auto& m : r.metric_ids) {
        auto it = metrics.find(m);
        if (it == metrics.end()) continue;
        const bool inv = std::find(r.inverted.begin(), r.inverted.end(), m) != r.inverted.end();
        out << g << ',' << csv_escape(model) << ',' << m << ',' << exact(it->second.raw) << ','
            << exact(it->second.normalized) << ',' << it->second.count << ',' << (inv ? "true" : "false") << '\n';
      }
  }
  return out.str();
}

}  // namespace

std::string export_leaderboard(const Leaderboard& lb, ExportFormat format) {
  switch (format) {
    case ExportFormat::md: return leaderboard_md(lb);
    case ExportFormat::csv: return leaderboard_csv(lb);
    case ExportFormat::json: return to_json(lb).dump(2) + "\n";
  }
  throw ConfigError("unknown export format");
}

std::string export_radar(const RadarData& radar, ExportFormat format) {
  switch (format) {
    case ExportFormat::md: return radar_md(radar);
    case ExportFormat::csv: return radar_csv(radar);
    case ExportFormat::json: return to_json(radar).dump(2) + "\n";
  }
  throw ConfigError("unknown export format");
}

}  // namespace t2veval
