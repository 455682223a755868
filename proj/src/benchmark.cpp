#include "t2veval/benchmark.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "t2veval/error.hpp"
#include "t2veval/vocabulary.hpp"

namespace t2veval {

using nlohmann::json;

std::string_view to_string(MetaClass v) {
  switch (v) {
    case MetaClass::human: return "human";
    case MetaClass::animal: return "animal";
    case MetaClass::object: return "object";
    case MetaClass::landscape: return "landscape";
  }
  return "?";
}

std::string_view to_string(SubType v) {
  switch (v) {
    case SubType::general: return "general";
    case SubType::style: return "style";
    case SubType::camera_motion: return "camera_motion";
  }
  return "?";
}

std::string_view to_string(Amplitude v) { return v == Amplitude::large ? "large" : "small"; }

std::optional<MetaClass> parse_meta_class(std::string_view s) {
  for (auto v : {MetaClass::human, MetaClass::animal, MetaClass::object, MetaClass::landscape})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<SubType> parse_sub_type(std::string_view s) {
  for (auto v : {SubType::general, SubType::style, SubType::camera_motion})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

std::optional<Amplitude> parse_amplitude(std::string_view s) {
  if (s == "large") return Amplitude::large;
  if (s == "small") return Amplitude::small;
  return std::nullopt;
}

bool AttributeSet::has_counts() const {
  return std::any_of(objects.begin(), objects.end(), [](const ObjectSpec& o) { return o.count.has_value(); });
}

bool AttributeSet::has_colors() const {
  return std::any_of(objects.begin(), objects.end(), [](const ObjectSpec& o) { return o.color.has_value(); });
}

const PromptRecord* Benchmark::find(std::string_view id) const {
  auto it = std::find_if(records.begin(), records.end(), [&](const PromptRecord& r) { return r.id == id; });
  return it == records.end() ? nullptr : &*it;
}

const Vocabulary& Vocabulary::standard() {
  static const Vocabulary vocab = [] {
    Vocabulary v;
    for (auto a : kinetics400_labels()) v.actions.emplace(a);
    for (auto c : basic_colors()) v.colors.emplace(c);
    return v;
  }();
  return vocab;
}

void validate_record(const PromptRecord& r, const Vocabulary& vocab) {
  const std::string id = r.id.empty() ? "<unnamed>" : r.id;
  if (r.id.empty()) throw ValidationError(id, "id", "must be non-empty");
  if (r.text.empty()) throw ValidationError(id, "text", "must be non-empty");
  if (r.sub_type == SubType::style && !r.style_tag)
    throw ValidationError(id, "style_tag", "required when sub_type is style");
  if (r.sub_type != SubType::style && r.style_tag)
    throw ValidationError(id, "style_tag", "only allowed when sub_type is style");
  if (r.sub_type == SubType::camera_motion && !r.camera_tag)
    throw ValidationError(id, "camera_tag", "required when sub_type is camera_motion");
  if (r.sub_type != SubType::camera_motion && r.camera_tag)
    throw ValidationError(id, "camera_tag", "only allowed when sub_type is camera_motion");
  if (r.style_tag && r.style_tag->empty()) throw ValidationError(id, "style_tag", "must be non-empty");
  if (r.camera_tag && r.camera_tag->empty()) throw ValidationError(id, "camera_tag", "must be non-empty");

  const auto& a = r.attributes;
  for (const auto& o : a.objects) {
    if (o.name.empty()) throw ValidationError(id, "attributes.objects.name", "must be non-empty");
    if (o.count && *o.count < 1)
      throw ValidationError(id, "attributes.objects.count", "must be >= 1, got " + std::to_string(*o.count));
    if (o.color && !vocab.colors.contains(*o.color))
      throw ValidationError(id, "attributes.objects.color", "'" + *o.color + "' is not in the color palette");
  }
  if (a.action_label && !vocab.actions.contains(*a.action_label))
    throw ValidationError(id, "attributes.action_label",
                          "'" + *a.action_label + "' is not in the action vocabulary");
  if (a.celebrity && a.celebrity->empty()) throw ValidationError(id, "attributes.celebrity", "must be non-empty");
  if (a.render_text && a.render_text->empty())
    throw ValidationError(id, "attributes.render_text", "must be non-empty");
}

namespace {

void put_optional(json& j, const char* key, const std::optional<std::string>& v) {
  if (v) j[key] = *v;
}

std::string field_id(const json& j) {
  if (j.is_object() && j.contains("id") && j["id"].is_string()) return j["id"].get<std::string>();
  return "<unnamed>";
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& id,
                const std::string& prefix) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ValidationError(id, prefix + key, "unknown field");
  }
}

std::optional<std::string> opt_string(const json& j, const char* key, const std::string& id,
                                      const std::string& prefix) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw ValidationError(id, prefix + key, "expected a string");
  return j[key].get<std::string>();
}

}  // namespace

json to_json(const PromptRecord& r) {
  json attrs = json::object();
  json objects = json::array();
  for (const auto& o : r.attributes.objects) {
    json jo = {{"name", o.name}};
    if (o.count) jo["count"] = *o.count;
    put_optional(jo, "color", o.color);
    objects.push_back(std::move(jo));
  }
  attrs["objects"] = std::move(objects);
  put_optional(attrs, "celebrity", r.attributes.celebrity);
  put_optional(attrs, "action_label", r.attributes.action_label);
  put_optional(attrs, "render_text", r.attributes.render_text);
  if (r.attributes.amplitude) attrs["amplitude"] = to_string(*r.attributes.amplitude);

  json j = {{"id", r.id},
            {"text", r.text},
            {"meta_class", to_string(r.meta_class)},
            {"sub_type", to_string(r.sub_type)},
            {"attributes", std::move(attrs)}};
  put_optional(j, "style_tag", r.style_tag);
  put_optional(j, "camera_tag", r.camera_tag);
  return j;
}

PromptRecord record_from_json(const json& j) {
  const std::string id = field_id(j);
  if (!j.is_object()) throw ValidationError(id, "<record>", "expected a JSON object");
  check_keys(j, {"id", "text", "meta_class", "sub_type", "attributes", "style_tag", "camera_tag"}, id, "");

  PromptRecord r;
  auto required_string = [&](const char* key) {
    if (!j.contains(key)) throw ValidationError(id, key, "missing");
    if (!j[key].is_string()) throw ValidationError(id, key, "expected a string");
    return j[key].get<std::string>();
  };
  r.id = required_string("id");
  r.text = required_string("text");
  const auto meta = required_string("meta_class");
  const auto sub = required_string("sub_type");
  auto mc = parse_meta_class(meta);
  if (!mc) throw ValidationError(id, "meta_class", "'" + meta + "' is not one of human|animal|object|landscape");
  auto st = parse_sub_type(sub);
  if (!st) throw ValidationError(id, "sub_type", "'" + sub + "' is not one of general|style|camera_motion");
  r.meta_class = *mc;
  r.sub_type = *st;
  r.style_tag = opt_string(j, "style_tag", id, "");
  r.camera_tag = opt_string(j, "camera_tag", id, "");

  if (j.contains("attributes") && !j["attributes"].is_null()) {
    const json& a = j["attributes"];
    if (!a.is_object()) throw ValidationError(id, "attributes", "expected an object");
    check_keys(a, {"objects", "celebrity", "action_label", "render_text", "amplitude"}, id, "attributes.");
    if (a.contains("objects") && !a["objects"].is_null()) {
      if (!a["objects"].is_array()) throw ValidationError(id, "attributes.objects", "expected an array");
      for (const json& o : a["objects"]) {
        if (!o.is_object()) throw ValidationError(id, "attributes.objects", "expected objects");
        check_keys(o, {"name", "count", "color"}, id, "attributes.objects.");
        ObjectSpec spec;
        if (!o.contains("name") || !o["name"].is_string())
          throw ValidationError(id, "attributes.objects.name", "missing or not a string");
        spec.name = o["name"].get<std::string>();
        if (o.contains("count") && !o["count"].is_null()) {
          if (!o["count"].is_number_integer())
            throw ValidationError(id, "attributes.objects.count", "expected an integer");
          spec.count = o["count"].get<int>();
        }
        spec.color = opt_string(o, "color", id, "attributes.objects.");
        r.attributes.objects.push_back(std::move(spec));
      }
    }
    r.attributes.celebrity = opt_string(a, "celebrity", id, "attributes.");
    r.attributes.action_label = opt_string(a, "action_label", id, "attributes.");
    r.attributes.render_text = opt_string(a, "render_text", id, "attributes.");
    if (auto amp = opt_string(a, "amplitude", id, "attributes.")) {
      auto parsed = parse_amplitude(*amp);
      if (!parsed) throw ValidationError(id, "attributes.amplitude", "'" + *amp + "' is not one of large|small");
      r.attributes.amplitude = *parsed;
    }
  }
  return r;
}

Benchmark parse_benchmark(std::istream& in, const std::string& source, const Vocabulary& vocab) {
  Benchmark b;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, e.what());
    }
    if (first && j.is_object() && j.contains("format")) {
      first = false;
      if (j.value("format", "") != "t2veval.benchmark")
        throw ParseError(source, line_no, "unexpected header format");
      b.version = j.value("version", b.version);
      continue;
    }
    first = false;
    PromptRecord r = record_from_json(j);
    validate_record(r, vocab);
    if (!seen.insert(r.id).second) throw ValidationError(r.id, "id", "duplicate id");
    b.records.push_back(std::move(r));
  }
  if (b.records.empty()) throw ParseError(source, line_no, "benchmark contains no records");
  return b;
}

Benchmark load_benchmark(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_benchmark(in, path.string(), vocab);
}

void write_benchmark(std::ostream& out, const Benchmark& b) {
  out << json{{"format", "t2veval.benchmark"}, {"schema", kBenchmarkSchemaVersion}, {"version", b.version}}.dump()
      << '\n';
  for (const auto& r : b.records) out << to_json(r).dump() << '\n';
}

void save_benchmark(const std::filesystem::path& path, const Benchmark& b) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_benchmark(out, b);
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

StatsReport benchmark_stats(const Benchmark& b) {
  StatsReport s;
  s.total = b.records.size();
  std::size_t words = 0;
  for (const auto& r : b.records) {
    const auto n = word_count(r.text);
    words += n;
    ++s.word_histogram[n];
    ++s.per_meta_class[r.meta_class];
    ++s.per_sub_type[r.sub_type];
    const auto& a = r.attributes;
    s.attributes.with_objects += !a.objects.empty();
    s.attributes.with_counts += a.has_counts();
    s.attributes.with_colors += a.has_colors();
    s.attributes.with_celebrity += a.celebrity.has_value();
    s.attributes.with_render_text += a.render_text.has_value();
    s.attributes.with_action += a.action_label.has_value();
    s.attributes.with_amplitude += a.amplitude.has_value();
  }
  s.mean_words = s.total ? static_cast<double>(words) / static_cast<double>(s.total) : 0.0;
  return s;
}

json to_json(const StatsReport& s) {
  json hist = json::object();
  for (auto [len, n] : s.word_histogram) hist[std::to_string(len)] = n;
  json meta = json::object();
  for (auto [k, n] : s.per_meta_class) meta[std::string(to_string(k))] = n;
  json sub = json::object();
  for (auto [k, n] : s.per_sub_type) sub[std::string(to_string(k))] = n;
  const auto& a = s.attributes;
  return {{"total", s.total},
          {"mean_words", s.mean_words},
          {"word_histogram", hist},
          {"per_meta_class", meta},
          {"per_sub_type", sub},
          {"attributes",
           {{"objects", a.with_objects},
            {"counts", a.with_counts},
            {"colors", a.with_colors},
            {"celebrity", a.with_celebrity},
            {"render_text", a.with_render_text},
            {"action", a.with_action},
            {"amplitude", a.with_amplitude}}}};
}

}  // namespace t2veval
