#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace t2veval {

inline constexpr std::string_view kBenchmarkSchemaVersion = "1";

enum class MetaClass { human, animal, object, landscape };
enum class SubType { general, style, camera_motion };
enum class Amplitude { large, small };

std::string_view to_string(MetaClass v);
std::string_view to_string(SubType v);
std::string_view to_string(Amplitude v);
std::optional<MetaClass> parse_meta_class(std::string_view s);
std::optional<SubType> parse_sub_type(std::string_view s);
std::optional<Amplitude> parse_amplitude(std::string_view s);

struct ObjectSpec {
  std::string name;
  std::optional<int> count;
  std::optional<std::string> color;
  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

/// Ground-truth metadata attached to one prompt.
struct AttributeSet {
  std::vector<ObjectSpec> objects;
  std::optional<std::string> celebrity;
  std::optional<std::string> action_label;
  std::optional<std::string> render_text;
  std::optional<Amplitude> amplitude;

  bool has_counts() const;
  bool has_colors() const;
  friend bool operator==(const AttributeSet&, const AttributeSet&) = default;
};

struct PromptRecord {
  std::string id;
  std::string text;
  MetaClass meta_class = MetaClass::object;
  SubType sub_type = SubType::general;
  AttributeSet attributes;
  std::optional<std::string> style_tag;
  std::optional<std::string> camera_tag;
  friend bool operator==(const PromptRecord&, const PromptRecord&) = default;
};

struct Benchmark {
  std::string version = "1.0";
  std::vector<PromptRecord> records;

  const PromptRecord* find(std::string_view id) const;
  friend bool operator==(const Benchmark&, const Benchmark&) = default;
};

/// Closed vocabularies records are validated against.
struct Vocabulary {
  std::set<std::string, std::less<>> actions;
  std::set<std::string, std::less<>> colors;

  /// Kinetics-400 actions and the 11 basic colors.
  static const Vocabulary& standard();
};

/// Throws ValidationError naming the record id and the offending field.
void validate_record(const PromptRecord& record, const Vocabulary& vocab = Vocabulary::standard());

nlohmann::json to_json(const PromptRecord& record);
/// Strict decode: unknown keys and type mismatches are ValidationErrors.
PromptRecord record_from_json(const nlohmann::json& j);

/// Reads line-delimited records. An optional first line carrying a "format" key is
/// the file header and holds the benchmark version.
Benchmark parse_benchmark(std::istream& in, const std::string& source,
                          const Vocabulary& vocab = Vocabulary::standard());
Benchmark load_benchmark(const std::filesystem::path& path, const Vocabulary& vocab = Vocabulary::standard());
void write_benchmark(std::ostream& out, const Benchmark& b);
void save_benchmark(const std::filesystem::path& path, const Benchmark& b);

/// Whitespace-delimited token count.
std::size_t word_count(std::string_view text);

struct AttributeCounts {
  std::size_t with_objects = 0;
  std::size_t with_counts = 0;
  std::size_t with_colors = 0;
  std::size_t with_celebrity = 0;
  std::size_t with_render_text = 0;
  std::size_t with_action = 0;
  std::size_t with_amplitude = 0;
};

struct StatsReport {
  std::size_t total = 0;
  double mean_words = 0.0;
  std::map<std::size_t, std::size_t> word_histogram;
  std::map<MetaClass, std::size_t> per_meta_class;
  std::map<SubType, std::size_t> per_sub_type;
  AttributeCounts attributes;
};

StatsReport benchmark_stats(const Benchmark& b);
nlohmann::json to_json(const StatsReport& s);

}  // namespace t2veval
