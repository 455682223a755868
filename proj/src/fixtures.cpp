#include "t2veval/fixtures.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <fstream>

#include "json.hpp"
#include "t2veval/alignment.hpp"
#include "t2veval/annotation.hpp"
#include "t2veval/error.hpp"
#include "t2veval/hash.hpp"
#include "t2veval/media.hpp"
#include "t2veval/vocabulary.hpp"

namespace t2veval {

using nlohmann::json;

namespace {

PromptRecord make(std::string id, std::string text, MetaClass mc, SubType st, AttributeSet attrs,
                  std::optional<std::string> style = std::nullopt, std::optional<std::string> camera = std::nullopt) {
  PromptRecord r;
  r.id = std::move(id);
  r.text = std::move(text);
  r.meta_class = mc;
  r.sub_type = st;
  r.attributes = std::move(attrs);
  r.style_tag = std::move(style);
  r.camera_tag = std::move(camera);
  return r;
}

Rgb palette_rgb(const std::string& name) {
  static const std::map<std::string, Rgb> colors = {
      {"black", {20, 20, 20}},     {"white", {235, 235, 235}}, {"red", {210, 40, 40}},    {"green", {40, 170, 60}},
      {"yellow", {230, 210, 40}},  {"blue", {40, 70, 200}},    {"brown", {120, 80, 40}},  {"orange", {240, 140, 30}},
      {"pink", {240, 150, 190}},   {"purple", {130, 50, 160}}, {"gray", {128, 128, 128}},
  };
  auto it = colors.find(name);
  return it == colors.end() ? Rgb{128, 128, 128} : it->second;
}

std::string other_color(const std::string& c) {
  const auto colors = basic_colors();
  for (std::size_t i = 0; i < colors.size(); ++i)
    if (colors[i] == c) return std::string(colors[(i + 3) % colors.size()]);
  return "gray";
}

Rgb meta_base(MetaClass m) {
  switch (m) {
    case MetaClass::human: return {180, 140, 120};
    case MetaClass::animal: return {90, 140, 80};
    case MetaClass::object: return {110, 110, 150};
    case MetaClass::landscape: return {70, 120, 170};
  }
  return {128, 128, 128};
}

std::uint8_t clamp8(int v) { return static_cast<std::uint8_t>(std::clamp(v, 0, 255)); }

/// Base color plus seeded noise, so every scene has trackable texture.
Image textured(int w, int h, Rgb base, std::uint64_t seed) {
  Image im(w, h);
  SplitMix64 rng(seed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int n = static_cast<int>(rng.below(81)) - 40;
      im.set(x, y, {clamp8(base.r + n), clamp8(base.g + n), clamp8(base.b + n)});
    }
  return im;
}

void draw_objects(Image& im, const AttributeSet& attrs) {
  int slot = 0;
  for (const auto& o : attrs.objects) {
    const Rgb c = o.color ? palette_rgb(*o.color) : Rgb{60, 60, 60};
    for (int k = 0; k < o.count.value_or(1); ++k, ++slot)
      im.fill_rect(4 + (slot % 6) * 10, 6 + (slot / 6) * 14, 7, 9, c);
  }
}

Image roll(const Image& src, int dx) {
  Image out(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      const int sx = ((x - dx) % src.width + src.width) % src.width;
      out.set(x, y, {src.at(sx, y, 0), src.at(sx, y, 1), src.at(sx, y, 2)});
    }
  return out;
}

int motion_speed(const PromptRecord& r, std::size_t quality) {
  const std::size_t q = std::min<std::size_t>(quality, 2);
  if (!r.attributes.amplitude) return static_cast<int>(q);
  if (*r.attributes.amplitude == Amplitude::large) return std::array<int, 3>{3, 1, 0}[q];
  return std::array<int, 3>{0, 1, 2}[q];
}

std::string first_words(const std::string& text, std::size_t n) {
  std::string out;
  std::size_t count = 0, i = 0;
  while (i < text.size() && count < n) {
    while (i < text.size() && text[i] == ' ') ++i;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    if (j > i) {
      if (!out.empty()) out += ' ';
      out += text.substr(i, j - i);
      ++count;
    }
    i = j;
  }
  return out;
}

std::string subject_clause(const std::string& text) {
  const auto comma = text.find(',');
  return comma == std::string::npos ? text : text.substr(0, comma);
}

SceneAnnotation annotate(const PromptRecord& r, std::size_t quality, int t) {
  SceneAnnotation a;
  const auto& at = r.attributes;
  const std::size_t q = std::min<std::size_t>(quality, 2);
  if (q == 0) {
    a.tag = r.text;
    a.caption = subject_clause(r.text);
  } else if (q == 1) {
    a.tag = first_words(r.text, 4);
    a.caption = first_words(r.text, 3);
  }
  for (const auto& o : at.objects) {
    SceneObject so{o.name, o.count.value_or(1), o.color};
    if (q == 1 && t % 2 == 1) so.count += 1;
    if (q == 2 && o.color) so.color = other_color(*o.color);
    if (q == 2 && t % 2 == 1) continue;
    a.objects.push_back(std::move(so));
  }
  if (at.render_text) {
    if (q == 0) {
      a.text = *at.render_text;
    } else if (q == 1) {
      std::string s = *at.render_text;
      std::replace(s.begin(), s.end(), 'O', '0');
      a.text = s;
    } else {
      a.text = "";
    }
  }
  if (at.action_label) a.action = q < 2 ? *at.action_label : std::string("playing drums");
  a.face = !(q == 2 && t % 2 == 0);
  return a;
}

std::uint64_t scene_seed(const std::string& a, const std::string& b) { return fnv1a(b, fnv1a(a + '\x1f')); }

}  // namespace

Benchmark fixture_benchmark() {
  using M = MetaClass;
  using S = SubType;
  Benchmark b;
  b.version = "fixture-1";
  AttributeSet a;

  a = {};
  a.action_label = "playing guitar";
  b.records.push_back(make("h1", "a man playing guitar on a small stage", M::human, S::general, a));
  a = {};
  a.celebrity = "Ada Lovelace";
  b.records.push_back(make("h2", "a portrait of Ada Lovelace smiling, in watercolor painting style", M::human, S::style,
                           a, "watercolor painting"));
  a = {};
  a.action_label = "dancing ballet";
  a.amplitude = Amplitude::large;
  b.records.push_back(make("h3", "a woman dancing ballet in a bright studio, camera zooms in", M::human,
                           S::camera_motion, a, std::nullopt, "zoom in"));

  a = {};
  a.objects = {{"dog", 2, std::nullopt}};
  a.amplitude = Amplitude::large;
  b.records.push_back(make("a1", "two dogs running fast along the beach", M::animal, S::general, a));
  a = {};
  a.objects = {{"bird", std::nullopt, "red"}};
  b.records.push_back(make("a2", "a red bird sitting on a branch, in pixel art style", M::animal, S::style, a,
                           "pixel art"));
  a = {};
  a.objects = {{"cat", std::nullopt, std::nullopt}};
  a.amplitude = Amplitude::small;
  b.records.push_back(make("a3", "a cat sleeping quietly on a sofa, camera pans left", M::animal, S::camera_motion, a,
                           std::nullopt, "pan left"));

  a = {};
  a.render_text = "OPEN";
  b.records.push_back(make("o1", "a wooden sign that says OPEN hanging on a door", M::object, S::general, a));
  a = {};
  a.objects = {{"cup", 3, "blue"}};
  b.records.push_back(make("o2", "three blue cups on a kitchen table, in oil painting style", M::object, S::style, a,
                           "oil painting"));
  a = {};
  a.objects = {{"car", std::nullopt, "green"}};
  a.amplitude = Amplitude::large;
  b.records.push_back(make("o3", "a green car driving down a country road, camera tilts up", M::object,
                           S::camera_motion, a, std::nullopt, "tilt up"));

  a = {};
  a.amplitude = Amplitude::small;
  b.records.push_back(make("l1", "a calm mountain lake at sunrise", M::landscape, S::general, a));
  a = {};
  a.render_text = "HOTEL";
  b.records.push_back(make("l2", "a city skyline at night with a neon HOTEL sign, in cyberpunk style", M::landscape,
                           S::style, a, "cyberpunk"));
  a = {};
  a.amplitude = Amplitude::large;
  b.records.push_back(make("l3", "ocean waves crashing on dark rocks, camera zooms out", M::landscape,
                           S::camera_motion, a, std::nullopt, "zoom out"));
  for (const auto& r : b.records) validate_record(r);
  return b;
}

std::vector<Image> fixture_gallery(const std::string& celebrity, const FixtureOptions& o) {
  std::vector<Image> out;
  for (int k = 0; k < 3; ++k) {
    Image im = textured(o.width, o.height, {200, 160, 140}, scene_seed("celeb", celebrity));
    im.fill_rect(o.width / 2 - 8 + 2 * k, o.height / 2 - 10, 16, 20, {clamp8(230 - 10 * k), 190, 160});
    out.push_back(std::move(im));
  }
  return out;
}

std::vector<Image> fixture_references(const PromptRecord& r, const FixtureOptions& o) {
  std::vector<Image> out;
  for (int k = 0; k < 5; ++k) {
    const Rgb base = meta_base(r.meta_class);
    Image im = textured(o.width, o.height, {clamp8(base.r + 6 * k), base.g, base.b}, scene_seed("ref", r.id));
    draw_objects(im, r.attributes);
    out.push_back(std::move(im));
  }
  return out;
}

RenderedVideo render_fixture_video(const PromptRecord& r, std::size_t quality, const std::string& model_id,
                                   const FixtureOptions& o) {
  Image base;
  if (r.attributes.celebrity && quality == 0) {
    base = fixture_gallery(*r.attributes.celebrity, o).front();
  } else {
    base = textured(o.width, o.height, meta_base(r.meta_class), scene_seed(model_id, r.id));
    draw_objects(base, r.attributes);
  }
  const int speed = motion_speed(r, quality);
  RenderedVideo v;
  for (int t = 0; t < o.frames; ++t) {
    v.frames.push_back(roll(base, speed * t));
    v.annotations.push_back(annotate(r, quality, speed == 0 ? 0 : t));
  }
  return v;
}

void write_fixture(const std::filesystem::path& root, const FixtureOptions& o) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  const Benchmark b = fixture_benchmark();
  save_benchmark(root / "benchmark.jsonl", b);

  SceneTable scenes;
  for (const auto& r : b.records) {
    const auto refs = fixture_references(r, o);
    const fs::path dir = root / "refs" / r.id;
    fs::create_directories(dir);
    for (std::size_t k = 0; k < refs.size(); ++k) {
      write_image(dir / (std::to_string(k + 1) + ".png"), refs[k]);
      SceneAnnotation a;
      a.tag = k == 0 ? r.text : first_words(r.text, 2 + k);
      scenes.add(refs[k], a);
    }
    if (r.attributes.celebrity) {
      const auto gallery = fixture_gallery(*r.attributes.celebrity, o);
      const fs::path gdir = root / "refs" / "celebs" / *r.attributes.celebrity;
      fs::create_directories(gdir);
      for (std::size_t k = 0; k < gallery.size(); ++k) write_image(gdir / (std::to_string(k + 1) + ".png"), gallery[k]);
    }
  }

  for (std::size_t q = 0; q < o.models.size(); ++q) {
    const fs::path dir = root / "videos" / o.models[q];
    fs::create_directories(dir);
    for (const auto& r : b.records) {
      const RenderedVideo v = render_fixture_video(r, q, o.models[q], o);
      write_video(dir / (r.id + ".avi"), v.frames, o.fps);
      for (std::size_t t = 0; t < v.frames.size(); ++t) scenes.add(v.frames[t], v.annotations[t]);
    }
  }
  scenes.save(root / "scenes.json");

  json mock = {{"impl", "mock"}, {"params", {{"scenes", "scenes.json"}}}};
  json config = {
      {"backends",
       {{"text_image_embedder", mock},
        {"captioner", mock},
        {"detector_tracker", mock},
        {"face_analyzer", mock},
        {"ocr_engine", mock},
        {"action_classifier", mock},
        {"flow_estimator", {{"impl", "mock"}}},
        {"vqa_scorer", {{"impl", "mock"}}},
        {"inception_classifier", {{"impl", "mock"}}},
        {"reference_image_source", {{"impl", "directory"}, {"params", {{"root", "refs"}}}}}}},
      {"metrics", {{"flow_threshold", 2.0}, {"paper_scale", false}, {"is_splits", 1}, {"caption_count", 5}}},
      {"sampling", "all"},
      {"seed", 7},
      {"workers", 1}};
  std::ofstream(root / "config.json") << config.dump(2) << '\n';

  std::vector<HumanRating> ratings;
  for (std::size_t q = 0; q < o.models.size(); ++q)
    for (const auto& r : b.records)
      for (const std::string rater : {"r1", "r2", "r3"}) {
        HumanRating h{rater, o.models[q], r.id, {}};
        for (Aspect a : kAllAspects) {
          const auto noise = fnv1a(std::string(to_string(a)), scene_seed(rater, o.models[q] + "/" + r.id)) % 3;
          h.scores[a] = std::clamp(5 - static_cast<int>(q) - (noise == 0 ? 1 : 0), 1, 5);
        }
        ratings.push_back(std::move(h));
      }
  std::ofstream ratings_out(root / "ratings.jsonl", std::ios::binary);
  write_ratings(ratings_out, ratings, "fixture");

  std::vector<fs::path> model_dirs;
  for (const auto& m : o.models) model_dirs.push_back(root / "videos" / m);
  Study study = build_study("fixture", "fixture-salt", b, model_dirs, root / "refs");
  for (auto& it : study.items) {
    it.video = fs::relative(it.video, root);
    for (auto& ref : it.references) ref = fs::relative(ref, root);
  }
  std::ofstream(root / "study.json") << study.to_json().dump(2) << '\n';
}

}  // namespace t2veval
