#include "t2veval/media.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <map>
#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>
#include <set>

#include "t2veval/error.hpp"

namespace t2veval {

void FrameSequence::validate() const {
  if (frames.empty()) throw MediaError("video " + source_path.string() + " has no frames");
  if (!(fps > 0.0)) throw MediaError("video " + source_path.string() + " has non-positive fps");
  for (const auto& f : frames)
    if (f.width != frames.front().width || f.height != frames.front().height)
      throw MediaError("video " + source_path.string() + " has frames of differing size");
}

void EvaluationSet::validate() const {
  std::set<std::string> seen;
  for (const auto& item : items) {
    if (!seen.insert(item.record.id).second) throw Error("duplicate prompt id in evaluation set: " + item.record.id);
    if (item.video.prompt_id != item.record.id)
      throw Error("frame sequence for '" + item.video.prompt_id + "' paired with record '" + item.record.id + "'");
  }
}

FrameSamplingPolicy FrameSamplingPolicy::uniform(int k) {
  if (k < 1) throw ConfigError("uniform sampling needs K >= 1");
  return FrameSamplingPolicy(k);
}

FrameSamplingPolicy FrameSamplingPolicy::parse(std::string_view text) {
  if (text == "all") return all();
  constexpr std::string_view prefix = "uniform:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto digits = text.substr(prefix.size());
    int k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return uniform(k);
  }
  throw ConfigError("invalid sampling policy '" + std::string(text) + "' (expected all|uniform:K)");
}

std::string FrameSamplingPolicy::to_string() const { return k_ == 0 ? "all" : "uniform:" + std::to_string(k_); }

std::vector<std::size_t> FrameSamplingPolicy::select(std::size_t n) const {
  std::vector<std::size_t> idx;
  if (n == 0) return idx;
  if (k_ == 0 || static_cast<std::size_t>(k_) >= n) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    return idx;
  }
  if (k_ == 1) return {0};
  for (int i = 0; i < k_; ++i)
    idx.push_back((static_cast<std::size_t>(i) * (n - 1) + static_cast<std::size_t>(k_ - 1) / 2) /
                  static_cast<std::size_t>(k_ - 1));
  return idx;
}

namespace {

Image from_bgr(const cv::Mat& bgr) {
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  Image img(rgb.cols, rgb.rows);
  for (int y = 0; y < rgb.rows; ++y)
    std::copy_n(rgb.ptr<std::uint8_t>(y), static_cast<std::size_t>(rgb.cols) * 3,
                img.rgb.begin() + static_cast<std::ptrdiff_t>(y) * rgb.cols * 3);
  return img;
}

}  // namespace

FrameSequence decode_video(const std::filesystem::path& path, const FrameSamplingPolicy& policy) {
  cv::VideoCapture cap(path.string(), cv::CAP_FFMPEG);
  if (!cap.isOpened()) throw MediaError("cannot open video " + path.string());
  std::vector<Image> decoded;
  cv::Mat frame;
  while (cap.read(frame)) {
    if (frame.empty()) break;
    if (frame.type() != CV_8UC3) throw MediaError("unsupported pixel format in " + path.string());
    decoded.push_back(from_bgr(frame));
  }
  FrameSequence seq;
  seq.fps = cap.get(cv::CAP_PROP_FPS);
  seq.source_path = path;
  for (std::size_t i : policy.select(decoded.size())) seq.frames.push_back(decoded[i]);
  seq.validate();
  return seq;
}

void write_video(const std::filesystem::path& path, const std::vector<Image>& frames, double fps) {
  if (frames.empty()) throw MediaError("refusing to write an empty video");
  cv::VideoWriter w(path.string(), cv::CAP_FFMPEG, cv::VideoWriter::fourcc('F', 'F', 'V', '1'), fps,
                    cv::Size(frames.front().width, frames.front().height));
  if (!w.isOpened()) throw MediaError("cannot open video writer for " + path.string());
  for (const auto& f : frames) {
    cv::Mat rgb(f.height, f.width, CV_8UC3, const_cast<std::uint8_t*>(f.rgb.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    w << bgr;
  }
}

bool is_video_file(const std::filesystem::path& path) {
  static const std::set<std::string> exts = {".avi", ".mp4", ".mkv", ".mov", ".webm", ".gif", ".m4v", ".mpg", ".mpeg"};
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return exts.contains(ext);
}

IngestResult ingest(const std::filesystem::path& model_dir, const Benchmark& benchmark,
                    const FrameSamplingPolicy& sampling, int workers) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(model_dir)) throw MediaError("model directory not found: " + model_dir.string());

  std::map<std::string, fs::path> by_stem;
  IngestResult result;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(model_dir))
    if (entry.is_regular_file() && is_video_file(entry.path())) files.push_back(entry.path());
  if (files.empty()) throw MediaError("model directory contains no video files: " + model_dir.string());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const std::string stem = f.stem().string();
    if (!benchmark.find(stem) || by_stem.contains(stem))
      result.unmatched_files.push_back(f);
    else
      by_stem.emplace(stem, f);
  }

  result.set.model_id = fs::absolute(model_dir).lexically_normal().filename().string();
  if (result.set.model_id.empty()) result.set.model_id = fs::absolute(model_dir).parent_path().filename().string();

  struct Job {
    const PromptRecord* record;
    fs::path path;
  };
  std::vector<Job> jobs;
  for (const auto& r : benchmark.records) {
    auto it = by_stem.find(r.id);
    if (it == by_stem.end())
      result.missing.push_back(r.id);
    else
      jobs.push_back({&r, it->second});
  }

  std::vector<std::optional<FrameSequence>> decoded(jobs.size());
  std::vector<std::string> failures(jobs.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < jobs.size(); i += stride) {
      try {
        decoded[i] = decode_video(jobs[i].path, sampling);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  const std::size_t n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::future<void>> pending;
    for (std::size_t w = 0; w < n_workers; ++w) pending.push_back(std::async(std::launch::async, work, w, n_workers));
    for (auto& p : pending) p.get();
  }

  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!decoded[i]) {
      result.errors.push_back({jobs[i].record->id, jobs[i].path, failures[i]});
      continue;
    }
    FrameSequence seq = std::move(*decoded[i]);
    seq.prompt_id = jobs[i].record->id;
    seq.model_id = result.set.model_id;
    result.set.items.push_back({*jobs[i].record, std::move(seq)});
  }
  return result;
}

}  // namespace t2veval
