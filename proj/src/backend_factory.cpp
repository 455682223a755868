#include "t2veval/backend_factory.hpp"

#include <map>
#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/video/tracking.hpp>

#include "t2veval/error.hpp"
#include "t2veval/mock_backends.hpp"

namespace t2veval {

using nlohmann::json;

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

cv::Mat to_gray(const Image& im) {
  cv::Mat rgb(im.height, im.width, CV_8UC3, const_cast<std::uint8_t*>(im.rgb.data()));
  cv::Mat gray;
  cv::cvtColor(rgb, gray, cv::COLOR_RGB2GRAY);
  return gray;
}

}  // namespace

FlowField FarnebackFlow::estimate_flow(const Image& from, const Image& to) {
  if (from.width != to.width || from.height != to.height) throw BackendError("flow frames differ in size");
  cv::Mat flow;
  cv::calcOpticalFlowFarneback(to_gray(from), to_gray(to), flow, 0.5, 3, 15, 3, 5, 1.2, 0);
  FlowField out(from.width, from.height);
  for (int y = 0; y < flow.rows; ++y)
    for (int x = 0; x < flow.cols; ++x) {
      const auto v = flow.at<cv::Vec2f>(y, x);
      out.set(x, y, v[0], v[1]);
    }
  return out;
}

BackendRegistry make_registry(const json& bindings, const std::filesystem::path& base_dir) {
  if (!bindings.is_object()) throw ConfigError("backend bindings must be a JSON object");
  std::map<std::string, std::shared_ptr<const SceneTable>> scene_cache;
  auto scenes_for = [&](const json& params) -> SceneTablePtr {
    if (!params.contains("scenes")) return nullptr;
    const auto path = resolve(base_dir, params["scenes"].get<std::string>()).string();
    auto& slot = scene_cache[path];
    if (!slot) slot = std::make_shared<const SceneTable>(SceneTable::load(path));
    return slot;
  };

  BackendRegistry r;
  for (const auto& [key, binding] : bindings.items()) {
    const auto slot = parse_slot(key);
    if (!slot) throw ConfigError("unknown backend slot '" + key + "'");
    if (!binding.is_object() || !binding.contains("impl"))
      throw ConfigError("binding for '" + key + "' needs an \"impl\" field");
    const std::string impl = binding["impl"].get<std::string>();
    const json params = binding.value("params", json::object());
    auto unknown = [&] { return ConfigError("no implementation '" + impl + "' for slot '" + key + "'"); };

    switch (*slot) {
      case Slot::text_image_embedder:
        if (impl != "mock") throw unknown();
        r.text_image_embedder = std::make_shared<MockEmbedder>(scenes_for(params), params.value("dim", 64));
        break;
      case Slot::captioner:
        if (impl != "mock") throw unknown();
        r.captioner = std::make_shared<MockCaptioner>(scenes_for(params));
        break;
      case Slot::detector_tracker:
        if (impl != "mock") throw unknown();
        r.detector_tracker = std::make_shared<MockDetector>(scenes_for(params));
        break;
      case Slot::face_analyzer:
        if (impl != "mock") throw unknown();
        r.face_analyzer = std::make_shared<MockFaceAnalyzer>(scenes_for(params));
        break;
      case Slot::ocr_engine:
        if (impl != "mock") throw unknown();
        r.ocr_engine = std::make_shared<MockOcr>(scenes_for(params));
        break;
      case Slot::action_classifier:
        if (impl != "mock") throw unknown();
        r.action_classifier = std::make_shared<MockActionClassifier>(scenes_for(params));
        break;
      case Slot::flow_estimator:
        if (impl == "mock")
          r.flow_estimator = std::make_shared<GlobalShiftFlow>(params.value("max_shift", 3));
        else if (impl == "opencv_farneback")
          r.flow_estimator = std::make_shared<FarnebackFlow>();
        else
          throw unknown();
        break;
      case Slot::vqa_scorer:
        if (impl == "mock")
          r.vqa_scorer = std::make_shared<MockVqa>();
        else if (impl == "constant")
          r.vqa_scorer = std::make_shared<MockVqa>(params.at("aesthetic").get<double>(),
                                                   params.at("technical").get<double>());
        else
          throw unknown();
        break;
      case Slot::inception_classifier:
        if (impl == "mock" || impl == "uniform")
          r.inception_classifier = std::make_shared<MockInception>(params.value("classes", 10), impl == "uniform");
        else
          throw unknown();
        break;
      case Slot::reference_image_source:
        if (impl != "directory") throw unknown();
        if (!params.contains("root")) throw ConfigError("reference_image_source needs params.root");
        {
          const auto root = resolve(base_dir, params["root"].get<std::string>());
          if (!std::filesystem::is_directory(root)) throw ConfigError("reference root not found: " + root.string());
          r.reference_image_source = std::make_shared<DirectoryReferenceSource>(root);
        }
        break;
    }
  }
  return r;
}

}  // namespace t2veval
