#pragma once

#include <filesystem>
#include <functional>

#include "json.hpp"
#include "t2veval/backends.hpp"

namespace t2veval {

/// Builds a registry from a bindings object:
///
///   { "<slot>": { "impl": "<name>", "params": { ... } }, ... }
///
/// Implementations: "mock" for every slot; "constant" for vqa_scorer
/// (params aesthetic, technical); "uniform" for inception_classifier;
/// "opencv_farneback" for flow_estimator; "directory" for
/// reference_image_source (param root). A "scenes" param on mock bindings points
/// to a scene table. Relative paths resolve against `base_dir`.
/// Unknown slots or implementations are ConfigErrors.
BackendRegistry make_registry(const nlohmann::json& bindings, const std::filesystem::path& base_dir);

using RegistryFactory = std::function<BackendRegistry()>;

/// Dense Farneback optical flow from OpenCV.
class FarnebackFlow : public FlowEstimator {
 public:
  std::string name() const override { return "opencv_farneback"; }
  bool deterministic() const override { return true; }
  FlowField estimate_flow(const Image& from, const Image& to) override;
};

}  // namespace t2veval
