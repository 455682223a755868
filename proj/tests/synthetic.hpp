#pragma once

// Synthetic labeled samples for alignment fitting: two metrics drawn uniformly per
// sample and a label that is a known linear blend of them plus Gaussian noise.

#include <map>
#include <string>
#include <vector>

#include "t2veval/alignment.hpp"
#include "t2veval/hash.hpp"
#include "t2veval/suite.hpp"

namespace synthetic {

using namespace t2veval;

struct Dataset {
  std::map<std::string, SuiteResult> suites;
  std::vector<AspectLabel> labels;
};

/// `models` x `prompts` samples; visual quality label = w1 * vqa_a + w2 * vqa_t + noise.
inline Dataset blend(std::uint64_t seed, double w1, double w2, double noise_sd, int models = 5, int prompts = 100) {
  SplitMix64 rng(seed);
  Dataset d;
  for (int m = 0; m < models; ++m) {
    const std::string model = "model" + std::to_string(m);
    std::map<std::string, double> a, t;
    for (int p = 0; p < prompts; ++p) {
      const std::string prompt = "p" + std::to_string(p);
      const double x1 = rng.uniform(), x2 = rng.uniform();
      a[prompt] = x1;
      t[prompt] = x2;
      d.labels.push_back({model, prompt, Aspect::visual_quality, w1 * x1 + w2 * x2 + noise_sd * rng.normal()});
    }
    SuiteResult s;
    s.meta.model_id = model;
    s.metrics["vqa_a"] = finish_metric("vqa_a", a);
    s.metrics["vqa_t"] = finish_metric("vqa_t", t);
    d.suites[model] = std::move(s);
  }
  return d;
}

inline FitOptions visual_only(std::uint64_t seed) {
  FitOptions o;
  o.seed = seed;
  o.aspect_metrics = {{Aspect::visual_quality, {"vqa_a", "vqa_t"}}};
  return o;
}

inline const CorrelationRow& row(const CorrelationReport& r, const std::string& method) {
  for (const auto& row : r.aspects.at(0).rows)
    if (row.method == method) return row;
  throw Error("no correlation row " + method);
}

}  // namespace synthetic
