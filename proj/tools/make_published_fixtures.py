#!/usr/bin/env python3
"""Writes the published per-model results as stored result files.

data/published/results/<model>.jsonl   suite files holding the reported aggregates
data/published/final_scores.json      the reported human-aligned aspect scores

Percentage metrics are stored on the raw [0, 1] scale (reported value / 100); IS,
Flow-Score and Warping Error are stored as reported. CLIP-Score also gets per-video
values over the shipped benchmark, spread symmetrically around the reported mean.
"""

import argparse
import json
import os

MODELS = ["ModelScope-XL", "ZeroScope", "Floor33", "PikaLab", "Gen2"]

# metric id -> reported values in MODELS order
REPORTED = {
    "vqa_a": [97.72, 95.95, 98.11, 99.32, 99.04],
    "vqa_t": [6.09, 6.50, 7.60, 8.69, 10.13],
    "is": [15.99, 13.35, 15.10, 13.66, 12.57],
    "clip_score": [20.62, 20.20, 21.15, 20.72, 20.90],
    "blip_bleu": [22.42, 21.20, 23.67, 21.89, 22.33],
    "sd_score": [68.50, 67.79, 69.04, 69.14, 69.31],
    "detection_score": [49.59, 45.80, 55.00, 50.49, 52.44],
    "color_score": [40.10, 46.35, 35.07, 36.57, 32.29],
    "count_score": [47.67, 47.88, 57.63, 56.46, 57.19],
    "ocr_score": [83.74, 82.58, 81.09, 81.33, 92.94],
    "celebrity_id_score": [45.66, 45.96, 45.24, 43.43, 44.58],
    "action_score": [73.75, 71.74, 74.48, 69.84, 54.99],
    "motion_ac_score": [26.67, 53.33, 60.00, 40.00, 40.00],
    "flow_score": [2.28, 1.66, 2.23, 0.11, 0.18],
    "clip_temp": [99.72, 99.84, 99.58, 99.97, 99.92],
    "warping_error": [73.04, 80.32, 69.77, 66.88, 58.19],
    "face_consistency": [98.89, 99.33, 99.05, 99.64, 99.06],
}
UNSCALED = {"is", "flow_score", "warping_error"}
DIRECTION = {"ocr_score": "lower_better", "celebrity_id_score": "lower_better", "warping_error": "lower_better",
             "motion_ac_score": "target_match", "flow_score": "target_match"}

# Visual Quality, Text-Video Alignment, Motion Quality, Temporal Consistency
ASPECTS = ["visual_quality", "tv_alignment", "motion_quality", "temporal_consistency"]
FINAL = {
    "ModelScope-XL": [55.23, 47.22, 59.41, 59.31],
    "ZeroScope": [56.37, 46.18, 54.26, 61.19],
    "Floor33": [59.53, 51.29, 51.97, 56.36],
    "PikaLab": [63.52, 54.11, 57.74, 69.35],
    "Gen2": [67.35, 52.30, 62.53, 69.71],
}


def load_benchmark(path):
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            j = json.loads(line)
            if "format" not in j:
                records.append(j)
    return records


def applicable(metric, rec):
    a = rec.get("attributes", {})
    objs = a.get("objects", [])
    gates = {
        "detection_score": bool(objs),
        "count_score": any("count" in o for o in objs),
        "color_score": any("color" in o for o in objs),
        "ocr_score": "render_text" in a,
        "celebrity_id_score": "celebrity" in a,
        "action_score": "action_label" in a,
        "motion_ac_score": "amplitude" in a,
    }
    return gates.get(metric, True)


def stored(metric, value):
    return value if metric in UNSCALED else value / 100.0


def spread(mean, ids, step=0.004):
    """Per-video values whose mean is `mean`: paired +/- offsets, odd one out at the mean."""
    values = {}
    for k, pid in enumerate(ids):
        pair = k // 2 + 1
        offset = step * ((pair % 7) + 1)
        values[pid] = mean + offset if k % 2 == 0 else mean - offset
    if len(ids) % 2 == 1:
        values[ids[-1]] = mean
    return values


def write_suite(path, model, idx, records, version):
    lines = [{
        "kind": "meta", "format": "t2veval.suite", "schema": "1", "harness_version": "1.0.0",
        "model_id": model, "benchmark_version": version, "sampling": "all", "seed": 0,
        "config": {"caption_count": 5, "flow_threshold": 2.0, "is_splits": 1, "paper_scale": False},
        "backends": {}, "videos": {},
    }]
    for metric, values in REPORTED.items():
        agg = stored(metric, values[idx])
        ids = sorted(r["id"] for r in records if applicable(metric, r))
        if metric == "clip_score":
            per_video = spread(agg, ids)
            for pid in ids:
                lines.append({"kind": "value", "metric_id": metric, "prompt_id": pid, "value": per_video[pid]})
            agg = sum(per_video[p] for p in ids) / len(ids)
        lines.append({"kind": "aggregate", "metric_id": metric, "value": agg,
                      "direction": DIRECTION.get(metric, "higher_better"), "applicable_count": len(ids)})
    with open(path, "w", encoding="utf-8") as f:
        for line in lines:
            f.write(json.dumps(line, sort_keys=True, separators=(",", ":")) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--benchmark", default="data/benchmark.jsonl")
    ap.add_argument("--out", default="data/published")
    args = ap.parse_args()
    records = load_benchmark(args.benchmark)
    results = os.path.join(args.out, "results")
    os.makedirs(results, exist_ok=True)
    for i, model in enumerate(MODELS):
        write_suite(os.path.join(results, model + ".jsonl"), model, i, records, "1.0")
    models = []
    for model in MODELS:
        scores = [v / 100.0 for v in FINAL[model]]
        models.append({"model_id": model, "aspects": dict(zip(ASPECTS, scores)), "subjective_likeness": None,
                       "comprehensive": sum(scores) / len(scores), "complete": True})
    with open(os.path.join(args.out, "final_scores.json"), "w", encoding="utf-8") as f:
        json.dump({"format": "t2veval.final_scores", "schema": "1", "models": models}, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"wrote {len(MODELS)} result files and final scores to {args.out}")


if __name__ == "__main__":
    main()
