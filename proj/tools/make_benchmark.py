#!/usr/bin/env python3
"""Writes the shipped 500-prompt benchmark (data/benchmark.jsonl).

Prompts are template-built from fixed vocabularies with a fixed seed, so the file is
reproducible. Half the prompts are plain, a quarter carry a style suffix and a quarter a
camera-motion suffix, balanced across the four meta classes.
"""

import argparse
import json
import random

STYLES = [
    "watercolor painting", "oil painting", "pixel art", "cyberpunk", "anime", "pencil sketch",
    "claymation", "low poly", "studio ghibli", "van gogh", "ukiyo-e", "pop art", "film noir",
    "vaporwave", "steampunk", "origami", "stained glass", "comic book", "impressionist",
    "surrealist", "minimalist", "art deco", "gothic", "baroque", "cubist", "charcoal drawing",
    "pastel drawing", "3d render", "isometric", "chinese ink painting", "mosaic", "graffiti",
    "retro 80s", "vintage film", "black and white photo", "neon glow", "paper cutout",
    "felt puppet", "lego", "cinematic", "fantasy illustration", "children's book illustration",
    "low light photography", "tilt-shift", "polaroid", "sepia", "woodcut print", "embroidery",
    "glitch art", "cel shading",
]

CAMERAS = [
    "pan left", "pan right", "tilt up", "tilt down", "zoom in", "zoom out", "dolly in",
    "dolly out", "truck left", "truck right", "pedestal up", "pedestal down", "orbit left",
    "orbit right", "crane up", "crane down", "tracking shot", "aerial flyover", "handheld shot",
    "static shot",
]

COLORS = ["black", "white", "red", "green", "yellow", "blue", "brown", "orange", "pink", "purple", "gray"]
NUMBERS = {2: "two", 3: "three", 4: "four", 5: "five"}

PEOPLE = ["a man", "a woman", "an old man", "a young girl", "a boy", "a teenager", "an old woman",
          "a chef", "a soldier", "a student", "a dancer", "an astronaut"]
ACTIONS = [
    ("playing guitar", "on a small wooden stage"), ("playing piano", "in a quiet concert hall"),
    ("playing violin", "on a busy street corner"), ("riding a bike", "along a sunny coastal road"),
    ("dancing ballet", "in a bright rehearsal studio"), ("juggling balls", "in a crowded city park"),
    ("playing basketball", "on an outdoor court at sunset"), ("skateboarding", "down an empty parking lot"),
    ("surfing water", "on a huge blue ocean wave"), ("swimming backstroke", "in an indoor pool"),
    ("jogging", "through a misty forest trail"), ("reading book", "beside a window on a rainy day"),
    ("cooking egg", "in a cozy home kitchen"), ("walking the dog", "along a tree-lined sidewalk"),
    ("playing drums", "in a dark garage"), ("yoga", "on a mat at the beach"),
    ("high jump", "at a stadium track meet"), ("tai chi", "in a garden at dawn"),
    ("snowboarding", "down a steep snowy slope"), ("playing tennis", "on a clay court"),
    ("archery", "in an open green field"), ("baking cookies", "in a warm farmhouse kitchen"),
    ("brushing teeth", "in front of a bathroom mirror"), ("knitting", "in a rocking chair by the fire"),
    ("bowling", "in a neon lit alley"), ("breakdancing", "on a cardboard mat downtown"),
    ("playing chess", "at a table in the park"), ("rock climbing", "on a sheer cliff face"),
    ("ice skating", "on a frozen lake"), ("playing saxophone", "in a smoky jazz club"),
    ("flying kite", "on a windy hilltop"), ("watering plants", "on a sunny balcony"),
    ("skipping rope", "in a school playground"), ("making tea", "in a traditional tea room"),
]
LARGE_ACTIONS = {"riding a bike", "dancing ballet", "juggling balls", "playing basketball", "skateboarding",
                 "surfing water", "swimming backstroke", "jogging", "playing drums", "high jump", "snowboarding",
                 "playing tennis", "breakdancing", "rock climbing", "ice skating", "skipping rope", "flying kite"}
CELEBRITIES = ["Albert Einstein", "Marilyn Monroe", "Barack Obama", "Taylor Swift", "Elon Musk", "Lionel Messi",
               "Audrey Hepburn", "Bruce Lee", "Oprah Winfrey", "Leonardo DiCaprio"]
CELEB_SCENES = ["giving a speech at a podium", "smiling at the camera on a red carpet",
                "walking through a busy airport", "sitting in a cafe drinking coffee",
                "waving to fans outside a theater"]

ANIMALS = ["dog", "cat", "horse", "sheep", "cow", "elephant", "bear", "zebra", "giraffe", "bird"]
ANIMAL_LARGE = ["running across", "jumping over a log in", "chasing each other through", "galloping through"]
ANIMAL_SMALL = ["sleeping quietly in", "resting in", "slowly walking through", "standing still in"]
ANIMAL_PLACES = ["a green meadow", "the snowy woods", "a sandy beach", "a wide savanna", "a farm yard",
                 "a city park", "a muddy field"]

OBJECTS = ["car", "bicycle", "bus", "boat", "umbrella", "cup", "chair", "clock", "vase", "book",
           "teddy bear", "kite", "bench", "motorcycle", "airplane", "train", "suitcase", "bottle",
           "apple", "orange", "banana", "laptop", "backpack", "truck"]
PLURALS = {"bus": "buses", "teddy bear": "teddy bears", "bench": "benches", "boat": "boats"}
OBJECT_LARGE = ["speeding down a highway", "spinning fast on a table", "flying through a stormy sky",
                "rolling quickly down a hill"]
OBJECT_SMALL = ["resting on a wooden table", "sitting on a shelf in a quiet room",
                "slowly drifting on calm water", "placed on a kitchen counter"]
SIGN_WORDS = ["OPEN", "HELLO", "WELCOME", "SALE", "EXIT", "COFFEE", "STOP", "LOVE", "HOTEL", "PIZZA"]
SIGN_SURFACES = ["a wooden sign", "a neon sign", "a chalkboard", "a street banner", "a shop window"]

LANDSCAPE_LARGE = ["ocean waves crashing against dark rocks", "a waterfall pouring into a deep canyon",
                   "storm clouds rolling over a wheat field", "a volcano erupting under a red sky",
                   "a river rushing through a rocky gorge", "heavy snow blowing across a mountain pass"]
LANDSCAPE_SMALL = ["a calm mountain lake at sunrise", "a quiet desert with sand dunes at dusk",
                   "a foggy pine forest in the early morning", "a field of sunflowers under a blue sky",
                   "a frozen tundra under the northern lights", "a peaceful bamboo grove after rain"]
LANDSCAPE_PLAIN = ["a city skyline at night with glowing towers", "a tropical island with palm trees",
                   "rice terraces on green hills", "an old stone bridge over a narrow river"]


def plural(name):
    return PLURALS.get(name, name + "s")


def with_count(name, n):
    return f"{NUMBERS[n]} {plural(name)}" if n > 1 else f"a {name}"


def human(rng, i):
    if i % 5 == 4:
        celeb = rng.choice(CELEBRITIES)
        return f"{celeb} {rng.choice(CELEB_SCENES)}", {"celebrity": celeb}
    action, place = ACTIONS[(i * 7 + rng.randrange(len(ACTIONS))) % len(ACTIONS)]
    attrs = {"action_label": action}
    if rng.random() < 0.5:
        attrs["amplitude"] = "large" if action in LARGE_ACTIONS else "small"
    return f"{rng.choice(PEOPLE)} {action} {place}", attrs


def animal(rng, i):
    name = rng.choice(ANIMALS)
    obj = {"name": name}
    roll = i % 4
    if roll == 0:
        n = rng.choice([2, 3, 4])
        obj["count"] = n
        subject = with_count(name, n)
    elif roll == 1:
        color = rng.choice(COLORS)
        obj["color"] = color
        subject = f"a {color} {name}"
    else:
        subject = f"a {name}"
    large = rng.random() < 0.5
    verb = rng.choice(ANIMAL_LARGE if large else ANIMAL_SMALL)
    if "each other" in verb and obj.get("count", 1) < 2:
        verb = "running across"
    return f"{subject} {verb} {rng.choice(ANIMAL_PLACES)}", {"objects": [obj], "amplitude": "large" if large else "small"}


def obj(rng, i):
    if i % 6 == 5:
        word = rng.choice(SIGN_WORDS)
        return f"{rng.choice(SIGN_SURFACES)} with the word {word} written on it", {"render_text": word}
    name = rng.choice(OBJECTS)
    o = {"name": name}
    roll = i % 3
    if roll == 0:
        n = rng.choice([2, 3, 5])
        o["count"] = n
        subject = with_count(name, n)
    elif roll == 1:
        color = rng.choice(COLORS)
        o["color"] = color
        subject = f"a {color} {name}"
    else:
        subject = f"a shiny {name}"
    large = rng.random() < 0.4
    attrs = {"objects": [o]}
    if large or rng.random() < 0.5:
        attrs["amplitude"] = "large" if large else "small"
    return f"{subject} {rng.choice(OBJECT_LARGE if large else OBJECT_SMALL)}", attrs


def landscape(rng, i):
    roll = i % 3
    if roll == 0:
        return rng.choice(LANDSCAPE_LARGE) + " in slow motion", {"amplitude": "large"}
    if roll == 1:
        return rng.choice(LANDSCAPE_SMALL) + " with gentle wind", {"amplitude": "small"}
    return rng.choice(LANDSCAPE_PLAIN) + " seen from far away", {}


LIGHTING = ["at golden hour", "on a rainy afternoon", "under soft morning light", "late at night",
            "in bright daylight", "on a cloudy winter day", "under a clear blue sky"]

BUILDERS = {"human": human, "animal": animal, "object": obj, "landscape": landscape}


def build(total, seed):
    rng = random.Random(seed)
    per_class = total // 4
    records = []
    styled = camera_moves = 0
    for meta, builder in BUILDERS.items():
        for i in range(per_class):
            text, attrs = builder(rng, i)
            if rng.random() < 0.6:
                text = f"{text} {rng.choice(LIGHTING)}"
            # Half plain, a quarter styled, a quarter with camera motion.
            slot = i % 4
            rec = {"id": f"{meta}_{i + 1:03d}", "meta_class": meta}
            if slot == 2:
                style = STYLES[styled % len(STYLES)]
                styled += 1
                rec["sub_type"] = "style"
                rec["style_tag"] = style
                text = f"{text}, in {style} style"
            elif slot == 3:
                camera = CAMERAS[camera_moves % len(CAMERAS)]
                camera_moves += 1
                rec["sub_type"] = "camera_motion"
                rec["camera_tag"] = camera
                text = f"{text}, camera {camera}"
            else:
                rec["sub_type"] = "general"
            rec["text"] = text
            rec["attributes"] = attrs
            records.append(rec)
    return records


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/benchmark.jsonl")
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=20231006)
    args = ap.parse_args()
    records = build(args.count, args.seed)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(json.dumps({"format": "t2veval.benchmark", "schema": "1", "version": "1.0"}, sort_keys=True) + "\n")
        for r in records:
            f.write(json.dumps(r, sort_keys=True) + "\n")
    words = [len(r["text"].split()) for r in records]
    print(f"{len(records)} prompts, mean {sum(words) / len(words):.2f} words -> {args.out}")


if __name__ == "__main__":
    main()
