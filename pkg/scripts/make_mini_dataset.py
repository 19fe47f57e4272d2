"""Regenerate the bundled synthetic mini-dataset under tests/data/mini/.

Deterministic: a fixed seed drives box placement, prediction jitter and image
pixels, so re-running this script reproduces the committed files byte for byte.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

from PIL import Image, ImageDraw

OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "mini"

CLASSES = [
    {"id": 1, "name": "cat", "supercategory": "mammal"},
    {"id": 2, "name": "dog", "supercategory": "mammal"},
    {"id": 3, "name": "bird", "supercategory": "avian"},
]
COLORS = {1: (220, 120, 60), 2: (90, 140, 220), 3: (120, 200, 110)}
SIZE = 64


def clamp_box(x, y, w, h):
    x = max(0, min(SIZE - 2, x))
    y = max(0, min(SIZE - 2, y))
    w = max(2, min(SIZE - x, w))
    h = max(2, min(SIZE - y, h))
    return [round(v, 1) for v in (x, y, w, h)]


def main():
    rng = random.Random(20240601)
    images = []
    annotations = []
    predictions = []
    features = {}
    (OUT / "images").mkdir(parents=True, exist_ok=True)

    ann_id = 0
    for image_id in range(1, 13):
        file_name = f"img{image_id:02d}.png"
        images.append({"id": image_id, "width": SIZE, "height": SIZE, "file_name": file_name})
        img = Image.new("RGB", (SIZE, SIZE), (24 + image_id, 28, 40))
        draw = ImageDraw.Draw(img)

        for _ in range(rng.randint(2, 4)):
            ann_id += 1
            class_id = rng.randint(1, 3)
            w = rng.uniform(8, 26)
            h = rng.uniform(8, 26)
            x = rng.uniform(0, SIZE - w - 1)
            y = rng.uniform(0, SIZE - h - 1)
            box = clamp_box(x, y, w, h)
            annotations.append(
                {
                    "id": ann_id,
                    "image_id": image_id,
                    "category_id": class_id,
                    "bbox": box,
                    "iscrowd": 0,
                }
            )
            draw.rectangle(
                [box[0], box[1], box[0] + box[2] - 1, box[1] + box[3] - 1],
                fill=COLORS[class_id],
            )
            features[f"gt:{ann_id}"] = [
                round(box[2] * box[3] / (SIZE * SIZE), 4),
                round(min(box[2], box[3]) / max(box[2], box[3]), 4),
                float(class_id),
            ]

            roll = rng.random()
            if roll < 0.55:  # good same-class prediction, jittered
                jitter = lambda: rng.uniform(-3, 3)  # noqa: E731
                pbox = clamp_box(box[0] + jitter(), box[1] + jitter(), box[2] * rng.uniform(0.8, 1.25), box[3] * rng.uniform(0.8, 1.25))
                predictions.append(
                    {
                        "image_id": image_id,
                        "category_id": class_id,
                        "bbox": pbox,
                        "score": round(rng.uniform(0.55, 0.98), 3),
                    }
                )
            elif roll < 0.75:  # wrong class on the right spot
                other = rng.choice([c for c in (1, 2, 3) if c != class_id])
                pbox = clamp_box(box[0] + rng.uniform(-2, 2), box[1] + rng.uniform(-2, 2), box[2], box[3])
                predictions.append(
                    {
                        "image_id": image_id,
                        "category_id": other,
                        "bbox": pbox,
                        "score": round(rng.uniform(0.4, 0.9), 3),
                    }
                )
            elif roll < 0.9:  # shifted / resized prediction
                pbox = clamp_box(
                    box[0] + rng.uniform(2, 7),
                    box[1] + rng.uniform(2, 7),
                    box[2] * rng.uniform(0.5, 1.6),
                    box[3] * rng.uniform(0.5, 1.6),
                )
                predictions.append(
                    {
                        "image_id": image_id,
                        "category_id": class_id,
                        "bbox": pbox,
                        "score": round(rng.uniform(0.3, 0.8), 3),
                    }
                )
            # else: missed object

        if rng.random() < 0.5:  # background false positive
            w = rng.uniform(5, 14)
            h = rng.uniform(5, 14)
            predictions.append(
                {
                    "image_id": image_id,
                    "category_id": rng.randint(1, 3),
                    "bbox": clamp_box(rng.uniform(0, SIZE - w - 1), rng.uniform(0, SIZE - h - 1), w, h),
                    "score": round(rng.uniform(0.3, 0.7), 3),
                }
            )

        img.save(OUT / "images" / file_name)

    for j, det in enumerate(predictions, start=1):
        features[f"pred:{j}"] = [
            round(det["bbox"][2] * det["bbox"][3] / (SIZE * SIZE), 4),
            round(min(det["bbox"][2], det["bbox"][3]) / max(det["bbox"][2], det["bbox"][3]), 4),
            float(det["category_id"]),
        ]

    (OUT / "ground_truth.json").write_text(
        json.dumps(
            {"images": images, "annotations": annotations, "categories": CLASSES},
            indent=1,
            sort_keys=True,
        )
        + "\n"
    )
    (OUT / "predictions.json").write_text(json.dumps(predictions, indent=1, sort_keys=True) + "\n")
    (OUT / "features.json").write_text(json.dumps(features, indent=1, sort_keys=True) + "\n")
    print(f"{len(images)} images, {len(annotations)} annotations, {len(predictions)} predictions")


if __name__ == "__main__":
    main()
