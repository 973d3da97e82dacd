#!/usr/bin/env python3
"""Generate the 8-image synthetic sample dataset used by the tests."""

import argparse
import math
import pathlib

from PIL import Image, ImageDraw

# (stem, width, height, format, boxes as (class, cx, cy, w, h))
SAMPLES = [
    ("reef_000", 320, 240, "png", [(0, 0.30, 0.40, 0.20, 0.25), (1, 0.70, 0.65, 0.30, 0.20)]),
    ("reef_001", 256, 256, "png", [(2, 0.50, 0.50, 0.40, 0.40)]),
    ("reef_002", 400, 300, "jpg", [(0, 0.25, 0.30, 0.15, 0.20), (0, 0.60, 0.70, 0.25, 0.30),
                                   (3, 0.85, 0.20, 0.10, 0.12)]),
    ("reef_003", 200, 360, "png", [(1, 0.50, 0.30, 0.60, 0.25)]),
    ("reef_004", 480, 360, "png", []),  # background image with an empty label file
    ("reef_005", 300, 200, "png", [(4, 0.05, 0.50, 0.10, 0.30), (2, 0.50, 0.95, 0.40, 0.10)]),
    ("reef_006", 480, 270, "png", [(0, 0.40, 0.45, 0.18, 0.30), (1, 0.75, 0.55, 0.22, 0.28)]),
    ("reef_007", 128, 96, "png", None),  # no label file at all
]


def render(stem_index, width, height, boxes):
    img = Image.new("RGB", (width, height))
    px = img.load()
    for y in range(height):
        for x in range(width):
            u, v = x / width, y / height
            r = int(40 + 60 * v + 20 * math.sin(7 * u + stem_index))
            g = int(90 + 80 * (1 - v) + 30 * math.sin(5 * v + 3 * u))
            b = int(120 + 90 * (1 - v) + 25 * math.cos(9 * u - stem_index))
            px[x, y] = (max(0, min(255, r)), max(0, min(255, g)), max(0, min(255, b)))
    draw = ImageDraw.Draw(img)
    for i, (cls, cx, cy, w, h) in enumerate(boxes or []):
        x0, y0 = (cx - w / 2) * width, (cy - h / 2) * height
        x1, y1 = (cx + w / 2) * width, (cy + h / 2) * height
        colour = [(230, 120, 40), (240, 200, 60), (200, 60, 90), (90, 220, 140), (250, 250, 250)][cls]
        draw.ellipse([x0, y0, x1 - 1, y1 - 1], fill=colour, outline=(20, 20, 20))
        draw.line([x0, (y0 + y1) / 2, x1 - 1, (y0 + y1) / 2], fill=(30, 30, 30), width=1 + i)
    return img


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent
                                         / "tests" / "fixtures" / "sample"))
    args = ap.parse_args()
    root = pathlib.Path(args.out)
    (root / "images").mkdir(parents=True, exist_ok=True)
    (root / "labels").mkdir(parents=True, exist_ok=True)
    for i, (stem, w, h, fmt, boxes) in enumerate(SAMPLES):
        img = render(i, w, h, boxes)
        if fmt == "jpg":
            img.save(root / "images" / f"{stem}.jpg", quality=92)
        else:
            img.save(root / "images" / f"{stem}.png")
        if boxes is not None:
            lines = "".join(f"{c} {cx:.6f} {cy:.6f} {bw:.6f} {bh:.6f}\n" for c, cx, cy, bw, bh in boxes)
            (root / "labels" / f"{stem}.txt").write_text(lines)


if __name__ == "__main__":
    main()
