#!/usr/bin/env python3
"""Regenerate the bundled 8-bit grayscale test corpus (data/corpus/*.pgm).

Source photographs are the scikit-image sample images, all public domain or
CC0 (see data/corpus/SOURCES.md). Each is center-cropped to a square,
converted to grayscale, and resampled to 256x256.
"""
import pathlib
import sys

import numpy as np
import skimage.data
from skimage.color import rgb2gray
from skimage.transform import resize

NAMES = ["camera", "astronaut", "coffee", "chelsea", "rocket", "coins"]
SIDE = 256


def to_gray_square(img):
    if img.ndim == 3:
        img = rgb2gray(img[..., :3])
    else:
        img = img.astype(np.float64) / 255.0
    h, w = img.shape
    s = min(h, w)
    top, left = (h - s) // 2, (w - s) // 2
    img = img[top:top + s, left:left + s]
    img = resize(img, (SIDE, SIDE), anti_aliasing=True)
    return np.clip(np.rint(img * 255.0), 0, 255).astype(np.uint8)


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(b"P5\n%d %d\n255\n" % (w, h))
        f.write(img.tobytes())


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "data/corpus")
    out.mkdir(parents=True, exist_ok=True)
    for name in NAMES:
        write_pgm(out / f"{name}.pgm", to_gray_square(getattr(skimage.data, name)()))


if __name__ == "__main__":
    main()
