"""Prepare an IDX digit corpus for the featurization experiment.

If you have the classic MNIST IDX files, point the experiment scripts at
them directly; this script is for environments without them.  It renders
scikit-learn's bundled 8x8 handwritten digits (1797 images, intensities
0..16) into MNIST-shaped 28x28 grayscale frames and writes standard IDX
image/label files.  The rendering is deterministic: nearest-neighbor
upscaling and a linear intensity map to 0..255, so thresholding at the
experiment's default (intensity > 100) keeps pen strokes and drops paper.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from tropcoords.mnist import write_idx_images, write_idx_labels
from tropcoords.persistence import GrayImage

FRAME = 28
SOURCE_SIDE = 8
INTENSITY_SCALE = 255.0 / 16.0


def upscale_digit(img8: np.ndarray) -> bytes:
    """Nearest-neighbor map of an 8x8 digit onto the 28x28 frame."""
    out = bytearray(FRAME * FRAME)
    for r in range(FRAME):
        src_r = r * SOURCE_SIDE // FRAME
        for c in range(FRAME):
            v = img8[src_r, c * SOURCE_SIDE // FRAME]
            out[r * FRAME + c] = int(round(v * INTENSITY_SCALE))
    return bytes(out)


def synthesize_digits(count: int | None = None) -> tuple[list[GrayImage], list[int]]:
    from sklearn.datasets import load_digits

    bundle = load_digits()
    images = bundle.images if count is None else bundle.images[:count]
    labels = bundle.target if count is None else bundle.target[:count]
    grays = [GrayImage(FRAME, FRAME, upscale_digit(img)) for img in images]
    return grays, [int(y) for y in labels]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-images", required=True)
    parser.add_argument("--out-labels", required=True)
    parser.add_argument("--count", type=int, default=None)
    args = parser.parse_args(argv)

    images, labels = synthesize_digits(args.count)
    write_idx_images(args.out_images, images)
    write_idx_labels(args.out_labels, labels)
    print(f"wrote {len(images)} digits to {args.out_images} / {args.out_labels}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
