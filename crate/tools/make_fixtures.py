#!/usr/bin/env python3
"""Regenerates the committed test fixtures under fixtures/.

Everything is a pure function of pixel coordinates, so the outputs are
bit-for-bit reproducible. Images are written as ASCII PGM (P2, maxval 255)
with round-half-up quantization, matching the library's rule.
"""

import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "fixtures")


def write_p2(name, width, height, samples):
    assert len(samples) == width * height
    lines = [f"P2", f"{width} {height}", "255"]
    for y in range(height):
        row = samples[y * width:(y + 1) * width]
        lines.append(" ".join(str(v) for v in row))
    with open(os.path.join(OUT, name), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def q(v):
    """Round half up to 8 bits after clamping to [0, 1]."""
    v = min(1.0, max(0.0, v))
    return int(math.floor(255.0 * v + 0.5))


def textured_scene(size=128):
    """A test scene in the spirit of the classic textured portraits:
    a smooth graded background, flat geometric shapes with sharp edges,
    and a diagonally striped band of fine texture (the "scarf")."""
    # Scarf parallelogram and stripe geometry.
    sx0, sx1 = 14, 62
    sy0, sy1 = 58, 118
    ca, sa = math.cos(math.pi / 6), math.sin(math.pi / 6)
    period = 4.2

    img = []
    for y in range(size):
        for x in range(size):
            v = 0.30 + 0.25 * (y / (size - 1))  # graded backdrop
            if 88 <= x < 122 and 12 <= y < 44:  # bright plaque
                v = 0.82
            if y >= 108 and x < 80:  # dark ledge
                v = 0.15
            if sx0 <= x < sx1 and sy0 <= y < sy1:  # striped band
                phase = (x * ca + y * sa) / period
                v = 0.45 + 0.28 * math.sin(2.0 * math.pi * phase)
            img.append(q(v))
    return img


def scene_masks(size=128):
    """Interior masks for the striped band and for a flat background patch,
    eroded well clear of any region boundary (margin 6 > block radius 4)."""
    texture = []
    flat = []
    for y in range(size):
        for x in range(size):
            t = 255 if (14 + 6 <= x < 62 - 6 and 58 + 6 <= y < 118 - 6) else 0
            # Background patch: graded backdrop only, away from plaque/ledge/band.
            f = 255 if (70 <= x < 120 and 56 <= y < 100) else 0
            texture.append(t)
            flat.append(f)
    return texture, flat


def flat_checker(size=64):
    """Left half constant mid-gray, right half a two-level checkerboard."""
    img = []
    for y in range(size):
        for x in range(size):
            if x < size // 2:
                img.append(128)
            else:
                img.append(q(0.75) if (x + y) % 2 == 0 else q(0.25))
    return img


def main():
    os.makedirs(OUT, exist_ok=True)
    write_p2("textured_scene_128.pgm", 128, 128, textured_scene())
    tex, flat = scene_masks()
    write_p2("textured_scene_128_texture_mask.pgm", 128, 128, tex)
    write_p2("textured_scene_128_flat_mask.pgm", 128, 128, flat)
    write_p2("flat_checker_64.pgm", 64, 64, flat_checker())
    print("fixtures written to", os.path.normpath(OUT))


if __name__ == "__main__":
    main()
