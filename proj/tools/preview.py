#!/usr/bin/env python3
"""Terminal preview of the PGM/PBM files produced and consumed by gisec.

Renders a grayscale ramp per pixel block and prints basic statistics, so a
simulated round can be inspected without leaving the shell:

    tools/preview.py out/recovered.pgm out/clean.pgm
"""

import argparse
import sys

RAMP = " .:-=+*#%@"


def read_tokens(path):
    """Whitespace-separated tokens with '#' comments stripped, plus raw bytes."""
    data = open(path, "rb").read()
    tokens = []
    i = 0
    while i < len(data):
        c = data[i : i + 1]
        if c == b"#":
            while i < len(data) and data[i : i + 1] != b"\n":
                i += 1
        elif c.isspace():
            i += 1
        else:
            start = i
            while i < len(data) and not data[i : i + 1].isspace() and data[i : i + 1] != b"#":
                i += 1
            tokens.append((data[start:i], start))
    return tokens, data


def load_image(path):
    """Returns (width, height, maxval, flat pixel list). PBM masks get maxval 1."""
    tokens, data = read_tokens(path)
    magic = tokens[0][0]
    if magic == b"P1":
        width, height = int(tokens[1][0]), int(tokens[2][0])
        digits = b"".join(t for t, _ in tokens[3:])
        pixels = [int(chr(d)) for d in digits]
        return width, height, 1, pixels
    if magic == b"P2":
        width, height, maxval = (int(tokens[i][0]) for i in (1, 2, 3))
        pixels = [int(t) for t, _ in tokens[4:]]
        return width, height, maxval, pixels
    if magic == b"P5":
        width, height, maxval = (int(tokens[i][0]) for i in (1, 2, 3))
        offset = tokens[3][1] + len(tokens[3][0]) + 1  # single byte after header
        per = 2 if maxval > 255 else 1
        raw = data[offset : offset + width * height * per]
        if per == 1:
            pixels = list(raw)
        else:
            pixels = [raw[i] << 8 | raw[i + 1] for i in range(0, len(raw), 2)]
        return width, height, maxval, pixels
    raise SystemExit(f"{path}: unsupported magic {magic.decode(errors='replace')}")


def render(path, invert):
    width, height, maxval, pixels = load_image(path)
    if len(pixels) != width * height:
        raise SystemExit(f"{path}: expected {width * height} pixels, found {len(pixels)}")
    lo, hi = min(pixels), max(pixels)
    span = max(hi - lo, 1)
    ramp = RAMP[::-1] if invert else RAMP
    print(f"{path}: {width}x{height}, range [{lo}, {hi}] of max {maxval}, "
          f"mean {sum(pixels) / len(pixels):.2f}")
    for y in range(height):
        row = pixels[y * width : (y + 1) * width]
        print("".join(ramp[(v - lo) * (len(ramp) - 1) // span] for v in row))
    print()


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("files", nargs="+", help="PGM (P2/P5) or PBM (P1) files")
    parser.add_argument("--invert", action="store_true",
                        help="dark-on-light ramp (for printing)")
    args = parser.parse_args()
    for path in args.files:
        render(path, args.invert)


if __name__ == "__main__":
    sys.exit(main())
