#!/usr/bin/env python3
"""Convert the digit JSON files shipped in the npm `mnist` package into IDX files.

Usage: mnist_json_to_idx.py <package>/src/digits <out-dir> [n_train] [n_test]

The JSON stores each pixel as round(byte / 255, 3); the byte value is recovered
exactly with round(v * 255). Digits are interleaved by class (0, 1, ..., 9, 0, ...)
so any prefix of the output is roughly class balanced.
"""
import json
import struct
import sys
from pathlib import Path


def load_digits(src):
    per_class = []
    for d in range(10):
        flat = json.loads((src / f"{d}.json").read_text())["data"]
        n = len(flat) // 784
        per_class.append([bytes(round(v * 255) for v in flat[i * 784:(i + 1) * 784]) for i in range(n)])
    images, labels = [], []
    k = 0
    while any(per_class):
        d = k % 10
        if per_class[d]:
            images.append(per_class[d].pop(0))
            labels.append(d)
        k += 1
    return images, labels


def write_idx(out, prefix, images, labels):
    with open(out / f"{prefix}-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x00000803, len(images), 28, 28))
        for img in images:
            f.write(img)
    with open(out / f"{prefix}-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x00000801, len(labels)))
        f.write(bytes(labels))


def main():
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    n_train = int(sys.argv[3]) if len(sys.argv) > 3 else 3000
    n_test = int(sys.argv[4]) if len(sys.argv) > 4 else 1000
    images, labels = load_digits(src)
    out.mkdir(parents=True, exist_ok=True)
    write_idx(out, "train", images[:n_train], labels[:n_train])
    write_idx(out, "t10k", images[n_train:n_train + n_test], labels[n_train:n_train + n_test])


if __name__ == "__main__":
    main()
