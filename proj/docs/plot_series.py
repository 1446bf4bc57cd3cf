#!/usr/bin/env python3
"""Plot the files written by `lgfb simulate` / `lgfb plot-data`.

usage: plot_series.py OUT_DIR [--save fig.png]

Reads OUT_DIR/series.csv (and OUT_DIR/snapshot.csv if present) and draws
fronts, span against span_crit, and the final profiles.
"""

import argparse
import pathlib

import matplotlib.pyplot as plt
import numpy as np


def read_csv(path):
    meta = {}
    lines = []
    for line in pathlib.Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            meta[key] = value
        elif line:
            lines.append(line)
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return meta, {name: rows[:, i] for i, name in enumerate(header)}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out_dir")
    parser.add_argument("--save")
    args = parser.parse_args()
    out = pathlib.Path(args.out_dir)

    meta, s = read_csv(out / "series.csv")
    span_crit = float(meta["span_crit"])
    snapshot = out / "snapshot.csv"
    fig, axes = plt.subplots(1, 3 if snapshot.exists() else 2, figsize=(14, 4))

    axes[0].plot(s["t"], s["g"], label="g(t)")
    axes[0].plot(s["t"], s["h"], label="h(t)")
    axes[0].set_xlabel("t")
    axes[0].set_title("fronts")
    axes[0].legend()

    axes[1].plot(s["t"], s["span"], label="h - g")
    axes[1].axhline(span_crit, color="k", ls="--", label="span_crit")
    axes[1].set_xlabel("t")
    axes[1].set_title(f"span ({meta.get('verdict', 'unclassified')})")
    axes[1].legend()

    if snapshot.exists():
        _, snap = read_csv(snapshot)
        axes[2].plot(snap["x"], snap["u"], label="u")
        axes[2].plot(snap["x"], snap["v"], label="v")
        axes[2].set_xlabel("x")
        axes[2].set_title("final profiles")
        axes[2].legend()

    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=120)
    else:
        plt.show()


if __name__ == "__main__":
    main()
