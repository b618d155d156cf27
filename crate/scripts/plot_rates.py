#!/usr/bin/env python3
"""Plot a rate curve CSV written by `packing-bounds rate`.

    packing-bounds rate --space grassmann:R:3:100 --grid 0.02:1.732:120 > g3.csv
    python3 scripts/plot_rates.py g3.csv g3.png
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main(src, dst):
    curves = defaultdict(list)
    with open(src, newline="") as fh:
        for row in csv.DictReader(fh):
            rate = float(row["rate"])
            if rate != float("inf"):
                curves[row["method"]].append((float(row["d"]), rate))
    fig, ax = plt.subplots(figsize=(6, 4))
    for method, pts in curves.items():
        xs, ys = zip(*pts)
        ax.plot(xs, ys, label=method, linestyle="--" if method == "gv" else "-")
    ax.set_xlabel("minimum distance d")
    ax.set_ylabel("rate (nats)")
    ax.set_ylim(bottom=0)
    ax.legend()
    fig.tight_layout()
    fig.savefig(dst, dpi=150)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit("usage: plot_rates.py <curve.csv> <out.png>")
    main(sys.argv[1], sys.argv[2])
