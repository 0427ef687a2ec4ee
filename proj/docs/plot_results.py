#!/usr/bin/env python3
"""Plot rmc sweep results.

Usage:
  plot_results.py sweep  <results_mean.csv> <out.png>   # RMSE vs SNR or fraction
  plot_results.py bench  <bench.csv>        <out.png>   # runtime vs case
"""

import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLES = {
    "rmc-how": "o-",
    "rmc-hoc": "s-",
    "rmc-hop": "d-",
    "fnorm-baseline": "x--",
}


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def plot_sweep(path, out):
    rows = read_rows(path)
    snrs = {float(r["snr_db"]) for r in rows}
    xkey = "snr_db" if len(snrs) > 1 else "observe_fraction"
    xlabel = "SNR (dB)" if xkey == "snr_db" else "fraction observed"
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for method, style in STYLES.items():
        pts = sorted(
            (float(r[xkey]), float(r["mean_rmse"])) for r in rows if r["method"] == method
        )
        if pts:
            ax.semilogy([p[0] for p in pts], [p[1] for p in pts], style, label=method)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("RMSE")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_bench(path, out):
    rows = read_rows(path)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for method, style in STYLES.items():
        pts = sorted(
            (int(r["case"]), float(r["mean_seconds"])) for r in rows if r["method"] == method
        )
        if pts:
            ax.semilogy([p[0] for p in pts], [p[1] for p in pts], style, label=method)
    ax.set_xlabel("case")
    ax.set_xticks([1, 2, 3, 4])
    ax.set_ylabel("mean runtime (s)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def main():
    if len(sys.argv) != 4 or sys.argv[1] not in ("sweep", "bench"):
        print(__doc__, file=sys.stderr)
        return 2
    if sys.argv[1] == "sweep":
        plot_sweep(sys.argv[2], sys.argv[3])
    else:
        plot_bench(sys.argv[2], sys.argv[3])
    return 0


if __name__ == "__main__":
    sys.exit(main())
