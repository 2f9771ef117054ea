#!/usr/bin/env python3
"""Render publication-style figures from zenosim CSV outputs.

Usage:
    figures.py density-map     --in density.csv --out fig.png
    figures.py trajectory      --in trajectory.csv --out fig.png
    figures.py loss-curve      --in loss_curve_*.csv [--collapse collapse_report.csv
                               --rescaled] --out fig.png
    figures.py collapse-panel  --in loss_curve_*.csv [--collapse collapse_report.csv
                               --rescaled] --out fig.png

The scripts never recompute physics: every image is a pure function of the
CSV content. Output is PNG at a fixed DPI.
"""
import argparse
import os
import re
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

DPI = 150
CURVE_NAME = re.compile(r"loss_curve_(-?[0-9.]+)_(-?[0-9.]+)\.csv$")


class FigureError(Exception):
    pass


def load_table(path, required):
    if not os.path.exists(path):
        raise FigureError(f"input file not found: {path}")
    try:
        df = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise FigureError(f"{path}: file is empty") from None
    missing = [c for c in required if c not in df.columns]
    if missing:
        raise FigureError(f"{path}: missing required columns {missing} "
                          f"(found {list(df.columns)})")
    if df.empty:
        raise FigureError(f"{path}: no data rows")
    return df


def curve_label(path):
    m = CURVE_NAME.search(os.path.basename(path))
    if not m:
        raise FigureError(f"{path}: expected a loss_curve_<w>_<xd>.csv file name")
    return float(m.group(1)), float(m.group(2))


def load_collapse(path):
    df = load_table(path, ["w", "x_d", "scale", "residual", "gamma_star"])
    return {(row.w, row.x_d): row.scale for row in df.itertuples()}


def plot_density_map(args):
    df = load_table(args.inputs[0], ["t", "x", "rho"])
    pivot = df.pivot(index="x", columns="t", values="rho")
    fig, ax = plt.subplots(figsize=(7, 4.2))
    mesh = ax.pcolormesh(pivot.columns.values, pivot.index.values, pivot.values,
                         shading="nearest", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$\rho(x,t)$")
    ax.set_xlabel("t")
    ax.set_ylabel("x")
    ax.set_title("condensate density")
    return fig


def plot_trajectory(args):
    fig, ax = plt.subplots(figsize=(6, 4))
    for path in args.inputs:
        df = load_table(path, ["t", "p_rem"])
        ax.plot(df["t"], df["p_rem"], label=os.path.basename(os.path.dirname(path))
                or os.path.basename(path))
    ax.set_xlabel("t")
    ax.set_ylabel(r"$P_{\mathrm{rem}}(t)$")
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    ax.set_title("remaining fraction")
    if len(args.inputs) > 1:
        ax.legend(fontsize=8)
    return fig


def _overlay_curves(ax, paths, scales, rescaled):
    gamma_ref = None
    for path in sorted(paths, key=lambda p: curve_label(p)[1], reverse=True):
        w, xd = curve_label(path)
        df = load_table(path, ["gamma", "final_loss"])
        if gamma_ref is None:
            gamma_ref = df["gamma"].values
        elif len(df) != len(gamma_ref) or np.any(df["gamma"].values != gamma_ref):
            raise FigureError(f"{path}: gamma grid differs from the other curves "
                              f"in this panel")
        line, = ax.plot(df["gamma"], df["final_loss"], marker=".", ms=3,
                        label=f"$x_d={xd:g}$")
        if rescaled and scales is not None:
            s = scales.get((w, xd))
            if s is not None and s != 1.0:
                ax.plot(df["gamma"], s * df["final_loss"], ls="--", lw=0.8,
                        color=line.get_color(), alpha=0.7,
                        label=f"$x_d={xd:g}$ (x{s:.2f})")


def plot_loss_curves(args):
    scales = load_collapse(args.collapse) if args.collapse else None
    if args.rescaled and scales is None:
        raise FigureError("--rescaled needs --collapse <collapse_report.csv>")
    fig, ax = plt.subplots(figsize=(6, 4))
    _overlay_curves(ax, args.inputs, scales, args.rescaled)
    w = curve_label(args.inputs[0])[0]
    ax.set_xlabel(r"$\gamma$")
    ax.set_ylabel(r"$P_{\mathrm{loss}}$")
    ax.set_title(f"final loss vs beam intensity, w={w:g}")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    return fig


def plot_collapse_panel(args):
    scales = load_collapse(args.collapse) if args.collapse else None
    if args.rescaled and scales is None:
        raise FigureError("--rescaled needs --collapse <collapse_report.csv>")
    groups = {}
    for path in args.inputs:
        groups.setdefault(curve_label(path)[0], []).append(path)
    widths = sorted(groups)
    fig, axes = plt.subplots(1, len(widths), figsize=(3.2 * len(widths), 3.4),
                             squeeze=False)
    for ax, w in zip(axes[0], widths):
        _overlay_curves(ax, groups[w], scales, args.rescaled)
        ax.set_title(f"w={w:g}")
        ax.set_xlabel(r"$\gamma$")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=7)
    axes[0][0].set_ylabel(r"$P_{\mathrm{loss}}$")
    return fig


KINDS = {
    "density-map": plot_density_map,
    "trajectory": plot_trajectory,
    "loss-curve": plot_loss_curves,
    "collapse-panel": plot_collapse_panel,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Figures from zenosim CSV outputs (pure CSV -> PNG).")
    parser.add_argument("kind", choices=sorted(KINDS))
    parser.add_argument("--in", dest="inputs", nargs="+", required=True,
                        metavar="CSV", help="input CSV file(s)")
    parser.add_argument("--out", required=True, help="output PNG path")
    parser.add_argument("--collapse", help="collapse_report.csv with scale factors")
    parser.add_argument("--rescaled", action="store_true",
                        help="overlay curves rescaled by the collapse factors")
    args = parser.parse_args(argv)

    try:
        fig = KINDS[args.kind](args)
    except FigureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fig.savefig(args.out, dpi=DPI, bbox_inches="tight")
    plt.close(fig)
    print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
