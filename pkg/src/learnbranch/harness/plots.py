"""Static SVG charts of training curves and performance profiles."""

import csv
import os

import matplotlib
from matplotlib.figure import Figure

from .csvio import (PROFILE_COLUMNS, TRAIN_CURVE_COLUMNS, TRAIN_CURVE_TYPES, CSVFormatError,
                    read_csv)
from .profile import read_profile

# fixed ids and no timestamp, so the same input renders the same bytes
_RC = {"svg.hashsalt": "learnbranch", "svg.fonttype": "none", "font.size": 9}


def _header(path):
    with open(path, newline="") as fh:
        return next(csv.reader(fh), None)


def _save(fig, path):
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata={"Date": None})


def plot_profile(curves, path, title="Performance profile"):
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(5, 3.5))
        ax = fig.add_subplot()
        for s, c in curves.items():
            ax.step(c.tau, c.rho, where="post", marker="o", markersize=3, label=s,
                    gid=f"series-{s}")
        ax.set_xlabel("τ (ratio to best)")
        ax.set_ylabel("ρ(τ)")
        ax.set_ylim(-0.02, 1.02)
        ax.set_title(title)
        if curves:
            ax.legend(loc="lower right")
        fig.tight_layout()
    _save(fig, path)


def plot_curve(rows, path, title="Validation nodes to optimality"):
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=(5, 3.5))
        ax = fig.add_subplot()
        if rows:
            ax.plot([r["episode"] for r in rows], [r["mean_nodes"] for r in rows],
                    marker="o", markersize=3, gid="series")
        ax.set_xlabel("episode")
        ax.set_ylabel("mean nodes")
        ax.set_title(title)
        fig.tight_layout()
    _save(fig, path)


def emit_plots(paths, out_dir):
    """One SVG per CSV (training curve or profile); returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for p in paths:
        header = _header(p)
        out = os.path.join(out_dir, os.path.splitext(os.path.basename(p))[0] + ".svg")
        if header == PROFILE_COLUMNS:
            plot_profile(read_profile(p), out)
        elif header == TRAIN_CURVE_COLUMNS:
            plot_curve(read_csv(p, TRAIN_CURVE_COLUMNS, TRAIN_CURVE_TYPES), out)
        else:
            raise CSVFormatError(p, 1, f"unrecognised header {header}")
        written.append(out)
    return written
