"""Dolan-Moré performance profiles over per-instance metrics."""

import dataclasses
import math

import numpy as np

from .csvio import PROFILE_COLUMNS, read_csv, write_csv


@dataclasses.dataclass
class ProfileCurve:
    """ρ(τ): fraction of problems solved within a factor τ of the best solver."""

    solver: str
    tau: np.ndarray
    rho: np.ndarray

    def at(self, t):
        i = np.searchsorted(self.tau, t, side="right")
        return 0.0 if i == 0 else float(self.rho[i - 1])


def _metric(v):
    if v is None:
        return math.inf
    v = float(v)
    return math.inf if math.isnan(v) else v


def performance_profile(table):
    """Profiles from ``{solver: {problem: metric}}``.

    A missing metric (None, nan, inf) is a failure with ratio ∞. Every curve
    is sampled at the same grid: all distinct finite ratios.
    """
    solvers = list(table)
    if len(solvers) < 2:
        raise ValueError("a performance profile needs at least two solvers")
    problems = set(table[solvers[0]])
    for s in solvers[1:]:
        if set(table[s]) != problems:
            raise ValueError(f"solver {s!r} was run on a different instance set "
                             f"than {solvers[0]!r}")
    if not problems:
        raise ValueError("no problems to profile")
    problems = sorted(problems)
    m = np.array([[_metric(table[s][p]) for s in solvers] for p in problems])
    if (m <= 0).any():
        raise ValueError("metrics must be positive")
    best = m.min(axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        ratio = np.where(np.isfinite(m), m / best, np.inf)
    finite = ratio[np.isfinite(ratio)]
    taus = np.unique(finite)
    curves = {}
    for j, s in enumerate(solvers):
        col = ratio[:, j]
        rho = np.array([(col <= t).mean() for t in taus])
        curves[s] = ProfileCurve(s, taus.copy(), rho)
    return curves


def table_from_results(rows, metric="nodes_avg"):
    """``{solver: {instance: metric}}`` from evaluation rows (dicts); failures -> ∞."""
    table = {}
    for r in rows:
        per = table.setdefault(r["solver"], {})
        if r["instance"] in per:
            raise ValueError(f"duplicate result for {r['solver']} on {r['instance']}")
        per[r["instance"]] = math.inf if r["failures"] else r[metric]
    return table


def write_profile(curves, path):
    records = []
    for s, c in curves.items():
        records.extend([s, f"{t:.6f}", f"{r:.6f}"] for t, r in zip(c.tau, c.rho))
    write_csv(path, PROFILE_COLUMNS, records)


def read_profile(path):
    rows = read_csv(path, PROFILE_COLUMNS, [str, float, float])
    grouped = {}
    for r in rows:
        grouped.setdefault(r["solver"], []).append((r["tau"], r["rho"]))
    return {s: ProfileCurve(s, np.array([t for t, _ in v]), np.array([p for _, p in v]))
            for s, v in grouped.items()}
