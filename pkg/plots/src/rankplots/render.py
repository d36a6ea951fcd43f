"""One figure per experiment id.

decay figures (lemma41, lemma43): log_q of the tail estimate against the
matrix size nm, with the 99% interval as an error band; tail-versus-bound
(claim42): empirical points under the bound curve; histograms (theorem31,
randcode_*): per-trial maximum list sizes with the analytic mean count
marked.

All statistics come from the `.summary.json` sidecars; this module never
recomputes them.  Output is deterministic: fixed style, fixed SVG hash salt,
no embedded timestamps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "rankplots"

import matplotlib.pyplot as plt

from .reader import LoadedRun, SchemaError, load_run

_DECAY_IDS = ("lemma41", "lemma43")
_HIST_IDS = ("theorem31", "randcode_a1", "randcode_a2")
_DECAY_LABELS = {"lemma41": "center=zero", "lemma43": "span_tail"}


@dataclass(frozen=True)
class PlotJob:
    inputs: tuple[Path, ...]
    out: Path
    fmt: str = "svg"  # svg | png
    logq: bool = True

    def __post_init__(self):
        if self.fmt not in ("svg", "png"):
            raise ValueError(f"unsupported format {self.fmt!r}")
        if not self.inputs:
            raise ValueError("no input files")


def _pick_summary(run: LoadedRun) -> dict:
    if run.summaries is None:
        raise SchemaError(f"{run.path}: missing sidecar {run.path.stem}.summary.json "
                          "(statistics are never recomputed from the CSV)")
    s = run.summary(_DECAY_LABELS.get(run.experiment)) or run.summary()
    if s is None:
        raise SchemaError(f"{run.path}: sidecar holds no summaries")
    return s


def _nm(run: LoadedRun) -> int:
    row = run.rows[0]
    return row["m"] * row["n"]


def _logq(p: float, q: int) -> float | None:
    if p <= 0:
        return None
    return math.log(p) / math.log(q)


def _render_decay(runs: list[LoadedRun], ax, logq: bool) -> dict:
    pts, lows, highs = [], [], []
    q = runs[0].rows[0]["q"]
    for run in sorted(runs, key=_nm):
        s = _pick_summary(run)
        x = _nm(run)
        y = _logq(s["estimate"], q) if logq else s["estimate"]
        if y is None:
            continue  # zero successes: no finite log point
        lo = _logq(max(s["interval_low"], 1e-300), q) if logq else s["interval_low"]
        hi = _logq(s["interval_high"], q) if logq else s["interval_high"]
        pts.append((x, y))
        lows.append(lo)
        highs.append(hi)
    if pts:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ax.plot(xs, ys, "o-", color="#1f6fb4", label="estimate")
        ax.fill_between(xs, lows, highs, color="#1f6fb4", alpha=0.2, label="99% interval")
        ax.legend()
    ax.set_xlabel("nm")
    ax.set_ylabel(f"log_{q} tail probability" if logq else "tail probability")
    return {"points": pts, "interval_low": lows, "interval_high": highs}


def _render_tail_vs_bound(runs: list[LoadedRun], ax) -> dict:
    points, bound = [], []
    for run in sorted(runs, key=lambda r: r.rows[0]["m"]):
        s = _pick_summary(run)
        x = run.rows[0]["m"]
        points.append((x, s["estimate"]))
        if s.get("bound") is None:
            raise SchemaError(f"{run.path}: sidecar summary has no bound value")
        bound.append((x, s["bound"]))
    ax.plot([p[0] for p in points], [p[1] for p in points], "o", color="#b44", label="empirical tail")
    ax.plot([b[0] for b in bound], [b[1] for b in bound], "-", color="#333", label="bound")
    ax.set_yscale("log")
    ax.set_xlabel("m")
    ax.set_ylabel("tail probability")
    ax.legend()
    return {"points": points, "bound": bound}


def _render_histogram(runs: list[LoadedRun], ax) -> dict:
    counts: dict[int, int] = {}
    for run in runs:
        for row in run.rows:
            counts[row["outcome"]] = counts.get(row["outcome"], 0) + 1
    xs = sorted(counts)
    ax.bar(xs, [counts[x] for x in xs], color="#1f6fb4", label="max list size per trial")
    mean = None
    s = _pick_summary(runs[0])
    if s.get("bound") is not None:
        mean = s["bound"]
        ax.axvline(mean, color="#b44", linestyle="--", label="analytic mean count")
    ax.set_xlabel("list size")
    ax.set_ylabel("trials")
    ax.legend()
    return {"histogram": counts, "analytic_mean": mean}


def render(job: PlotJob) -> dict:
    """Render the job to its output path; returns the plotted data."""
    runs = [load_run(p) for p in job.inputs]
    ids = {r.experiment for r in runs if r.experiment is not None}
    if len(ids) > 1:
        raise SchemaError(f"inputs mix experiment ids: {sorted(ids)}")
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        if not ids:
            ax.set_title("no trial rows")
            data = {"points": []}
        else:
            experiment = ids.pop()
            runs = [r for r in runs if r.experiment == experiment]
            ax.set_title(experiment)
            if experiment in _DECAY_IDS:
                data = _render_decay(runs, ax, job.logq)
            elif experiment == "claim42":
                data = _render_tail_vs_bound(runs, ax)
            elif experiment in _HIST_IDS:
                data = _render_histogram(runs, ax)
            else:
                raise SchemaError(f"unknown experiment id {experiment!r}")
            data["experiment"] = experiment
        fig.tight_layout()
        metadata = {"Date": None} if job.fmt == "svg" else None
        fig.savefig(job.out, format=job.fmt, metadata=metadata)
    finally:
        plt.close(fig)
    return data
