"""Seeded Monte Carlo and exact-enumeration experiments.

Six experiment ids, each a probabilistic statement checked at desk scale:

  lemma41      sum of two ball-uniform matrices landing in a shifted ball
  claim42      intersection dimension tail of two uniform subspaces against
               the explicit bound 64 * q^(a(1-a) d2^2 - a d2 (m - d1))
  lemma43      how many coefficient combinations of ell ball-uniform
               matrices land back in the ball
  theorem31    codeword counts in balls around random centers for uniform
               random linear codes near capacity
  randcode_a1  the same expectation for Bernoulli random codes below
               capacity
  randcode_a2  Bernoulli random codes in the large-radius regime

Trials are reproducible from (config, trial index) alone, so they can be
chunked across worker processes and reduced order-independently; outputs are
byte-identical for identical (config, master_seed) no matter the thread
count.  Where a small exact enumeration oracle exists it is computed
alongside the Monte Carlo estimate.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field, fields as dc_fields
from fractions import Fraction
from itertools import product
from pathlib import Path

from .codes import DecodingParams
from .counting import BallSpec, ball_volume
from .errors import GuardError
from .gf import Field, field_from_order
from .matgf import (
    MatrixF,
    _rank_gf2,
    enumerate_low_rank,
    enumerate_matrices,
    enumerate_subspaces,
    mat_rank,
    rank_of_rows,
    subspace_intersect_dim,
)
from .sampling import (
    BernoulliQPower,
    SeedSpec,
    sample_ball_uniform,
    sample_random_linear_code,
    sample_uniform_matrix,
    sample_uniform_rank_matrix,
    sample_uniform_subspace,
)

EXPERIMENT_IDS = ("lemma41", "claim42", "lemma43", "theorem31", "randcode_a1", "randcode_a2")

CSV_HEADER = ("experiment", "trial", "q", "m", "n", "param_json", "outcome", "count")

# normal quantile at 0.995: two-sided 99% coverage
Z99 = 2.5758293035489004

SPAN_ENUM_LIMIT = 1 << 20
WORD_ENUM_LIMIT = 1 << 22
CENTER_ENUM_LIMIT = 1 << 20


def wilson_interval(successes: int, trials: int, z: float = Z99) -> tuple[float, float]:
    """Score interval for a binomial proportion; well behaved near 0."""
    if trials == 0:
        return 0.0, 1.0
    phat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def fraction_le_scaled_power(x: Fraction, coeff: int, q: int, expo: Fraction) -> bool:
    """Exact test of x <= coeff * q**expo by cross-multiplication."""
    x = Fraction(x)
    expo = Fraction(expo)
    u, v = expo.numerator, expo.denominator
    if u >= 0:
        return x.numerator**v <= coeff**v * q**u * x.denominator**v
    return x.numerator**v * q ** (-u) <= coeff**v * x.denominator**v


def _fstr(f: Fraction) -> str:
    return str(Fraction(f))


# --- configuration ---


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    q: int
    m: int
    n: int
    trials: int
    master_seed: int
    rho: Fraction | None = None
    epsilon: Fraction | None = None
    alpha: Fraction | None = None
    delta: Fraction | None = None
    s1: int | None = None
    s2: int | None = None
    d1: int | None = None
    d2: int | None = None
    ell: int | None = None
    c: int | None = None
    span_factor: int | None = None
    list_bound: int | None = None
    dim_k: int | None = None
    centers: int | None = None
    center_mode: str | None = None
    center: str | None = None
    out: str | None = None

    def __post_init__(self):
        for name in ("rho", "epsilon", "alpha", "delta"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, Fraction(v))
        validate = _VALIDATORS.get(self.experiment)
        if validate is None:
            raise ValueError(
                f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENT_IDS}"
            )
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        field_from_order(self.q)  # reject non prime powers early
        if self.n < 1 or self.m < self.n:
            raise ValueError(f"need m >= n >= 1, got m={self.m}, n={self.n}")
        if self.trials < 0:
            raise ValueError("trials must be non-negative")
        validate(self)

    def to_json_dict(self) -> dict:
        out = {}
        for f in dc_fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            out[f.name] = _fstr(v) if isinstance(v, Fraction) else v
        return out

    @classmethod
    def from_json_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in dc_fields(cls)}
        bad = set(d) - known
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        return cls(**d)


def _need(cfg: ExperimentConfig, *names: str) -> None:
    for name in names:
        if getattr(cfg, name) is None:
            raise ValueError(f"experiment {cfg.experiment} requires {name!r}")


def _validate_lemma41(cfg: ExperimentConfig) -> None:
    _need(cfg, "rho")
    spec = BallSpec(cfg.q, cfg.m, cfg.n, cfg.rho)
    if cfg.center not in (None, "zero", "random", "both"):
        raise ValueError(f"center must be zero|random|both, got {cfg.center!r}")
    if (cfg.s1 is None) != (cfg.s2 is None):
        raise ValueError("s1 and s2 must be given together")
    if cfg.s1 is not None:
        for s in (cfg.s1, cfg.s2):
            if not (0 <= s <= spec.r_max):
                raise ValueError(f"conditioned rank {s} outside [0, {spec.r_max}]")


def _validate_claim42(cfg: ExperimentConfig) -> None:
    _need(cfg, "d1", "d2")
    if not (0 <= cfg.d2 <= cfg.d1 <= cfg.m):
        raise ValueError(f"need 0 <= d2 <= d1 <= m, got d1={cfg.d1}, d2={cfg.d2}, m={cfg.m}")
    alpha = _claim42_alpha(cfg)
    if not (0 < alpha < 1):
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _claim42_alpha(cfg: ExperimentConfig) -> Fraction:
    """Configured alpha, or the default derived from epsilon: with
    delta = epsilon unless overridden, alpha = eps^2 / (eps + delta - delta*eps)."""
    if cfg.alpha is not None:
        return cfg.alpha
    if cfg.epsilon is None:
        raise ValueError("claim42 requires alpha, or epsilon to derive it")
    eps = cfg.epsilon
    delta = cfg.delta if cfg.delta is not None else eps
    return eps * eps / (eps + delta - delta * eps)


def _validate_lemma43(cfg: ExperimentConfig) -> None:
    _need(cfg, "rho", "ell", "span_factor")
    BallSpec(cfg.q, cfg.m, cfg.n, cfg.rho)
    if cfg.ell < 1 or cfg.span_factor < 1:
        raise ValueError("ell and span_factor must be >= 1")
    if cfg.q**cfg.ell > SPAN_ENUM_LIMIT:
        raise GuardError(f"q^ell = {cfg.q ** cfg.ell} exceeds {SPAN_ENUM_LIMIT}")


def _validate_theorem31(cfg: ExperimentConfig) -> None:
    _need(cfg, "rho")
    if cfg.dim_k is None and cfg.epsilon is None:
        raise ValueError("theorem31 requires epsilon (or an explicit dim_k)")
    k = _theorem31_dim(cfg)
    if not (0 <= k <= cfg.m * cfg.n):
        raise ValueError(f"code dimension {k} outside [0, {cfg.m * cfg.n}]")
    if cfg.q**k > WORD_ENUM_LIMIT:
        raise GuardError(f"q^k = {cfg.q ** k} exceeds {WORD_ENUM_LIMIT}")
    _resolve_centers(cfg)


def _theorem31_dim(cfg: ExperimentConfig) -> int:
    if cfg.dim_k is not None:
        return cfg.dim_k
    return DecodingParams(cfg.m, cfg.n, cfg.rho, cfg.epsilon).dimension()


def _resolve_centers(cfg: ExperimentConfig) -> tuple[str, int]:
    universe = cfg.q ** (cfg.m * cfg.n)
    mode = cfg.center_mode
    if mode is None:
        mode = "exhaustive" if (cfg.centers is None and universe <= CENTER_ENUM_LIMIT) else "sampled"
    if mode == "exhaustive":
        if universe > CENTER_ENUM_LIMIT:
            raise GuardError(f"{universe} centers exceed {CENTER_ENUM_LIMIT}")
        return mode, universe
    if mode != "sampled":
        raise ValueError(f"center_mode must be sampled|exhaustive, got {mode!r}")
    if cfg.centers is None or cfg.centers < 1:
        raise ValueError("sampled center mode requires centers >= 1")
    return mode, cfg.centers


def _validate_randcode(cfg: ExperimentConfig) -> None:
    if cfg.experiment == "randcode_a1":
        _need(cfg, "rho", "epsilon")
    else:
        _need(cfg, "epsilon")
        if not (0 < cfg.epsilon <= 1):
            raise ValueError("randcode_a2 requires epsilon in (0, 1]")
    universe = cfg.q ** (cfg.m * cfg.n)
    if universe > WORD_ENUM_LIMIT:
        raise GuardError(f"universe {universe} exceeds {WORD_ENUM_LIMIT}")
    rho, rate, _ = _randcode_params(cfg)
    if not (0 <= rho <= 1):
        raise ValueError(f"decoding radius {rho} outside [0, 1]")
    if not (0 < rate < 1):
        raise ValueError(f"rate {rate} outside (0, 1)")
    _resolve_centers(cfg)


def _randcode_params(cfg: ExperimentConfig) -> tuple[Fraction, Fraction, int | None]:
    """(rho, rate, list bound) for the two Bernoulli-code variants."""
    b = Fraction(cfg.n, cfg.m)
    if cfg.experiment == "randcode_a1":
        rho = cfg.rho
        rate = (1 - rho) * (1 - b * rho) - cfg.epsilon
        return rho, rate, cfg.list_bound
    eps = cfg.epsilon
    rho = 1 - eps
    denom = eps - eps * b + eps * eps * b
    rate = denom / 2
    bound = cfg.list_bound if cfg.list_bound is not None else math.ceil(Fraction(4) / denom) - 1
    return rho, rate, bound


_VALIDATORS = {
    "lemma41": _validate_lemma41,
    "claim42": _validate_claim42,
    "lemma43": _validate_lemma43,
    "theorem31": _validate_theorem31,
    "randcode_a1": _validate_randcode,
    "randcode_a2": _validate_randcode,
}


# --- results ---


@dataclass(frozen=True)
class TrialRecord:
    experiment: str
    trial: int
    q: int
    m: int
    n: int
    params: dict
    outcome: int
    count: int


@dataclass(frozen=True)
class SummaryStats:
    label: str
    trials: int
    successes: int
    estimate: float
    interval_low: float
    interval_high: float
    bound: float | None
    verdict: str
    extras: dict = dc_field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "label": self.label,
            "trials": self.trials,
            "successes": self.successes,
            "estimate": self.estimate,
            "interval_low": self.interval_low,
            "interval_high": self.interval_high,
            "bound": self.bound,
            "verdict": self.verdict,
            "extras": self.extras,
        }


@dataclass(frozen=True)
class ExperimentResult:
    config: ExperimentConfig
    records: tuple[TrialRecord, ...]
    summaries: tuple[SummaryStats, ...]


def _proportion_summary(label, successes, trials, bound, verdict, extras) -> SummaryStats:
    lo, hi = wilson_interval(successes, trials)
    est = successes / trials if trials else 0.0
    return SummaryStats(label, trials, successes, est, lo, hi, bound, verdict, extras)


def _log_q_over(p: float, q: int, nm: int) -> float | None:
    if p <= 0.0:
        return None
    return math.log(p) / math.log(q) / nm


# --- lemma41 ---


class _Lemma41Ctx:
    def __init__(self, cfg: ExperimentConfig):
        self.field = field_from_order(cfg.q)
        self.spec = BallSpec(cfg.q, cfg.m, cfg.n, cfg.rho)
        self.r_max = self.spec.r_max
        mode = cfg.center if cfg.center is not None else "both"
        labels = ["zero", "random"] if mode == "both" else [mode]
        self.passes: list[tuple[str, MatrixF]] = []
        for label in labels:
            if label == "zero":
                y = MatrixF.zeros(self.field, cfg.m, cfg.n)
            else:
                # one fixed random center, drawn from the stream index just
                # past the trial range so it never collides with a trial
                rng = SeedSpec(cfg.master_seed).rng_for_trial(len(labels) * cfg.trials)
                y = sample_uniform_matrix(self.field, cfg.m, cfg.n, rng)
            self.passes.append((label, y))


def _trial_lemma41(cfg: ExperimentConfig, ctx: _Lemma41Ctx, idx: int) -> TrialRecord:
    rng = SeedSpec(cfg.master_seed).rng_for_trial(idx)
    label, y = ctx.passes[idx // cfg.trials]
    if cfg.s1 is not None:
        x1 = sample_uniform_rank_matrix(ctx.field, cfg.m, cfg.n, cfg.s1, rng)
        x2 = sample_uniform_rank_matrix(ctx.field, cfg.m, cfg.n, cfg.s2, rng)
    else:
        x1 = sample_ball_uniform(ctx.spec, rng)
        x2 = sample_ball_uniform(ctx.spec, rng)
    d = mat_rank((x1 + x2) - y)
    params = {"center": label, "rho": _fstr(cfg.rho)}
    if cfg.s1 is not None:
        params["s1"] = cfg.s1
        params["s2"] = cfg.s2
    return TrialRecord(cfg.experiment, idx, cfg.q, cfg.m, cfg.n, params, int(d <= ctx.r_max), d)


def _summarize_lemma41(cfg: ExperimentConfig, ctx: _Lemma41Ctx, records) -> list[SummaryStats]:
    out = []
    vol = ball_volume(ctx.spec)
    for p, (label, y) in enumerate(ctx.passes):
        recs = records[p * cfg.trials : (p + 1) * cfg.trials]
        succ = sum(r.outcome for r in recs)
        extras = {
            "center": label,
            "rho": _fstr(cfg.rho),
            "r_max": ctx.r_max,
            "nm": cfg.n * cfg.m,
            "degenerate_ball": ctx.spec.is_degenerate,
            "log_q_phat_over_nm": _log_q_over(succ / len(recs) if recs else 0.0, cfg.q, cfg.n * cfg.m),
        }
        if cfg.s1 is None and vol <= 128:
            exact = lemma41_exact_probability(cfg.q, cfg.m, cfg.n, cfg.rho, center=y)
            extras["exact_probability"] = _fstr(exact)
        out.append(_proportion_summary(f"center={label}", succ, len(recs), None, "info", extras))
    return out


# --- claim42 ---


class _Claim42Ctx:
    def __init__(self, cfg: ExperimentConfig):
        self.field = field_from_order(cfg.q)
        self.alpha = _claim42_alpha(cfg)
        self.threshold = self.alpha * cfg.d2
        self.bound_expo = self.alpha * (1 - self.alpha) * cfg.d2 * cfg.d2 - self.alpha * cfg.d2 * (
            cfg.m - cfg.d1
        )


def _subspace_rows_gf2(m: int, s: int, rng) -> list[int]:
    """Row vectors (packed, m bits) spanning a uniform s-dim subspace of
    F_2^m.  Bit-for-bit the same stream consumption and accept/reject
    decisions as `sample_uniform_subspace`, so results are interchangeable;
    the rows are simply left uncanonicalized because only ranks are needed.
    """
    if s == 0:
        return []
    while True:
        bits = rng.randbits(m * s)
        mat_rows = [(bits >> (i * s)) & ((1 << s) - 1) for i in range(m)]
        if _rank_gf2(list(mat_rows)) == s:
            return [
                sum(((bits >> (i * s + j)) & 1) << i for i in range(m))
                for j in range(s)
            ]


def _trial_claim42(cfg: ExperimentConfig, ctx: _Claim42Ctx, idx: int) -> TrialRecord:
    rng = SeedSpec(cfg.master_seed).rng_for_trial(idx)
    if cfg.q == 2:
        u_rows = _subspace_rows_gf2(cfg.m, cfg.d1, rng)
        v_rows = _subspace_rows_gf2(cfg.m, cfg.d2, rng)
        t = cfg.d1 + cfg.d2 - _rank_gf2(u_rows + v_rows)
    else:
        u = sample_uniform_subspace(ctx.field, cfg.m, cfg.d1, rng)
        v = sample_uniform_subspace(ctx.field, cfg.m, cfg.d2, rng)
        t = subspace_intersect_dim(u, v)
    params = {"alpha": _fstr(ctx.alpha), "d1": cfg.d1, "d2": cfg.d2}
    return TrialRecord(cfg.experiment, idx, cfg.q, cfg.m, cfg.n, params, int(t > ctx.threshold), t)


def _summarize_claim42(cfg: ExperimentConfig, ctx: _Claim42Ctx, records) -> list[SummaryStats]:
    succ = sum(r.outcome for r in records)
    trials = len(records)
    bound = 64.0 * math.pow(cfg.q, float(ctx.bound_expo))
    if trials:
        ok = fraction_le_scaled_power(Fraction(succ, trials), 64, cfg.q, ctx.bound_expo)
        verdict = "pass" if ok else "fail"
    else:
        verdict = "info"
    extras = {
        "alpha": _fstr(ctx.alpha),
        "d1": cfg.d1,
        "d2": cfg.d2,
        "bound_exponent": _fstr(ctx.bound_expo),
    }
    if cfg.q == 2 and cfg.m <= 4:
        extras["exact_tail"] = _fstr(claim42_exact_tail(cfg.q, cfg.m, cfg.d1, cfg.d2, ctx.alpha))
    return [_proportion_summary("tail", succ, trials, bound, verdict, extras)]


# --- lemma43 ---


class _Lemma43Ctx:
    def __init__(self, cfg: ExperimentConfig):
        self.field = field_from_order(cfg.q)
        self.spec = BallSpec(cfg.q, cfg.m, cfg.n, cfg.rho)
        self.r_max = self.spec.r_max
        self.threshold = cfg.span_factor * cfg.ell


def _count_span_hits(field: Field, m: int, n: int, xs: list[MatrixF], r_max: int) -> int:
    """Number of coefficient vectors u (all q^ell of them, zero included)
    with sum_i u_i X_i of rank <= r_max.  Coincident combinations count with
    multiplicity."""
    q = field.q
    ell = len(xs)
    if q == 2:
        packed = []
        for x in xs:
            rows = []
            for i in range(m):
                acc = 0
                row = x.row(i)
                for j in range(n):
                    if row[j]:
                        acc |= 1 << j
                rows.append(acc)
            packed.append(rows)
        cur = [0] * m
        digits = [0] * ell
        hits = 0
        while True:
            work = [r for r in cur if r]
            if _rank_gf2(work) <= r_max:
                hits += 1
            i = 0
            while i < ell:
                digits[i] ^= 1
                rows = packed[i]
                for rr in range(m):
                    cur[rr] ^= rows[rr]
                if digits[i]:
                    break
                i += 1
            else:
                return hits
    add = field.add
    cur = [0] * (m * n)
    digits = [0] * ell
    hits = 0
    while True:
        rows = [cur[i * n : (i + 1) * n] for i in range(m)]
        if rank_of_rows(field, rows) <= r_max:
            hits += 1
        i = 0
        while i < ell:
            digits[i] += 1
            ent = xs[i].entries
            for j in range(m * n):
                if ent[j]:
                    cur[j] = add(cur[j], ent[j])
            if digits[i] < q:
                break
            digits[i] = 0
            i += 1
        else:
            return hits


def _trial_lemma43(cfg: ExperimentConfig, ctx: _Lemma43Ctx, idx: int) -> TrialRecord:
    rng = SeedSpec(cfg.master_seed).rng_for_trial(idx)
    xs = [sample_ball_uniform(ctx.spec, rng) for _ in range(cfg.ell)]
    hits = _count_span_hits(ctx.field, cfg.m, cfg.n, xs, ctx.r_max)
    params = {"rho": _fstr(cfg.rho), "ell": cfg.ell, "span_factor": cfg.span_factor}
    return TrialRecord(
        cfg.experiment, idx, cfg.q, cfg.m, cfg.n, params, int(hits >= ctx.threshold), hits
    )


def _summarize_lemma43(cfg: ExperimentConfig, ctx: _Lemma43Ctx, records) -> list[SummaryStats]:
    succ = sum(r.outcome for r in records)
    trials = len(records)
    hist: dict[str, int] = {}
    for r in records:
        hist[str(r.count)] = hist.get(str(r.count), 0) + 1
    extras = {
        "rho": _fstr(cfg.rho),
        "ell": cfg.ell,
        "span_factor": cfg.span_factor,
        "threshold": ctx.threshold,
        "nm": cfg.n * cfg.m,
        "histogram": dict(sorted(hist.items(), key=lambda kv: int(kv[0]))),
        "log_q_phat_over_nm": _log_q_over(succ / trials if trials else 0.0, cfg.q, cfg.n * cfg.m),
    }
    vol = ball_volume(ctx.spec)
    if vol**cfg.ell <= 20000:
        dist = lemma43_exact_distribution(cfg.q, cfg.m, cfg.n, cfg.rho, cfg.ell)
        extras["exact_distribution"] = {str(k): _fstr(v) for k, v in sorted(dist.items())}
    return [_proportion_summary("span_tail", succ, trials, None, "info", extras)]


# --- theorem31 ---


class _Theorem31Ctx:
    def __init__(self, cfg: ExperimentConfig):
        self.field = field_from_order(cfg.q)
        self.mn = cfg.m * cfg.n
        self.k = _theorem31_dim(cfg)
        self.spec = BallSpec(cfg.q, cfg.m, cfg.n, cfg.rho)
        self.r_max = self.spec.r_max
        self.mode, self.centers = _resolve_centers(cfg)
        ball = enumerate_low_rank(self.field, cfg.m, cfg.n, self.r_max)
        if self.field.q == 2:
            self.ball_enc = [x.encode() for x in ball]
            self.ball_set = set(self.ball_enc)
        else:
            self.ball_tuples = [x.entries for x in ball]
            self.ball_set = set(self.ball_tuples)
        self.volume = len(ball)


def _sample_code_words_gf2(rng, k: int, mn: int) -> list[int]:
    if k == 0:
        return [0]
    while True:
        rows = [rng.randbits(mn) for _ in range(k)]
        if _rank_gf2(rows) == k:
            break
    words = [0] * (1 << k)
    for i in range(1, 1 << k):
        words[i] = words[i - 1] ^ rows[(i & -i).bit_length() - 1]
    return words


def _trial_theorem31(cfg: ExperimentConfig, ctx: _Theorem31Ctx, idx: int) -> TrialRecord:
    rng = SeedSpec(cfg.master_seed).rng_for_trial(idx)
    field = ctx.field
    total = 0
    sumsq = 0
    best = 0
    if field.q == 2:
        words = _sample_code_words_gf2(rng, ctx.k, ctx.mn)
        word_set = set(words)
        ball, ball_set = ctx.ball_enc, ctx.ball_set
        word_side = len(words) <= len(ball)
        if ctx.mode == "exhaustive":
            ys = range(1 << ctx.mn)
        else:
            ys = (rng.randbits(ctx.mn) for _ in range(ctx.centers))
        for y in ys:
            if word_side:
                cnt = sum(1 for w in words if (w ^ y) in ball_set)
            else:
                cnt = sum(1 for z in ball if (z ^ y) in word_set)
            total += cnt
            sumsq += cnt * cnt
            if cnt > best:
                best = cnt
    else:
        space = sample_random_linear_code(field, cfg.m, cfg.n, ctx.k, rng)
        words = _span_tuples(field, space.rows, ctx.mn)
        word_set = set(words)
        sub = field.sub
        if ctx.mode == "exhaustive":
            ys = (x.entries for x in _all_matrices(field, cfg.m, cfg.n))
        else:
            ys = (
                tuple(rng.randbelow(field.q) for _ in range(ctx.mn))
                for _ in range(ctx.centers)
            )
        for y in ys:
            if len(words) <= len(ctx.ball_tuples):
                cnt = sum(
                    1
                    for w in words
                    if tuple(sub(a, b) for a, b in zip(w, y)) in ctx.ball_set
                )
            else:
                add = field.add
                cnt = sum(
                    1
                    for z in ctx.ball_tuples
                    if tuple(add(a, b) for a, b in zip(y, z)) in word_set
                )
            total += cnt
            sumsq += cnt * cnt
            if cnt > best:
                best = cnt
    params = {"k": ctx.k, "centers": ctx.centers, "center_mode": ctx.mode, "sum_sq": sumsq}
    return TrialRecord(cfg.experiment, idx, cfg.q, cfg.m, cfg.n, params, best, total)


def _span_tuples(field: Field, basis, mn: int) -> list[tuple[int, ...]]:
    add = field.add
    words = [(0,) * mn]
    for row in basis:
        scaled = []
        for c in range(1, field.q):
            mul = field.mul
            scaled.append(tuple(mul(c, v) for v in row))
        new = list(words)
        for s in scaled:
            for w in words:
                new.append(tuple(add(a, b) for a, b in zip(w, s)))
        words = new
    return words


def _all_matrices(field: Field, m: int, n: int):
    return enumerate_matrices(field, m, n)


def _mean_summary(label, counts, sumsq_total, draws, analytic: Fraction, extras) -> SummaryStats:
    if draws == 0:
        return SummaryStats(label, 0, 0, 0.0, 0.0, 0.0, float(analytic), "info", extras)
    total = sum(counts)
    mean = total / draws
    var = max(0.0, sumsq_total / draws - mean * mean)
    sigma = math.sqrt(var / draws)
    lo, hi = mean - 3.0 * sigma, mean + 3.0 * sigma
    ok = lo <= float(analytic) <= hi
    extras = dict(extras)
    extras["sigma_mean"] = sigma
    extras["analytic_mean"] = _fstr(analytic)
    nonzero = sum(1 for c in counts if c)
    return SummaryStats(
        label, draws, nonzero, mean, lo, hi, float(analytic), "pass" if ok else "fail", extras
    )


def _summarize_theorem31(cfg: ExperimentConfig, ctx: _Theorem31Ctx, records) -> list[SummaryStats]:
    draws = len(records) * ctx.centers
    analytic = Fraction(ctx.volume * cfg.q**ctx.k, cfg.q**ctx.mn)
    extras = {
        "k": ctx.k,
        "centers": ctx.centers,
        "center_mode": ctx.mode,
        "ball_volume": ctx.volume,
        "rate_actual": _fstr(Fraction(ctx.k, ctx.mn)),
        "max_list_size": max((r.outcome for r in records), default=0),
    }
    if cfg.epsilon is not None:
        params = DecodingParams(cfg.m, cfg.n, cfg.rho, cfg.epsilon)
        extras["rate_target"] = _fstr(params.rate)
        extras["capacity"] = _fstr(params.capacity)
    mean = _mean_summary(
        "mean_count",
        [r.count for r in records],
        sum(r.params["sum_sq"] for r in records),
        draws,
        analytic,
        extras,
    )
    maxima: dict[str, int] = {}
    for r in records:
        maxima[str(r.outcome)] = maxima.get(str(r.outcome), 0) + 1
    succ = (
        sum(1 for r in records if r.outcome <= cfg.list_bound)
        if cfg.list_bound is not None
        else 0
    )
    top = _proportion_summary(
        "max_list",
        succ,
        len(records),
        None,
        "info",
        {
            "list_bound": cfg.list_bound,
            "histogram": dict(sorted(maxima.items(), key=lambda kv: int(kv[0]))),
        },
    )
    return [mean, top]


# --- randcode (Bernoulli codes) ---


class _RandcodeCtx:
    def __init__(self, cfg: ExperimentConfig):
        self.field = field_from_order(cfg.q)
        self.mn = cfg.m * cfg.n
        self.rho, self.rate, self.list_bound = _randcode_params(cfg)
        self.spec = BallSpec(cfg.q, cfg.m, cfg.n, self.rho)
        self.r_max = self.spec.r_max
        self.mode, self.centers = _resolve_centers(cfg)
        self.exponent = (1 - self.rate) * self.mn
        self.sampler = BernoulliQPower(cfg.q, self.exponent)
        ball = enumerate_low_rank(self.field, cfg.m, cfg.n, self.r_max)
        if self.field.q == 2:
            self.ball_set = set(x.encode() for x in ball)
        else:
            self.ball_set = set(x.entries for x in ball)
        self.volume = len(ball)


def _trial_randcode(cfg: ExperimentConfig, ctx: _RandcodeCtx, idx: int) -> TrialRecord:
    rng = SeedSpec(cfg.master_seed).rng_for_trial(idx)
    field = ctx.field
    q = field.q
    universe = q**ctx.mn
    sampler = ctx.sampler
    total = 0
    best = 0
    if q == 2:
        words = [enc for enc in range(universe) if sampler.sample(rng)]
        if ctx.mode == "exhaustive":
            ys = range(universe)
        else:
            ys = (rng.randbits(ctx.mn) for _ in range(ctx.centers))
        for y in ys:
            cnt = sum(1 for w in words if (w ^ y) in ctx.ball_set)
            total += cnt
            if cnt > best:
                best = cnt
    else:
        words = []
        for enc in range(universe):
            if sampler.sample(rng):
                words.append(MatrixF.decode(field, cfg.m, cfg.n, enc).entries)
        sub = field.sub
        if ctx.mode == "exhaustive":
            ys = (x.entries for x in _all_matrices(field, cfg.m, cfg.n))
        else:
            ys = (
                tuple(rng.randbelow(q) for _ in range(ctx.mn)) for _ in range(ctx.centers)
            )
        for y in ys:
            cnt = sum(
                1 for w in words if tuple(sub(a, b) for a, b in zip(w, y)) in ctx.ball_set
            )
            total += cnt
            if cnt > best:
                best = cnt
    params = {"code_size": len(words), "centers": ctx.centers, "center_mode": ctx.mode}
    return TrialRecord(cfg.experiment, idx, cfg.q, cfg.m, cfg.n, params, best, total)


def _summarize_randcode(cfg: ExperimentConfig, ctx: _RandcodeCtx, records) -> list[SummaryStats]:
    trials = len(records)
    p_float = math.pow(cfg.q, -float(ctx.exponent))
    analytic_float = ctx.volume * p_float
    extras = {
        "rho": _fstr(ctx.rho),
        "rate": _fstr(ctx.rate),
        "inclusion_exponent": _fstr(ctx.exponent),
        "ball_volume": ctx.volume,
        "centers": ctx.centers,
        "center_mode": ctx.mode,
        "expected_code_size": cfg.q**ctx.mn * p_float,
        "mean_code_size": (
            sum(r.params["code_size"] for r in records) / trials if trials else 0.0
        ),
        "max_list_size": max((r.outcome for r in records), default=0),
    }
    if trials == 0:
        mean_summary = SummaryStats(
            "mean_count", 0, 0, 0.0, 0.0, 0.0, analytic_float, "info", extras
        )
    else:
        means = [r.count / ctx.centers for r in records]
        grand = sum(means) / trials
        var = sum((x - grand) ** 2 for x in means) / trials
        sigma = math.sqrt(var / trials)
        lo, hi = grand - 3.0 * sigma, grand + 3.0 * sigma
        extras = dict(extras)
        extras["sigma_mean"] = sigma
        verdict = "pass" if lo <= analytic_float <= hi else "fail"
        mean_summary = SummaryStats(
            "mean_count",
            trials,
            sum(1 for r in records if r.count),
            grand,
            lo,
            hi,
            analytic_float,
            verdict,
            extras,
        )
    maxima: dict[str, int] = {}
    for r in records:
        maxima[str(r.outcome)] = maxima.get(str(r.outcome), 0) + 1
    succ = (
        sum(1 for r in records if r.outcome <= ctx.list_bound)
        if ctx.list_bound is not None
        else 0
    )
    top = _proportion_summary(
        "max_list",
        succ,
        trials,
        None,
        "info",
        {
            "list_bound": ctx.list_bound,
            "histogram": dict(sorted(maxima.items(), key=lambda kv: int(kv[0]))),
        },
    )
    return [mean_summary, top]


# --- dispatch and parallel execution ---

_CTX = {
    "lemma41": _Lemma41Ctx,
    "claim42": _Claim42Ctx,
    "lemma43": _Lemma43Ctx,
    "theorem31": _Theorem31Ctx,
    "randcode_a1": _RandcodeCtx,
    "randcode_a2": _RandcodeCtx,
}

_TRIAL = {
    "lemma41": _trial_lemma41,
    "claim42": _trial_claim42,
    "lemma43": _trial_lemma43,
    "theorem31": _trial_theorem31,
    "randcode_a1": _trial_randcode,
    "randcode_a2": _trial_randcode,
}

_SUMMARIZE = {
    "lemma41": _summarize_lemma41,
    "claim42": _summarize_claim42,
    "lemma43": _summarize_lemma43,
    "theorem31": _summarize_theorem31,
    "randcode_a1": _summarize_randcode,
    "randcode_a2": _summarize_randcode,
}


def _total_trials(cfg: ExperimentConfig) -> int:
    if cfg.experiment == "lemma41":
        mode = cfg.center if cfg.center is not None else "both"
        return (2 if mode == "both" else 1) * cfg.trials
    return cfg.trials


def _run_chunk(args: tuple[ExperimentConfig, int, int]) -> list[TrialRecord]:
    cfg, start, stop = args
    ctx = _CTX[cfg.experiment](cfg)
    trial = _TRIAL[cfg.experiment]
    return [trial(cfg, ctx, i) for i in range(start, stop)]


def resolve_threads(threads: int | None) -> int:
    """Explicit value, else RANKDEC_THREADS, else the available cores."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("RANKDEC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Run all trials of one experiment and summarize.

    Results are identical for identical (config, master_seed) regardless of
    `threads`; trials derive independent streams and the reduce is
    order-independent.
    """
    threads = max(1, int(threads))
    total = _total_trials(config)
    ctx = _CTX[config.experiment](config)
    trial = _TRIAL[config.experiment]
    if threads == 1 or total < 64:
        records = [trial(config, ctx, i) for i in range(total)]
    else:
        nchunks = min(total, threads * 4)
        step = (total + nchunks - 1) // nchunks
        jobs = [(config, s, min(s + step, total)) for s in range(0, total, step)]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, jobs))
        records = [rec for part in parts for rec in part]
        records.sort(key=lambda r: r.trial)
    summaries = _SUMMARIZE[config.experiment](config, ctx, records)
    return ExperimentResult(config, tuple(records), tuple(summaries))


def run_lemma41(config, threads=1):
    return _run_checked(config, "lemma41", threads)


def run_claim42(config, threads=1):
    return _run_checked(config, "claim42", threads)


def run_lemma43(config, threads=1):
    return _run_checked(config, "lemma43", threads)


def run_theorem31(config, threads=1):
    return _run_checked(config, "theorem31", threads)


def run_randcode(config, variant: str | None = None, threads=1):
    if variant is not None and config.experiment != f"randcode_{variant}":
        raise ValueError(f"config is for {config.experiment}, not randcode_{variant}")
    if config.experiment not in ("randcode_a1", "randcode_a2"):
        raise ValueError(f"not a randcode config: {config.experiment}")
    return run_experiment(config, threads)


def _run_checked(config, experiment, threads):
    if config.experiment != experiment:
        raise ValueError(f"config is for {config.experiment}, not {experiment}")
    return run_experiment(config, threads)


# --- output files ---


def results_csv_text(result: ExperimentResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in result.records:
        w.writerow(
            [
                r.experiment,
                r.trial,
                r.q,
                r.m,
                r.n,
                json.dumps(r.params, sort_keys=True, separators=(",", ":")),
                r.outcome,
                r.count,
            ]
        )
    return buf.getvalue()


def summary_json_text(result: ExperimentResult) -> str:
    doc = {
        "config": result.config.to_json_dict(),
        "summaries": [s.to_json_dict() for s in result.summaries],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def summary_path_for(path) -> Path:
    p = Path(path)
    name = p.name[:-4] if p.name.endswith(".csv") else p.name
    return p.with_name(name + ".summary.json")


def write_results(result: ExperimentResult, path) -> tuple[Path, Path]:
    """CSV of trial records plus a JSON summary sidecar; byte-identical for
    identical (config, master_seed)."""
    csv_path = Path(path)
    json_path = summary_path_for(csv_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(results_csv_text(result), encoding="utf-8")
    json_path.write_text(summary_json_text(result), encoding="utf-8")
    return csv_path, json_path


# --- exact enumeration oracles ---


def lemma41_exact_probability(q, m, n, rho, center: MatrixF | None = None, limit: int = 512) -> Fraction:
    """Exhaustive pair probability that the sum of two ball elements lands in
    the (possibly shifted) ball."""
    field = field_from_order(q)
    spec = BallSpec(q, m, n, Fraction(rho))
    ball = enumerate_low_rank(field, m, n, spec.r_max, limit)
    y = center if center is not None else MatrixF.zeros(field, m, n)
    hits = 0
    for a in ball:
        ay = a - y
        for b in ball:
            if mat_rank(ay + b) <= spec.r_max:
                hits += 1
    return Fraction(hits, len(ball) ** 2)


def claim42_exact_tail(q, m, d1, d2, alpha) -> Fraction:
    """Exact tail P[dim(U ∩ V) > alpha*d2] over all subspace pairs."""
    field = field_from_order(q)
    alpha = Fraction(alpha)
    subs1 = list(enumerate_subspaces(field, m, d1))
    subs2 = subs1 if d1 == d2 else list(enumerate_subspaces(field, m, d2))
    threshold = alpha * d2
    hits = 0
    for u in subs1:
        for v in subs2:
            if subspace_intersect_dim(u, v) > threshold:
                hits += 1
    return Fraction(hits, len(subs1) * len(subs2))


def lemma43_exact_distribution(q, m, n, rho, ell, limit: int = 20000) -> dict[int, Fraction]:
    """Exact distribution of the number of in-ball coefficient combinations
    over all ball^ell draws."""
    field = field_from_order(q)
    spec = BallSpec(q, m, n, Fraction(rho))
    ball = enumerate_low_rank(field, m, n, spec.r_max)
    if len(ball) ** ell > limit:
        raise GuardError(f"{len(ball)}^{ell} tuples exceed the limit {limit}")
    counts: dict[int, int] = {}
    for xs in product(ball, repeat=ell):
        hits = _count_span_hits(field, m, n, list(xs), spec.r_max)
        counts[hits] = counts.get(hits, 0) + 1
    denom = len(ball) ** ell
    return {k: Fraction(v, denom) for k, v in counts.items()}


def intervals_strictly_decreasing(summaries) -> bool:
    """Estimates strictly decreasing with pairwise-disjoint intervals."""
    for a, b in zip(summaries, summaries[1:]):
        if not (a.estimate > b.estimate and a.interval_low > b.interval_high):
            return False
    return True
