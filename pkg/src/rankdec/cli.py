"""Command-line entry point.

Subcommands: count (exact combinatorics), sample (reproducible draws),
chain (translate-chain certificates), check-ld (list-decodability), and
experiment (the Monte Carlo harness).

Rational flags are fractions like 1/2, never decimals, so floor(rho * n) is
unambiguous.  Every run echoes its fully resolved configuration, including
the seed (freshly drawn and printed when omitted), so any run can be
reproduced after the fact.  Exit codes: 0 success, 1 validation or usage
error, 2 enumeration-guard or search-budget failure.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from fractions import Fraction

from .chains import ChainSearchError, VectorQ, chain_guarantee, find_translate_chain
from .codes import code_from_text, is_list_decodable_exact, max_list_size_monte_carlo
from .counting import BallSpec, ball_volume, gaussian_binomial, kq_bounds, rank_count
from .errors import GuardError
from .experiments import (
    ExperimentConfig,
    resolve_threads,
    run_experiment,
    summary_json_text,
    write_results,
)
from .gf import field_from_order
from .matgf import matrix_to_text
from .sampling import (
    SeedSpec,
    sample_ball_uniform,
    sample_random_linear_code,
    sample_uniform_matrix,
    sample_uniform_rank_matrix,
    sample_uniform_subspace,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def parse_fraction(text: str) -> Fraction:
    """Accepts "a/b" or a bare integer; decimals are rejected."""
    text = text.strip()
    try:
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise _UsageError(f"not a fraction a/b: {text!r} ({exc})") from exc


def _fresh_seed() -> int:
    return secrets.randbits(63)


def _echo(obj: dict) -> None:
    print("config " + json.dumps(obj, sort_keys=True, separators=(",", ":")))


def _build_parser() -> _Parser:
    p = _Parser(prog="rankdec", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="exact counting: ball volumes, rank counts, Gaussian binomials")
    c.add_argument("--q", type=int, required=True)
    c.add_argument("--m", type=int)
    c.add_argument("--n", type=int)
    c.add_argument("--rho", type=str, help="ball radius as a fraction a/b")
    c.add_argument("--rank", type=int, help="count matrices of exactly this rank")
    c.add_argument("--grassmann", type=int, nargs=2, metavar=("N", "K"), help="subspace count [N over K]_q")
    c.add_argument("--kq", type=int, metavar="TERMS", help="rigorous enclosure of K_q")

    s = sub.add_parser("sample", help="reproducible uniform draws")
    s.add_argument("--kind", required=True, choices=["matrix", "rank-matrix", "ball", "subspace", "linear-code"])
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--r", type=int, help="rank for rank-matrix")
    s.add_argument("--rho", type=str, help="radius for ball")
    s.add_argument("--s", type=int, help="dimension for subspace")
    s.add_argument("--k", type=int, help="dimension for linear-code")
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--seed", type=int)

    ch = sub.add_parser("chain", help="translate-chain certificate for a vector set")
    ch.add_argument("setfile", help="one vector per line, digits base q")
    ch.add_argument("--q", type=int, required=True)
    ch.add_argument("--c", type=int, required=True)
    ch.add_argument("--mode", choices=["auto", "exhaustive", "randomized"], default="auto")
    ch.add_argument("--budget", type=int, default=4096)
    ch.add_argument("--seed", type=int)

    ld = sub.add_parser("check-ld", help="list-decodability of a code file")
    ld.add_argument("codefile")
    ld.add_argument("--rho", type=str, required=True)
    ld.add_argument("--L", type=int, required=True)
    ld.add_argument("--exhaustive", action="store_true")
    ld.add_argument("--centers", type=int)
    ld.add_argument("--seed", type=int)

    e = sub.add_parser("experiment", help="seeded Monte Carlo experiments")
    e.add_argument("--id", dest="experiment", help="lemma41|claim42|lemma43|theorem31|randcode_a1|randcode_a2")
    e.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override")
    e.add_argument("--q", type=int)
    e.add_argument("--m", type=int)
    e.add_argument("--n", type=int)
    e.add_argument("--trials", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--rho", type=str)
    e.add_argument("--epsilon", type=str)
    e.add_argument("--alpha", type=str)
    e.add_argument("--delta", type=str)
    e.add_argument("--s1", type=int)
    e.add_argument("--s2", type=int)
    e.add_argument("--d1", type=int)
    e.add_argument("--d2", type=int)
    e.add_argument("--ell", type=int)
    e.add_argument("--c", type=int)
    e.add_argument("--span-factor", type=int)
    e.add_argument("--L", dest="list_bound", type=int)
    e.add_argument("--k", dest="dim_k", type=int)
    e.add_argument("--centers", type=int)
    e.add_argument("--center-mode", choices=["sampled", "exhaustive"])
    e.add_argument("--center", choices=["zero", "random", "both"])
    e.add_argument("--out", help="CSV output path; a .summary.json sidecar is written next to it")
    e.add_argument("--threads", type=int, help="defaults to RANKDEC_THREADS, then the core count")
    return p


def _cmd_count(args) -> int:
    modes = [args.grassmann is not None, args.kq is not None, args.rho is not None, args.rank is not None]
    if sum(modes) != 1:
        raise _UsageError("count needs exactly one of --rho, --rank, --grassmann, --kq")
    if args.grassmann is not None:
        nn, kk = args.grassmann
        _echo({"mode": "grassmann", "q": args.q, "n": nn, "k": kk})
        print(gaussian_binomial(args.q, nn, kk))
        return 0
    if args.kq is not None:
        lo, hi = kq_bounds(args.q, args.kq)
        _echo({"mode": "kq", "q": args.q, "terms": args.kq})
        print(f"{lo} {hi}")
        return 0
    if args.m is None or args.n is None:
        raise _UsageError("count --rho/--rank needs --m and --n")
    if args.rank is not None:
        _echo({"mode": "rank", "q": args.q, "m": args.m, "n": args.n, "r": args.rank})
        print(rank_count(args.q, args.m, args.n, args.rank))
        return 0
    rho = parse_fraction(args.rho)
    _echo({"mode": "ball", "q": args.q, "m": args.m, "n": args.n, "rho": str(rho)})
    print(ball_volume(BallSpec(args.q, args.m, args.n, rho)))
    return 0


def _cmd_sample(args) -> int:
    seed = args.seed if args.seed is not None else _fresh_seed()
    field = field_from_order(args.q)
    rng = SeedSpec(seed).rng_for_trial(0)
    echo = {"kind": args.kind, "q": args.q, "m": args.m, "seed": seed, "count": args.count}
    if args.n is not None:
        echo["n"] = args.n
    out = []
    for _ in range(args.count):
        if args.kind == "matrix":
            if args.n is None:
                raise _UsageError("matrix sampling needs --n")
            out.append(matrix_to_text(sample_uniform_matrix(field, args.m, args.n, rng)))
        elif args.kind == "rank-matrix":
            if args.n is None or args.r is None:
                raise _UsageError("rank-matrix sampling needs --n and --r")
            echo["r"] = args.r
            out.append(matrix_to_text(sample_uniform_rank_matrix(field, args.m, args.n, args.r, rng)))
        elif args.kind == "ball":
            if args.n is None or args.rho is None:
                raise _UsageError("ball sampling needs --n and --rho")
            rho = parse_fraction(args.rho)
            echo["rho"] = str(rho)
            out.append(matrix_to_text(sample_ball_uniform(BallSpec(args.q, args.m, args.n, rho), rng)))
        elif args.kind == "subspace":
            if args.s is None:
                raise _UsageError("subspace sampling needs --s (and --m as the ambient dimension)")
            echo["s"] = args.s
            space = sample_uniform_subspace(field, args.m, args.s, rng)
            lines = [f"{args.q} {space.dim} {space.ambient_dim}"]
            lines += [" ".join(str(v) for v in row) for row in space.rows]
            out.append("\n".join(lines) + "\n")
        else:  # linear-code
            if args.n is None or args.k is None:
                raise _UsageError("linear-code sampling needs --n and --k")
            echo["k"] = args.k
            space = sample_random_linear_code(field, args.m, args.n, args.k, rng)
            lines = [f"{args.q} {space.dim} {space.ambient_dim}"]
            lines += [" ".join(str(v) for v in row) for row in space.rows]
            out.append("\n".join(lines) + "\n")
    _echo(echo)
    print("\n".join(out), end="")
    return 0


def _read_vector_file(path: str, q: int) -> list[VectorQ]:
    if q > 10:
        raise _UsageError("the set file format (digits base q) supports q <= 10")
    field = field_from_order(q)
    vectors = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                entries = tuple(int(ch) for ch in line)
            except ValueError as exc:
                raise _UsageError(f"{path}:{lineno}: not base-{q} digits: {line!r}") from exc
            vectors.append(VectorQ(field, entries))
    if not vectors:
        raise _UsageError(f"{path}: no vectors")
    return vectors


def _cmd_chain(args) -> int:
    vectors = _read_vector_file(args.setfile, args.q)
    seed = args.seed if args.seed is not None else _fresh_seed()
    rng = SeedSpec(seed).rng_for_trial(0)
    _echo({
        "setfile": args.setfile, "q": args.q, "c": args.c, "mode": args.mode,
        "budget": args.budget, "seed": seed, "size": len(set(vectors)),
    })
    cert = find_translate_chain(vectors, args.c, mode=args.mode, budget=args.budget, rng=rng)
    ell = vectors[0].ell
    print(f"guarantee {chain_guarantee(args.q, ell, len(set(vectors)), args.c)}")
    print(f"length {cert.length}")
    print("translate " + "".join(str(v) for v in cert.translate.entries))
    for v in cert.chain:
        print("".join(str(x) for x in v.entries))
    return 0


def _cmd_check_ld(args) -> int:
    with open(args.codefile, "r", encoding="utf-8") as fh:
        code = code_from_text(fh.read())
    rho = parse_fraction(args.rho)
    if args.exhaustive:
        _echo({"codefile": args.codefile, "rho": str(rho), "L": args.L, "mode": "exhaustive"})
        ok, witness = is_list_decodable_exact(code, rho, args.L)
        print(f"list-decodable {str(ok).lower()}")
        if witness is not None:
            print("witness")
            print(matrix_to_text(witness), end="")
        return 0
    if args.centers is None:
        raise _UsageError("check-ld needs --exhaustive or --centers N")
    seed = args.seed if args.seed is not None else _fresh_seed()
    _echo({
        "codefile": args.codefile, "rho": str(rho), "L": args.L,
        "mode": "monte-carlo", "centers": args.centers, "seed": seed,
    })
    rng = SeedSpec(seed).rng_for_trial(0)
    best = max_list_size_monte_carlo(code, rho, args.centers, rng)
    print(f"max-list-size {best}")
    print(f"within-bound {str(best <= args.L).lower()}")
    return 0


_EXPERIMENT_FLAGS = (
    "experiment", "q", "m", "n", "trials", "rho", "epsilon", "alpha", "delta",
    "s1", "s2", "d1", "d2", "ell", "c", "span_factor", "list_bound", "dim_k",
    "centers", "center_mode", "center", "out",
)
_FRACTION_KEYS = ("rho", "epsilon", "alpha", "delta")


def _cmd_experiment(args) -> int:
    merged: dict = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            merged.update(json.load(fh))
    for key in _EXPERIMENT_FLAGS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    if args.seed is not None:
        merged["master_seed"] = args.seed
    if "master_seed" not in merged:
        merged["master_seed"] = _fresh_seed()
    for key in _FRACTION_KEYS:
        if key in merged and isinstance(merged[key], str):
            merged[key] = parse_fraction(merged[key])
    config = ExperimentConfig.from_json_dict(merged)
    threads = resolve_threads(args.threads)
    _echo({**config.to_json_dict(), "threads": threads})
    result = run_experiment(config, threads=threads)
    if config.out:
        csv_path, json_path = write_results(result, config.out)
        print(f"wrote {csv_path}")
        print(f"wrote {json_path}")
    print(summary_json_text(result), end="")
    return 0


_HANDLERS = {
    "count": _cmd_count,
    "sample": _cmd_sample,
    "chain": _cmd_chain,
    "check-ld": _cmd_check_ld,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except _UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GuardError, ChainSearchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
