"""Command-line entry point: ``regsub thresholds|sample|process|bounds|verify|run``.

Exit status: 0 on success, 1 on a runtime failure (including a failed
verify suite), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from .bounds import bound_profile, default_density
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .graphs import format_graph, sample_gnm, sample_gnp, sample_hnmk, sample_mnmk
from .thresholds import emergence_threshold
from .verify import SUITES, run_suite


def _k_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected K or LO..HI, got {text!r}") from None
    if lo < 3 or hi < lo:
        raise argparse.ArgumentTypeError("need 3 <= LO <= HI")
    return list(range(lo, hi + 1))


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_bytes(text.encode())
    else:
        sys.stdout.write(text)


def cmd_thresholds(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["k", "c_k", "mu_k", "d_k", "core_fraction"])
    for k in args.k:
        t = emergence_threshold(k)
        w.writerow([k, repr(t.c_k), repr(t.mu_k), repr(t.d_k), repr(t.core_fraction)])
    _emit(buf.getvalue(), args.out)
    return 0


def cmd_sample(args) -> int:
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0]))
    n = args.n
    if args.model == "gnp":
        if args.c is None:
            raise _Usage("gnp needs --c")
        g = sample_gnp(n, args.c / n, rng)
    elif args.model == "gnm":
        if args.M is None:
            raise _Usage("gnm needs --M (edge count)")
        g = sample_gnm(n, args.M, rng)
    else:
        if args.M is None:
            raise _Usage(f"{args.model} needs --M (degree total)")
        if args.model == "mnmk":
            g = sample_mnmk(n, args.M, args.k, rng)
        else:
            g = sample_hnmk(n, args.M, args.k, rng).graph
    _emit(format_graph(g), args.out)
    return 0


def _config(*args, **kwargs) -> ExperimentConfig:
    try:
        return ExperimentConfig(*args, **kwargs)
    except ValueError as exc:
        raise _Usage(str(exc)) from None


def cmd_process(args) -> int:
    cfg = _config("E2", n=args.n, k=args.k, trials=args.trials, seed=args.seed,
                  mode=args.mode, output=args.out)
    res = run_experiment(cfg)
    if not args.out:
        sys.stdout.write(res.csv_text())
    return 1 if any(r.error for r in res.records) else 0


def cmd_bounds(args) -> int:
    d = args.d if args.d is not None else default_density(args.k)
    prof = bound_profile(args.k, d, args.sigma, args.C, args.grid)
    if args.out:
        prof.to_csv(args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["delta", "value"])
        for x, v in zip(prof.delta_grid, prof.values):
            w.writerow([repr(float(x)), repr(float(v))])
        sys.stdout.write(buf.getvalue())
    sys.stderr.write(f"epsilon_k = {prof.epsilon_k}\n")
    return 0


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.seed)
    for r in results:
        print(f"[{'PASS' if r.ok else 'FAIL'}] {r.suite}: {r.name} {r.detail}".rstrip())
    return 0 if all(r.ok for r in results) else 1


def cmd_run(args) -> int:
    params = {}
    if args.ks:
        params["ks"] = args.ks
    cfg = _config(args.experiment, n=args.n, k=args.k, c=args.c, M=args.M,
                  trials=args.trials, seed=args.seed, mode=args.mode,
                  output=args.out, params=params)
    res = run_experiment(cfg)
    if not args.out:
        sys.stdout.write(res.csv_text())
    for key, val in res.summary.items():
        sys.stderr.write(f"{key}: {val}\n")
    return 1 if any(r.error for r in res.records) else 0


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="regsub", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("thresholds", help="c_k, mu_k, d_k for a range of k")
    t.add_argument("--k", type=_k_range, default=_k_range("3..10"), help="K or LO..HI")
    t.add_argument("--out")
    t.set_defaults(func=cmd_thresholds)

    s = sub.add_parser("sample", help="draw one random graph")
    s.add_argument("--model", choices=("gnp", "gnm", "mnmk", "hnmk"), required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--M", type=int)
    s.add_argument("--c", type=float)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_sample)

    pr = sub.add_parser("process", help="hitting time m_k over random edge processes")
    pr.add_argument("--n", type=int, required=True)
    pr.add_argument("--k", type=int, required=True)
    pr.add_argument("--trials", type=int, default=1)
    pr.add_argument("--mode", choices=("exact", "heuristic"), default="heuristic")
    pr.add_argument("--seed", type=_seed, default=0)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_process)

    b = sub.add_parser("bounds", help="first-moment bound profile and epsilon_k")
    b.add_argument("--k", type=int, required=True)
    b.add_argument("--d", type=float)
    b.add_argument("--sigma", type=float, default=0.01)
    b.add_argument("--C", type=float, default=1.0)
    b.add_argument("--grid", type=float, default=1e-3)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    v = sub.add_parser("verify", help="oracle-equivalence and invariant checks")
    v.add_argument("--suite", choices=("all", *SUITES), default="all")
    v.add_argument("--seed", type=_seed, default=0)
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="run one experiment E1..E6")
    r.add_argument("experiment", choices=EXPERIMENTS)
    r.add_argument("--n", type=int, default=1000)
    r.add_argument("--k", type=int, default=3)
    r.add_argument("--c", type=float)
    r.add_argument("--M", type=int)
    r.add_argument("--trials", type=int, default=1)
    r.add_argument("--seed", type=_seed, default=0)
    r.add_argument("--mode", choices=("exact", "heuristic"), default="heuristic")
    r.add_argument("--ks", type=int, nargs="+")
    r.add_argument("--out")
    r.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))  # exits with status 2
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        sys.stderr.write(f"regsub: error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
