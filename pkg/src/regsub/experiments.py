"""Seeded experiment harness: E1-E6, CSV records plus a JSON sidecar.

Trial ``i`` of a run with seed ``s`` draws from
``np.random.default_rng(np.random.SeedSequence([s, i]))``, so records do not
depend on how many trials run or in what order.  ``REGSUB_THREADS`` (default 1)
sets the number of worker processes; records are always merged by trial index.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import check_sum_bounds, default_density, extract_epsilon_k
from .degree_sequences import DegreeSequence, sample_sequence
from .factors import expected_property_b, hitting_time, k_core, property_b_count_pairing
from .graphs import configuration_pairing, process_trace, sample_gnp
from .poisson import upper_tail
from .thresholds import emergence_threshold, lambda_for_density, mu_for_c

EXPERIMENTS = ("E1", "E2", "E3", "E4", "E5", "E6")
DEFAULT_DP_SUITE = ((10, 35, 3), (20, 70, 3), (30, 130, 4), (50, 200, 3), (40, 250, 5))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n: int = 1000
    k: int = 3
    c: float | None = None
    M: int | None = None
    trials: int = 1
    seed: int = 0
    mode: str = "heuristic"
    output: str | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if self.mode not in ("exact", "heuristic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.experiment == "E1" and self.c is None:
            raise ValueError("E1 needs c")
        if self.experiment in ("E3", "E4") and self.M is None:
            raise ValueError(f"{self.experiment} needs M")

    def rng(self, trial: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, trial]))


@dataclass
class TrialRecord:
    trial: int
    values: dict
    wall_time: float = 0.0
    error: str = ""


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[TrialRecord]
    summary: dict

    def csv_text(self) -> str:
        cols = _columns(self.config.experiment)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["trial", *cols, "error"])
        for r in self.records:
            w.writerow([r.trial, *(_fmt(r.values.get(c)) for c in cols), r.error])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {
            "version": __version__,
            "config": asdict(self.config),
            "summary": self.summary,
            "wall_time": [r.wall_time for r in self.records],
        }

    def write(self, path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.csv_text().encode())
        Path(str(path) + ".json").write_text(json.dumps(self.sidecar(), indent=2, default=str) + "\n")


_SCHEMA = {
    "E1": ("core_vertices", "core_edges", "core_fraction"),
    "E2": ("m_lower", "m_upper", "method", "core_size", "witness_size", "witness_fraction"),
    "E3": ("n_k", "n_k1", "count", "expected"),
    "E4": ("simple", "phi", "pair_density", "d_max"),
    "E5": ("k", "d", "epsilon_k"),
    "E6": ("s", "Ms", "k", "log_coeff", "lower_ok", "scaled_ratio", "window_ok", "shifted_ok"),
}


def _columns(exp: str) -> tuple[str, ...]:
    return _SCHEMA[exp]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


# -- trials -----------------------------------------------------------------

def _e1(cfg: ExperimentConfig, rng) -> dict:
    g = sample_gnp(cfg.n, cfg.c / cfg.n, rng)
    core = k_core(g, cfg.k)
    return {"core_vertices": core.size, "core_edges": core.edges,
            "core_fraction": core.size / cfg.n}


def _e2(cfg: ExperimentConfig, rng) -> dict:
    rep = hitting_time(process_trace(cfg.n, rng), cfg.k, cfg.mode)
    return {"m_lower": rep.m_lower, "m_upper": rep.m_upper, "method": rep.method,
            "core_size": rep.core_size, "witness_size": rep.witness_size,
            "witness_fraction": rep.witness_size / cfg.n}


def _e3(cfg: ExperimentConfig, rng) -> dict:
    k = cfg.k
    seq = sample_sequence(cfg.n, cfg.M, k, rng)
    mg = configuration_pairing(seq, rng)
    n_k = int(np.count_nonzero(seq.degrees == k))
    n_k1 = int(np.count_nonzero(seq.degrees == k + 1))
    return {"n_k": n_k, "n_k1": n_k1, "count": property_b_count_pairing(mg, k),
            "expected": expected_property_b(n_k, n_k1, cfg.M, k)}


def _e4(cfg: ExperimentConfig, rng) -> dict:
    n, M, k = cfg.n, cfg.M, cfg.k
    if M == k * n:
        seq = DegreeSequence.of(np.full(n, k), k)
    else:
        seq = sample_sequence(n, M, k, rng)
    deg = seq.degrees
    pd = float((deg * (deg - 1)).sum()) / (2.0 * M)
    mg = configuration_pairing(seq, rng)
    return {"simple": mg.is_simple(), "phi": pd + pd * pd, "pair_density": pd,
            "d_max": int(deg.max())}


def _e5_trial(cfg: ExperimentConfig, trial: int) -> dict:
    ks = list(cfg.params.get("ks", [cfg.k]))
    k = int(ks[trial % len(ks)])
    d = cfg.params.get("d") or default_density(k)
    eps = extract_epsilon_k(k, d, cfg.params.get("sigma", 0.01), cfg.params.get("C", 1.0),
                            cfg.params.get("grid_step", 1e-3))
    return {"k": k, "d": d, "epsilon_k": eps}


def _e6_trial(cfg: ExperimentConfig, trial: int) -> dict:
    suite = [tuple(t) for t in cfg.params.get("suite", DEFAULT_DP_SUITE)]
    s, Ms, k = suite[trial % len(suite)]
    rep = check_sum_bounds(s, Ms, k)
    return {"s": s, "Ms": Ms, "k": k, "log_coeff": rep.log_coeff, "lower_ok": rep.lower_ok,
            "scaled_ratio": rep.scaled_ratio, "window_ok": rep.window_ok,
            "shifted_ok": rep.shifted_ok}


_RANDOM = {"E1": _e1, "E2": _e2, "E3": _e3, "E4": _e4}
_DETERMINISTIC = {"E5": _e5_trial, "E6": _e6_trial}


def run_trial(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    t0 = time.perf_counter()
    try:
        if cfg.experiment in _RANDOM:
            values = _RANDOM[cfg.experiment](cfg, cfg.rng(trial))
        else:
            values = _DETERMINISTIC[cfg.experiment](cfg, trial)
        err = ""
    except Exception as exc:  # recorded per trial, the batch goes on
        values, err = {}, f"{type(exc).__name__}: {exc}"
    return TrialRecord(trial, values, time.perf_counter() - t0, err)


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("REGSUB_THREADS", "1")))
    except ValueError:
        return 1


def _trial_count(cfg: ExperimentConfig) -> int:
    if cfg.experiment == "E5":
        return len(cfg.params.get("ks", [cfg.k]))
    if cfg.experiment == "E6":
        return len(cfg.params.get("suite", DEFAULT_DP_SUITE))
    return cfg.trials


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    count = _trial_count(cfg)
    workers = min(_workers(), count)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(run_trial, [cfg] * count, range(count)))
    else:
        records = [run_trial(cfg, i) for i in range(count)]
    records.sort(key=lambda r: r.trial)
    result = ExperimentResult(cfg, records, _summarise(cfg, records))
    if cfg.output:
        result.write(cfg.output)
    return result


# -- summaries --------------------------------------------------------------

def _mean_se(xs) -> tuple[float | None, float | None]:
    xs = np.asarray([x for x in xs if x is not None], dtype=float)
    if xs.size == 0:
        return None, None
    se = float(xs.std(ddof=1) / math.sqrt(xs.size)) if xs.size > 1 else None
    return float(xs.mean()), se


def _summarise(cfg: ExperimentConfig, records: list[TrialRecord]) -> dict:
    ok = [r.values for r in records if not r.error]
    out: dict = {"trials": len(records), "errors": len(records) - len(ok)}
    for col in _columns(cfg.experiment):
        vals = [v.get(col) for v in ok]
        if vals and all(isinstance(x, (int, float, np.integer, np.floating)) and not isinstance(x, bool)
                        for x in vals if x is not None):
            out[f"{col}_mean"], out[f"{col}_se"] = _mean_se(vals)
    k = cfg.k
    if cfg.experiment == "E1" and ok:
        th = emergence_threshold(k)
        if cfg.c >= th.c_k:
            mu = mu_for_c(cfg.c, k, th)
            out["theory_core_fraction"] = upper_tail(k, mu)
            out["theory_core_edges"] = 0.5 * mu * upper_tail(k - 1, mu) * cfg.n
        else:
            out["theory_core_fraction"] = 0.0
    elif cfg.experiment == "E2" and ok:
        # fraction of vertices in the first witness found (about 24% expected
        # for k = 3); exploratory only
        out["witness_fraction_exploratory"] = out.get("witness_fraction_mean")
        out["methods"] = sorted({v["method"] for v in ok})
    elif cfg.experiment == "E3" and ok:
        diff = [v["count"] - v["expected"] for v in ok]
        out["diff_mean"], out["diff_se"] = _mean_se(diff)
    elif cfg.experiment == "E4" and ok:
        simple = np.array([v["simple"] for v in ok], dtype=float)
        out["simple_fraction"] = float(simple.mean())
        out["simple_fraction_se"] = float(math.sqrt(max(simple.mean() * (1 - simple.mean()), 0.0)
                                                    / simple.size))
        out["theory_simple_probability"] = float(np.mean([math.exp(-v["phi"]) for v in ok]))
        if cfg.M != k * cfg.n:
            out["lambda"] = lambda_for_density(cfg.M / cfg.n, k)
    elif cfg.experiment in ("E5", "E6"):
        out["rows"] = len(ok)
    return out
