"""Batch experiments over a (t, s) grid with per-instance and aggregate CSVs.

Output files
------------
instances.csv   one row per (t, s, algorithm, instance); deterministic given
                the config, so it is byte-identical across runs and thread
                counts
timings.csv     wall time of each solve call, keyed like ``instances.csv``
aggregate.csv   per (t, s, algorithm) means and rates
"""

from __future__ import annotations

import csv
import json
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .baselines import DEFAULT_BUDGET, BudgetExceeded, brute_force, iterative_replace, local_best
from .data import BAConfig, generate_ba, sample_subteam, sample_team
from .io import read_network, read_skill_relevance
from .kernel import ConvergenceError, instance_decay
from .network import ReplacementProblem, SkillRelevance, SocialNetwork
from .reform import reform, supermodular_curvature

ALGORITHMS = ("reform", "iterative", "local_best", "brute")
SCORE_RTOL = 1e-9

INSTANCE_COLUMNS = ["t", "s", "algorithm", "instance", "instance_seed", "score",
                    "is_optimal", "evaluations", "members", "kappa", "error"]
TIMING_COLUMNS = ["t", "s", "algorithm", "instance", "elapsed_s"]
AGGREGATE_COLUMNS = ["t", "s", "algorithm", "instances", "errors", "mean_elapsed_s",
                     "std_elapsed_s", "optimal_rate", "outperform_rate", "mean_score",
                     "mean_kappa"]


@dataclass
class BatchConfig:
    source: dict = field(default_factory=lambda: {"ba": {"n": 50, "attach": 3, "l": 6, "rate": 1.0}})
    batch_size: int = 100
    t_range: tuple[int, int] = (3, 9)
    s_range: tuple[int, int] = (2, 4)
    algorithms: tuple[str, ...] = ALGORITHMS
    W_mode: str = "ones_upper"
    W_path: str | None = None
    seed: int = 0
    team_mode: str = "connected_subgraph"
    safety: float = 0.9
    brute_budget: int = DEFAULT_BUDGET
    curvature: bool = False
    curvature_pool_cap: int = 60

    def __post_init__(self):
        self.t_range = tuple(int(x) for x in self.t_range)
        self.s_range = tuple(int(x) for x in self.s_range)
        self.algorithms = tuple(self.algorithms)
        if len(self.t_range) != 2 or len(self.s_range) != 2:
            raise ValueError("t_range and s_range are inclusive [lo, hi] pairs")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.s_range[0] < 2 or self.s_range[0] > self.s_range[1]:
            raise ValueError(f"s_range must satisfy 2 <= lo <= hi, got {self.s_range}")
        if self.t_range[0] > self.t_range[1] or self.t_range[1] < self.s_range[0] + 1:
            raise ValueError(f"t_range {self.t_range} leaves no cell with s + 1 <= t")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown or not self.algorithms:
            raise ValueError(f"unknown algorithms {sorted(unknown)}; choose from {ALGORITHMS}")
        if self.W_mode not in ("ones_upper", "file"):
            raise ValueError(f"unknown W_mode {self.W_mode!r}")
        if self.W_mode == "file" and not self.W_path:
            raise ValueError("W_mode 'file' needs W_path")
        if set(self.source) - {"ba", "files"} or len(self.source) != 1:
            raise ValueError("source must have exactly one key: 'ba' or 'files'")
        if "ba" in self.source:
            BAConfig(**{**self.source["ba"], "seed": 0})
        if self.team_mode not in ("connected_subgraph", "clique"):
            raise ValueError(f"unknown team_mode {self.team_mode!r}")

    @classmethod
    def from_json(cls, path) -> "BatchConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**raw)

    def cells(self) -> list[tuple[int, int]]:
        return [(t, s) for s in range(self.s_range[0], self.s_range[1] + 1)
                for t in range(max(self.t_range[0], s + 1), self.t_range[1] + 1)]


def instance_seed(seed: int, t: int, s: int, i: int) -> int:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(t, s, i))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass
class InstanceRow:
    t: int
    s: int
    algorithm: str
    instance: int
    instance_seed: int
    score: float | None = None
    is_optimal: bool | None = None
    evaluations: int | None = None
    members: str = ""
    kappa: float | None = None
    error: str = ""
    elapsed_s: float | None = None


def _error_code(err: Exception) -> str:
    if isinstance(err, BudgetExceeded):
        return "budget"
    if isinstance(err, ConvergenceError):
        return "convergence"
    if isinstance(err, np.linalg.LinAlgError):
        return "numerical"
    if isinstance(err, ValueError):
        return "invalid"
    return "error"


def _same(a: float, b: float) -> bool:
    return abs(a - b) <= SCORE_RTOL * max(abs(a), abs(b))


class _Source:
    def __init__(self, cfg: BatchConfig):
        self.cfg = cfg
        self.fixed: SocialNetwork | None = None
        if "files" in cfg.source:
            files = cfg.source["files"]
            self.fixed = read_network(files["edges"], files["skills"])
        if cfg.W_mode == "file":
            l = self.fixed.l if self.fixed is not None else cfg.source["ba"]["l"]
            self.W = read_skill_relevance(cfg.W_path, l)
        else:
            l = self.fixed.l if self.fixed is not None else cfg.source["ba"].get("l", 6)
            self.W = SkillRelevance.ones_upper(l)

    def network(self, seed: int) -> SocialNetwork:
        if self.fixed is not None:
            return self.fixed
        return generate_ba(BAConfig(**{**self.cfg.source["ba"], "seed": seed}))


def run_instance(src: _Source, t: int, s: int, i: int) -> list[InstanceRow]:
    cfg = src.cfg
    seed = instance_seed(cfg.seed, t, s, i)
    rows = {a: InstanceRow(t, s, a, i, seed) for a in cfg.algorithms}

    def fail_all(err):
        for row in rows.values():
            row.error = _error_code(err)
        return list(rows.values())

    try:
        net = src.network(seed)
        team = sample_team(net, t, cfg.team_mode, seed=[seed, 1])
        sub = sample_subteam(team, s, seed=[seed, 2])
        prob = ReplacementProblem(team, sub, net.n)
        params = instance_decay(net, team, src.W, cfg.safety)
    except Exception as err:  # noqa: BLE001 - recorded per row
        return fail_all(err)

    W = src.W
    kappa = None
    if cfg.curvature:
        try:
            kappa = supermodular_curvature(net, prob, W, params, cfg.curvature_pool_cap).kappa
        except Exception:  # noqa: BLE001
            kappa = None
    results = {}
    solvers = {
        "reform": lambda: reform(net, prob, W, params),
        "iterative": lambda: iterative_replace(net, prob, W, params, rng_seed=[seed, 3]),
        "local_best": lambda: local_best(net, prob, W, params),
        "brute": lambda: brute_force(net, prob, W, params, budget=cfg.brute_budget),
    }
    for name in cfg.algorithms:
        row = rows[name]
        row.kappa = kappa
        try:
            start = time.perf_counter()
            res = solvers[name]()
            row.elapsed_s = time.perf_counter() - start
        except Exception as err:  # noqa: BLE001 - recorded per row
            row.error = _error_code(err)
            continue
        row.score = float(res.final_score)
        row.evaluations = int(res.evaluations)
        row.members = ";".join(net.node_ids[v] for v in res.members)
        results[name] = row.score
    if "brute" in results:
        best = results["brute"]
        for name, score in results.items():
            rows[name].is_optimal = score >= best - SCORE_RTOL * abs(best)
    return [rows[a] for a in cfg.algorithms]


def run_batch(cfg: BatchConfig, threads: int = 1, timing_serial: bool = False) -> list[InstanceRow]:
    """Run every (t, s, instance) job; rows come back in job order."""
    src = _Source(cfg)
    jobs = [(t, s, i) for t, s in cfg.cells() for i in range(cfg.batch_size)]
    if threads <= 1 or timing_serial:
        chunks = [run_instance(src, *job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda job: run_instance(src, *job), jobs))
    return [row for chunk in chunks for row in chunk]


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def aggregate(rows: Sequence[InstanceRow]) -> list[dict]:
    by_key: dict[tuple, list[InstanceRow]] = {}
    for row in rows:
        by_key.setdefault((row.t, row.s, row.algorithm), []).append(row)
    reform_rows = {(r.t, r.s, r.instance): r for r in rows if r.algorithm == "reform"}
    out = []
    for (t, s, algo), group in by_key.items():
        ok = [r for r in group if not r.error]
        times = [r.elapsed_s for r in ok if r.elapsed_s is not None]
        flags = [r.is_optimal for r in ok if r.is_optimal is not None]
        kappas = [r.kappa for r in group if r.kappa is not None]
        outperform = None
        if algo != "reform" and reform_rows:
            wins = []
            for r in ok:
                ref = reform_rows.get((t, s, r.instance))
                if ref is None or ref.error:
                    continue
                if _same(ref.score, r.score):
                    wins.append(ref.elapsed_s < r.elapsed_s)
                else:
                    wins.append(ref.score > r.score)
            outperform = sum(wins) / len(wins) if wins else None
        out.append({
            "t": t, "s": s, "algorithm": algo, "instances": len(group),
            "errors": len(group) - len(ok),
            "mean_elapsed_s": statistics.fmean(times) if times else None,
            "std_elapsed_s": statistics.pstdev(times) if times else None,
            "optimal_rate": sum(flags) / len(flags) if flags else None,
            "outperform_rate": outperform,
            "mean_score": statistics.fmean(r.score for r in ok) if ok else None,
            "mean_kappa": statistics.fmean(kappas) if kappas else None,
        })
    return out


def write_results(rows: Sequence[InstanceRow], out_dir) -> dict[str, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"instances": out / "instances.csv", "timings": out / "timings.csv",
             "aggregate": out / "aggregate.csv"}
    with open(paths["instances"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(INSTANCE_COLUMNS)
        for row in rows:
            d = asdict(row)
            w.writerow([_cell(d[c]) for c in INSTANCE_COLUMNS])
    with open(paths["timings"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TIMING_COLUMNS)
        for row in rows:
            d = asdict(row)
            w.writerow([_cell(d[c]) for c in TIMING_COLUMNS])
    with open(paths["aggregate"], "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_COLUMNS)
        for rec in aggregate(rows):
            w.writerow([_cell(rec[c]) for c in AGGREGATE_COLUMNS])
    return paths


def _parse(value: str, kind):
    if value == "":
        return None
    if kind is bool:
        return value == "true"
    return kind(value)


def read_rows(out_dir) -> list[InstanceRow]:
    """Rebuild rows from ``instances.csv`` joined with ``timings.csv``."""
    out = Path(out_dir)
    kinds = {"t": int, "s": int, "instance": int, "instance_seed": int, "score": float,
             "is_optimal": bool, "evaluations": int, "kappa": float}
    with open(out / "timings.csv", newline="", encoding="utf-8") as fh:
        timing = {(int(r["t"]), int(r["s"]), r["algorithm"], int(r["instance"])):
                  _parse(r["elapsed_s"], float) for r in csv.DictReader(fh)}
    rows = []
    with open(out / "instances.csv", newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            vals = {k: (_parse(v, kinds[k]) if k in kinds else v) for k, v in rec.items()}
            row = InstanceRow(**vals)
            row.elapsed_s = timing.get((row.t, row.s, row.algorithm, row.instance))
            rows.append(row)
    return rows


def audit(out_dir) -> list[str]:
    """Recompute ``aggregate.csv`` from the per-instance files; return mismatches."""
    out = Path(out_dir)
    expected = aggregate(read_rows(out))
    with open(out / "aggregate.csv", newline="", encoding="utf-8") as fh:
        written = list(csv.DictReader(fh))
    problems = []
    if len(written) != len(expected):
        problems.append(f"aggregate has {len(written)} rows, expected {len(expected)}")
    for got, want in zip(written, expected):
        for col in AGGREGATE_COLUMNS:
            w = _cell(want[col])
            if got[col] != w:
                problems.append(f"({want['t']},{want['s']},{want['algorithm']}) {col}: {got[col]} != {w}")
    return problems
