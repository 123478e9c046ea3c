"""Greedy subteam replacement and its curvature certificate."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .fast import best_candidate
from .kernel import KernelParams, ProductMatrix, kernel_excess
from .network import (ReplacementProblem, SkillRelevance, SocialNetwork,
                      extract_subgraph, validate_problem)


@dataclass
class GreedySolution:
    members: list[int]
    scores: list[float]
    final_score: float
    per_round_time: list[float]
    evaluations: int = 0

    @property
    def elapsed(self) -> float:
        return float(sum(self.per_round_time))


def greedy_max(score: Callable[[tuple[int, ...]], float], pool: Iterable[int], k: int,
               select: Callable[[tuple[int, ...], tuple[int, ...]], int] | None = None) -> list[int]:
    """Pick ``k`` elements by largest marginal gain of the set function ``score``.

    Ties go to the smaller element. ``select(chosen, remaining)`` replaces the
    marginal-gain argmax when given (it must return a member of ``remaining``).
    """
    remaining = sorted(int(v) for v in pool)
    if k > len(remaining):
        raise ValueError(f"cannot pick {k} elements from a pool of {len(remaining)}")
    chosen: tuple[int, ...] = ()
    for _ in range(k):
        if select is not None:
            v = int(select(chosen, tuple(remaining)))
            if v not in remaining:
                raise ValueError(f"selector returned {v}, which is not available")
        else:
            current = score(chosen)
            best_gain, v = -np.inf, remaining[0]
            for cand in remaining:
                gain = score(chosen + (cand,)) - current
                if gain > best_gain:
                    best_gain, v = gain, cand
        chosen += (v,)
        remaining.remove(v)
    return list(chosen)


class GainOracle:
    """Cached ``g`` over subsets of a fixed pool, backed by a ProductMatrix."""

    def __init__(self, net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
                 params: KernelParams, pool: Sequence[int] | None = None):
        self.prob = prob
        self.pool = tuple(sorted(prob.candidates if pool is None else pool))
        self.t = prob.t
        self.R = prob.remaining
        self.pm = ProductMatrix(net, prob.team, self.R + self.pool, W, params)
        self.base = self.pm.excess(self.R)
        self._cache: dict[frozenset, float] = {}

    def __call__(self, chosen) -> float:
        key = frozenset(int(v) for v in chosen)
        if not key:
            return 0.0
        if key not in self._cache:
            self._cache[key] = (self.pm.excess(self.R + tuple(sorted(key))) - self.base) / self.t ** 4
        return self._cache[key]


def _gain(net, prob, W, params, chosen) -> float:
    G_T = extract_subgraph(net, prob.team)
    base = kernel_excess(G_T, extract_subgraph(net, prob.remaining), W, params)
    new = kernel_excess(G_T, extract_subgraph(net, prob.remaining + tuple(chosen)), W, params)
    return (new - base) / prob.t ** 4


def reform(net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
           params: KernelParams, *, cross_check: bool = False) -> GreedySolution:
    """Grow the remaining team one fast single-member replacement at a time.

    ``cross_check=True`` also recomputes each round's argmax by direct gain
    evaluation over the whole pool and raises if the two picks differ in
    value (small instances only).
    """
    rep = validate_problem(net, prob)
    if not rep:
        raise ValueError(f"invalid problem: {rep}")
    T, R0 = prob.team, prob.remaining
    G_T = extract_subgraph(net, T)
    base = kernel_excess(G_T, extract_subgraph(net, R0), W, params)
    t4 = prob.t ** 4
    rounds: list[float] = []
    scores: list[float] = []
    evaluations = 0
    oracle = GainOracle(net, prob, W, params) if cross_check else None

    def select(chosen, remaining):
        nonlocal evaluations
        start = time.perf_counter()
        res = best_candidate(net, T, R0 + chosen, W, params, pool=prob.pool)
        rounds.append(time.perf_counter() - start)
        evaluations += res.evaluations
        # fast score is the padded approximate kernel; convert to a gain
        scores.append((res.score * t4 - prob.t ** 2 - base) / t4)
        if oracle is not None:
            cur = oracle(chosen)
            best = max(oracle(chosen + (v,)) - cur for v in remaining)
            got = oracle(chosen + (res.node,)) - cur
            if got < best - 1e-12 * max(1.0, abs(best)):
                raise AssertionError(
                    f"fast pick {res.node} gains {got:.17g}, direct argmax gains {best:.17g}")
        return res.node

    members = greedy_max(lambda X: 0.0, prob.candidates, prob.s, select=select)
    final = _gain(net, prob, W, params, members)
    return GreedySolution(members, scores, final, rounds, evaluations)


@dataclass
class CurvatureCertificate:
    kappa: float
    argmin_node: int | None
    g_singletons: dict[int, float]
    g_full: float
    g_drop: dict[int, float]
    pool: tuple[int, ...]
    valid: bool = True
    skipped: list[int] = field(default_factory=list)
    g_plus: float | None = None

    @property
    def bound(self) -> float | str:
        """``(1 - kappa) g(S+)`` when the optimum's gain is known."""
        if self.g_plus is None:
            return "(1 - kappa) * g(S+)"
        return (1.0 - self.kappa) * self.g_plus

    def with_optimum(self, g_plus: float) -> "CurvatureCertificate":
        self.g_plus = float(g_plus)
        return self


def curvature(g: Callable[[tuple[int, ...]], float], pool: Sequence[int],
              rtol: float = 1e-10) -> CurvatureCertificate:
    """Supermodular curvature ``1 - min_v g({v}) / (g(C) - g(C - v))``.

    A ``v`` whose marginal at ``C`` and singleton gain are both zero is
    skipped. A zero marginal with a positive singleton gain marks the
    certificate invalid. Ratios are clipped to ``[0, 1]``.
    """
    pool = tuple(sorted(int(v) for v in pool))
    if not pool:
        raise ValueError("curvature needs a non-empty pool")
    g_full = g(pool)
    scale = max(abs(g_full), np.finfo(float).tiny)
    singles, drops = {}, {}
    min_ratio, argmin, valid, skipped = 1.0, None, True, []
    for v in pool:
        singles[v] = g((v,))
        drops[v] = g(tuple(x for x in pool if x != v))
        denom = g_full - drops[v]
        if denom <= rtol * scale:
            if singles[v] <= rtol * scale:
                skipped.append(v)
                continue
            valid = False
            continue
        ratio = min(1.0, max(0.0, singles[v] / denom))
        if argmin is None or ratio < min_ratio:
            min_ratio, argmin = ratio, v
    if argmin is None:
        min_ratio = 1.0
    return CurvatureCertificate(1.0 - min_ratio, argmin, singles, g_full, drops, pool,
                                valid, skipped)


def supermodular_curvature(net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
                           params: KernelParams, pool_cap: int = 60,
                           pool: Sequence[int] | None = None) -> CurvatureCertificate:
    """Curvature certificate of ``g`` over the candidate pool (default ``V \\ T``).

    The certificate only speaks for the pool it records.
    """
    pool = tuple(sorted(prob.candidates if pool is None else pool))
    if len(pool) > pool_cap:
        raise ValueError(
            f"candidate pool has {len(pool)} nodes (cap {pool_cap}); "
            "pass an explicit subsampled pool or raise pool_cap")
    oracle = GainOracle(net, prob, W, params, pool)
    return curvature(oracle, pool)


@dataclass
class PropertyReport:
    trials: int
    violations: int
    min_slack: float
    worst: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _random_subset(rng, pool, size):
    return tuple(int(v) for v in rng.choice(pool, size=size, replace=False))


def check_supermodularity(net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
                          params: KernelParams, trials: int = 500, rng_seed: int = 0,
                          pool: Sequence[int] | None = None, tol: float = 1e-12,
                          max_extra: int | None = None) -> PropertyReport:
    """Sample ``(S', x, y)`` and check ``g(S'+x+y) - g(S'+x) >= g(S'+y) - g(S')``.

    ``|S'|`` is drawn uniformly from ``0..max_extra`` (default ``s``); sets
    beyond the team size use the extended gain.
    """
    pool = np.array(sorted(prob.candidates if pool is None else pool))
    if len(pool) < 2:
        raise ValueError("need at least two candidates")
    g = GainOracle(net, prob, W, params, pool)
    rng = np.random.default_rng(rng_seed)
    hi = min(prob.s if max_extra is None else max_extra, len(pool) - 2)
    min_slack, worst, bad = np.inf, None, 0
    for _ in range(trials):
        size = int(rng.integers(0, hi + 1))
        picked = _random_subset(rng, pool, size + 2)
        S, (x, y) = picked[:size], picked[size:]
        slack = (g(S + (x, y)) - g(S + (x,))) - (g(S + (y,)) - g(S))
        if slack < min_slack:
            min_slack, worst = slack, (S, x, y)
        if slack < -tol:
            bad += 1
    return PropertyReport(trials, bad, float(min_slack), worst)


def check_monotonicity(net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
                       params: KernelParams, trials: int = 500, rng_seed: int = 0,
                       pool: Sequence[int] | None = None, tol: float = 1e-12,
                       max_extra: int | None = None) -> PropertyReport:
    """Sample ``(X, x)`` and check ``g(X + x) >= g(X)``."""
    pool = np.array(sorted(prob.candidates if pool is None else pool))
    g = GainOracle(net, prob, W, params, pool)
    rng = np.random.default_rng(rng_seed)
    hi = min(prob.s if max_extra is None else max_extra, len(pool) - 1)
    min_slack, worst, bad = np.inf, None, 0
    for _ in range(trials):
        size = int(rng.integers(0, hi + 1))
        picked = _random_subset(rng, pool, size + 1)
        X, x = picked[:size], picked[size]
        slack = g(X + (x,)) - g(X)
        if slack < min_slack:
            min_slack, worst = slack, (X, x)
        if slack < -tol:
            bad += 1
    return PropertyReport(trials, bad, float(min_slack), worst)
