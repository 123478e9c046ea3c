"""Reference algorithms: exhaustive search, Iterative and LocalBest."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .fast import best_candidate
from .kernel import KernelParams, ProductMatrix, approx_kernel, kernel_excess
from .network import (ReplacementProblem, SkillRelevance, SocialNetwork,
                      extract_subgraph, validate_problem)

DEFAULT_BUDGET = 2_000_000
# product-matrix side above which brute force builds each team separately
_MAX_PRODUCT_DIM = 4096


class BudgetExceeded(ValueError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(
            f"brute force needs {required} kernel evaluations, budget is {budget}")


@dataclass
class BaselineResult:
    members: tuple[int, ...]
    final_score: float
    elapsed: float
    evaluations: int


def _require_valid(net, prob):
    rep = validate_problem(net, prob)
    if not rep:
        raise ValueError(f"invalid problem: {rep}")


def _gain(net, prob, W, params, members) -> float:
    G_T = extract_subgraph(net, prob.team)
    base = kernel_excess(G_T, extract_subgraph(net, prob.remaining), W, params)
    new = kernel_excess(G_T, extract_subgraph(net, prob.remaining + tuple(members)), W, params)
    return (new - base) / prob.t ** 4


def brute_force(net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
                params: KernelParams, budget: int = DEFAULT_BUDGET,
                chunk: int = 512) -> BaselineResult:
    """Exact maximiser of the approximate kernel over all size-``s`` subsets.

    Subsets are scanned in lexicographic order of sorted node indices and the
    first maximum wins.
    """
    _require_valid(net, prob)
    pool = np.array(sorted(prob.candidates), dtype=np.intp)
    s, t = prob.s, prob.t
    required = math.comb(len(pool), s)
    if required > budget:
        raise BudgetExceeded(required, budget)
    start = time.perf_counter()
    R = np.array(prob.remaining, dtype=np.intp)
    best_val, best_set = -np.inf, None
    combos = itertools.combinations(range(len(pool)), s)
    if t * (len(R) + len(pool)) <= _MAX_PRODUCT_DIM:
        pm = ProductMatrix(net, prob.team, tuple(R) + tuple(pool), W, params)
        while True:
            block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
            if len(block) == 0:
                break
            teams = np.hstack([np.broadcast_to(R, (len(block), len(R))), pool[block]])
            vals = pm.excess_many(teams, chunk=chunk)
            k = int(np.argmax(vals))
            if vals[k] > best_val:
                best_val, best_set = float(vals[k]), tuple(int(v) for v in pool[block[k]])
    else:
        G_T = extract_subgraph(net, prob.team)
        for combo in combos:
            members = tuple(int(v) for v in pool[list(combo)])
            val = kernel_excess(G_T, extract_subgraph(net, tuple(R) + members), W, params)
            if val > best_val:
                best_val, best_set = val, members
    elapsed = time.perf_counter() - start
    return BaselineResult(best_set, _gain(net, prob, W, params, best_set), elapsed, required)


def iterative_replace(net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
                      params: KernelParams, rng_seed: int = 0) -> BaselineResult:
    """Replace the unavailable members one at a time in random order.

    Members not yet replaced stay in the working team. Each replacement is
    the fast single-member best against ``G_T``.
    """
    _require_valid(net, prob)
    rng = np.random.default_rng(rng_seed)
    start = time.perf_counter()
    current = list(prob.team)
    pending = list(prob.subteam)
    picks: list[int] = []
    evaluations = 0
    while pending:
        p = pending.pop(int(rng.integers(len(pending))))
        slot = current.index(p)
        rest = tuple(current[:slot] + current[slot + 1:])
        res = best_candidate(net, prob.team, rest, W, params, pool=prob.pool)
        evaluations += res.evaluations
        current[slot] = res.node
        picks.append(res.node)
    elapsed = time.perf_counter() - start
    return BaselineResult(tuple(picks), _gain(net, prob, W, params, picks), elapsed, evaluations)


def local_best(net: SocialNetwork, prob: ReplacementProblem, W: SkillRelevance,
               params: KernelParams) -> BaselineResult:
    """Each round commit the (unavailable member, replacement) pair with the best kernel.

    Ties go to the smaller member index, then the smaller candidate index.
    """
    _require_valid(net, prob)
    start = time.perf_counter()
    current = list(prob.team)
    pending = sorted(prob.subteam)
    picks: list[int] = []
    evaluations = 0
    while pending:
        best = None
        for p in pending:
            slot = current.index(p)
            rest = tuple(current[:slot] + current[slot + 1:])
            res = best_candidate(net, prob.team, rest, W, params, pool=prob.pool)
            evaluations += res.evaluations
            if best is None or res.score > best[0]:
                best = (res.score, p, res.node)
        _, p, q = best
        current[current.index(p)] = q
        pending.remove(p)
        picks.append(q)
    elapsed = time.perf_counter() - start
    return BaselineResult(tuple(picks), _gain(net, prob, W, params, picks), elapsed, evaluations)


def team_value(net, prob, W, params, members) -> float:
    """Approximate kernel of ``R + members`` against ``G_T``."""
    G_T = extract_subgraph(net, prob.team)
    return approx_kernel(G_T, extract_subgraph(net, prob.remaining + tuple(members)), W, params)
