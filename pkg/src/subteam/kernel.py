"""Edge-labelled random-walk graph kernel between teams.

Every kernel here is built from the product matrix

    M = c * sum_{i<=j} W[i,j] * (E1(i,j) * A1) kron (E2(i,j) * A2)

where ``E(i,j)`` is the skill-pair slice ``max(L[:,i] L[:,j]^T, L[:,j] L[:,i]^T)``
and ``*`` is elementwise. The second form is the mixed-product rewrite of
``(E1 kron E2) * (A1 kron A2)`` and avoids materialising the tensor.

Product-graph rows are indexed ``u * t2 + v`` with ``u`` a node of the first
graph and ``v`` a node of the second.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .network import (ReplacementProblem, SkillRelevance, SocialNetwork,
                      TeamSubgraph, extract_subgraph)


class ConvergenceError(ArithmeticError):
    """The walk series does not provably converge for the chosen decay."""

    def __init__(self, bound: float, message: str | None = None):
        self.bound = float(bound)
        super().__init__(message or
                         f"c * row-sum bound = {self.bound:.6g} >= 1; kernel series may diverge")


@dataclass(frozen=True)
class KernelParams:
    c: float
    safety: float = 0.9

    def __post_init__(self):
        if not self.c >= 0:
            raise ValueError(f"decay must be non-negative, got {self.c}")
        if not 0 < self.safety < 1:
            raise ValueError(f"safety must be in (0, 1), got {self.safety}")


def edge_attribute_slice(L_sub: np.ndarray, i: int, j: int) -> np.ndarray:
    """Skill-pair slice: entry (a, b) is max(L[a,i] L[b,j], L[a,j] L[b,i])."""
    if i > j:
        raise ValueError(f"skill pair must satisfy i <= j, got ({i}, {j})")
    L_sub = np.asarray(L_sub, dtype=float)
    li, lj = L_sub[:, i], L_sub[:, j]
    return np.maximum(np.outer(li, lj), np.outer(lj, li))


def slice_stack(L_sub: np.ndarray, I: np.ndarray, J: np.ndarray) -> np.ndarray:
    """All slices for the pairs ``zip(I, J)`` stacked as ``(P, t, t)``."""
    Li = L_sub[:, I].T
    Lj = L_sub[:, J].T
    return np.maximum(Li[:, :, None] * Lj[:, None, :], Lj[:, :, None] * Li[:, None, :])


def weighted_slices(G: TeamSubgraph, I, J) -> np.ndarray:
    """``E(i,j) * A`` for each pair; shape ``(P, t, t)``."""
    return slice_stack(G.L, I, J) * G.A[None, :, :]


def product_attribute_matrix(L1: np.ndarray, L2: np.ndarray, W: SkillRelevance) -> np.ndarray:
    """``E_x = sum_{i<=j} W[i,j] * slice(L1,i,j) kron slice(L2,i,j)``."""
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    if L1.shape[1] != L2.shape[1] or L1.shape[1] != W.l:
        raise ValueError("skill dimensions disagree")
    t1, t2 = L1.shape[0], L2.shape[0]
    I, J, w = W.pairs()
    if len(w) == 0:
        return np.zeros((t1 * t2, t1 * t2))
    E1 = slice_stack(L1, I, J)
    E2 = slice_stack(L2, I, J)
    return _weighted_kron_sum(w, E1, E2)


def walk_matrix(G1: TeamSubgraph, G2: TeamSubgraph, W: SkillRelevance) -> np.ndarray:
    """``E_x * (A1 kron A2)`` without the decay factor."""
    t1, t2 = G1.size, G2.size
    I, J, w = W.pairs()
    if len(w) == 0 or t1 == 0 or t2 == 0:
        return np.zeros((t1 * t2, t1 * t2))
    P1 = weighted_slices(G1, I, J)
    P2 = weighted_slices(G2, I, J)
    return _weighted_kron_sum(w, P1, P2)


def _weighted_kron_sum(w, X, Y) -> np.ndarray:
    """``sum_k w_k X_k kron Y_k`` as one matrix product."""
    P, t1, t2 = len(w), X.shape[1], Y.shape[1]
    out = (X.reshape(P, t1 * t1) * w[:, None]).T @ Y.reshape(P, t2 * t2)
    return out.reshape(t1, t1, t2, t2).transpose(0, 2, 1, 3).reshape(t1 * t2, t1 * t2)


def row_sum_bound(M: np.ndarray) -> float:
    """``min(max row sum, max column sum)`` of a non-negative matrix."""
    if M.size == 0:
        return 0.0
    return float(min(M.sum(axis=1).max(), M.sum(axis=0).max()))


def decay_from_bound(ub: float, safety: float = 0.9) -> float:
    return safety / max(1.0, ub)


def choose_decay(M: np.ndarray, safety: float = 0.9) -> float:
    """Decay ``c = safety / max(1, row-sum bound of M)``.

    For ``M = 0`` any decay converges and the rule returns ``safety``.
    """
    if not 0 < safety < 1:
        raise ValueError(f"safety must be in (0, 1), got {safety}")
    return decay_from_bound(row_sum_bound(np.asarray(M, dtype=float)), safety)


def _slice_row_sums(net: SocialNetwork, nodes: np.ndarray, I, J) -> np.ndarray:
    """Row sums of ``E(i,j) * A`` on the subgraph induced by ``nodes``; ``(P, |nodes|)``."""
    nodes = np.asarray(nodes, dtype=np.intp)
    sub = net.A[nodes][:, nodes].tocoo()
    rows, cols, data = sub.row, sub.col, sub.data
    L = net.L[nodes]
    out = np.zeros((len(I), len(nodes)))
    for k, (i, j) in enumerate(zip(I, J)):
        vals = np.maximum(L[rows, i] * L[cols, j], L[rows, j] * L[cols, i]) * data
        out[k] = np.bincount(rows, weights=vals, minlength=len(nodes))
    return out


def instance_decay(net: SocialNetwork, team: Sequence[int], W: SkillRelevance,
                   safety: float = 0.9, universe: Sequence[int] | str = "network") -> KernelParams:
    """Decay shared by every evaluation of one problem instance.

    The row-sum bound is taken over the product of ``G_T`` with the graph
    induced by ``universe``. Any team drawn from ``universe`` gives a
    principal submatrix of that product, so its row sums, and hence its
    spectral radius, are no larger. ``universe="team"`` uses ``G_T x G_T``
    only; ``"network"`` (default) uses every node.
    """
    team = np.asarray(team, dtype=np.intp)
    if isinstance(universe, str):
        if universe == "team":
            universe = team
        elif universe == "network":
            universe = np.arange(net.n)
        else:
            raise ValueError(f"unknown universe {universe!r}")
    universe = np.asarray(universe, dtype=np.intp)
    I, J, w = W.pairs()
    if len(w) == 0:
        return KernelParams(safety, safety)
    rs_team = _slice_row_sums(net, team, I, J) * w[:, None]
    rs_univ = _slice_row_sums(net, universe, I, J)
    # row (u, v) of the product sums to sum_k rs_univ[k, u] * rs_team[k, v]
    ub = float((rs_univ.T @ rs_team).max()) if rs_univ.size else 0.0
    return KernelParams(decay_from_bound(ub, safety), safety)


def _check_bound(M: np.ndarray) -> None:
    ub = row_sum_bound(M)
    if ub >= 1.0:
        raise ConvergenceError(ub)


def kernel(G1: TeamSubgraph, G2: TeamSubgraph, W: SkillRelevance, params: KernelParams) -> float:
    """``y^T (I - c E_x * A_x)^{-1} x`` with uniform ``x = y = 1/(t1 t2)``."""
    t1, t2 = G1.size, G2.size
    d = t1 * t2
    if d == 0:
        raise ValueError("kernel needs two non-empty graphs")
    M = params.c * walk_matrix(G1, G2, W)
    _check_bound(M)
    x = np.full(d, 1.0 / d)
    z = np.linalg.solve(np.eye(d) - M, x)
    return float(x @ z)


def walk_excess(M: np.ndarray) -> float:
    """``sum((I - M)^{-1}) - dim(M)``, solved directly for accuracy.

    Equals the total weight of walks of length >= 1; the identity term is
    dropped so differences between teams do not cancel catastrophically.
    """
    d = M.shape[0]
    if d == 0:
        return 0.0
    z = np.linalg.solve(np.eye(d) - M, M.sum(axis=1))
    return float(z.sum())


def kernel_excess(G0: TeamSubgraph, G1: TeamSubgraph, W: SkillRelevance,
                  params: KernelParams) -> float:
    M = params.c * walk_matrix(G0, G1, W)
    _check_bound(M)
    return walk_excess(M)


def approx_kernel(G0: TeamSubgraph, G1: TeamSubgraph, W: SkillRelevance,
                  params: KernelParams) -> float:
    """Size-normalised kernel ``sum((I - c E_x * A_x)^{-1}) / |V0|^4``.

    ``G1`` is padded with isolated zero-skill dummy nodes up to ``|V0|``;
    dummies only add identity rows, so the padded sum is
    ``|V0|^2 + walk excess``.
    """
    t0, t1 = G0.size, G1.size
    if t0 == 0:
        raise ValueError("reference graph is empty")
    if t1 > t0:
        raise ValueError(f"approximate kernel needs |V0| >= |V1|, got {t0} < {t1}")
    return (t0 * t0 + kernel_excess(G0, G1, W, params)) / t0 ** 4


def _g_members(prob: ReplacementProblem, chosen) -> tuple[int, ...]:
    chosen = tuple(int(v) for v in chosen)
    if len(set(chosen)) != len(chosen):
        raise ValueError("duplicate candidate")
    if set(chosen) & set(prob.team):
        raise ValueError("candidates must lie outside the team")
    return prob.remaining + chosen


def score_g(chosen, prob: ReplacementProblem, net: SocialNetwork, W: SkillRelevance,
            params: KernelParams, *, extend: bool = False) -> float:
    """Gain ``g(S') = K^(G_T, G_{R u S'}) - K^(G_T, G_R)``.

    With ``extend=True`` sets larger than the team size are allowed; the
    gain is then the walk-excess difference over ``|T|^4``, which agrees with
    the padded definition wherever the latter applies.
    """
    members = _g_members(prob, chosen)
    t = prob.t
    if len(members) > t and not extend:
        raise ValueError(f"|R u S'| = {len(members)} exceeds team size {t}")
    G_T = extract_subgraph(net, prob.team)
    base = kernel_excess(G_T, extract_subgraph(net, prob.remaining), W, params)
    if len(members) == len(prob.remaining):
        return 0.0
    new = kernel_excess(G_T, extract_subgraph(net, members), W, params)
    return (new - base) / t ** 4


class ProductMatrix:
    """Product matrix of ``G_T`` against a fixed node universe.

    The walk matrix of ``G_T`` against any team drawn from the universe is a
    principal submatrix of this one, so many teams can be scored by
    gathering rows instead of rebuilding slices.
    """

    def __init__(self, net: SocialNetwork, team: Sequence[int], universe: Sequence[int],
                 W: SkillRelevance, params: KernelParams):
        self.team = tuple(int(v) for v in team)
        self.universe = tuple(int(v) for v in universe)
        self.t = len(self.team)
        self._pos = {v: k for k, v in enumerate(self.universe)}
        G_T = extract_subgraph(net, self.team)
        G_U = extract_subgraph(net, self.universe)
        self.M = params.c * walk_matrix(G_U, G_T, W)
        _check_bound(self.M)

    def _rows(self, members) -> np.ndarray:
        pos = np.array([self._pos[int(v)] for v in members], dtype=np.intp)
        return (pos[:, None] * self.t + np.arange(self.t)[None, :]).reshape(-1)

    def excess(self, members) -> float:
        if len(members) == 0:
            return 0.0
        idx = self._rows(members)
        return walk_excess(self.M[np.ix_(idx, idx)])

    def excess_many(self, teams: np.ndarray, chunk: int = 512) -> np.ndarray:
        """Walk excess for each row of an integer array of equal-size teams."""
        teams = np.asarray(teams, dtype=np.intp)
        if teams.ndim != 2:
            raise ValueError("teams must be a 2-D array")
        out = np.empty(len(teams))
        if teams.shape[1] == 0:
            out[:] = 0.0
            return out
        lookup = np.full(max(self.universe) + 1, -1, dtype=np.intp)
        lookup[list(self.universe)] = np.arange(len(self.universe))
        pos = lookup[teams]
        if np.any(pos < 0):
            raise KeyError("team member outside the universe")
        rows = (pos[:, :, None] * self.t + np.arange(self.t)).reshape(len(teams), -1)
        d = rows.shape[1]
        eye = np.eye(d)
        for lo in range(0, len(teams), chunk):
            r = rows[lo:lo + chunk]
            sub = self.M[r[:, :, None], r[:, None, :]]
            rhs = sub.sum(axis=2)[..., None]
            z = np.linalg.solve(eye - sub, rhs)
            out[lo:lo + chunk] = z[..., 0].sum(axis=1)
        return out
