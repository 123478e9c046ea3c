"""Single-member replacement with a reusable blockwise inverse.

The candidate team is ``R + [q]`` with ``q`` in the last slot, so the
product matrix against ``G_T`` (indexed ``u * t + v``, candidate side first)
splits as

    [ K    F ]      K = I - c sum_k Y_k kron Z_k    (fixed for all q)
    [ F^T  I ]      F = -c sum_k B_k kron Z_k       (column of q's couplings)

with ``Z_k = W_k E_T(k) * A_T``, ``Y_k = E_R(k) * A_R`` and ``B_k`` the slice
entries between ``R`` and ``q`` times ``A[R, q]``. The bottom-right block is
the identity because ``q`` has no self-loop. With ``K^{-1}`` precomputed each
candidate costs one ``t x t`` Schur complement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .kernel import (ConvergenceError, KernelParams, approx_kernel, weighted_slices)
from .network import SkillRelevance, SocialNetwork, extract_subgraph

log = logging.getLogger(__name__)


class SchurSingularError(np.linalg.LinAlgError):
    def __init__(self, cond: float):
        self.cond = cond
        super().__init__(f"Schur complement is numerically singular (cond ~ {cond:.3g})")


SCHUR_COND_LIMIT = 1e12


@dataclass(frozen=True)
class KernelContext:
    team: tuple[int, ...]
    remaining: tuple[int, ...]
    c: float
    pairs_i: np.ndarray
    pairs_j: np.ndarray
    Z: np.ndarray          # (P, t, t), W weight folded in
    Z_flat: np.ndarray     # (P, t * t), -c * Z
    Y: np.ndarray          # (P, r, r)
    K_inv: np.ndarray      # (r t, r t)
    K_inv_ones: np.ndarray
    K_inv_sum: float
    K_row_sums: np.ndarray  # row sums of c sum_k Y_k kron Z_k
    L_R: np.ndarray
    R_plus: np.ndarray     # remaining team plus a slot for the candidate

    @property
    def t(self) -> int:
        return len(self.team)

    @property
    def r(self) -> int:
        return len(self.remaining)

    def block_index(self, u: int, v: int) -> int:
        """Row of product pair (candidate-side slot u, team-side slot v)."""
        return u * self.t + v


def prune_candidates(net: SocialNetwork, R: Sequence[int], pool: Sequence[int]):
    """Keep pool members with at least one positive edge into ``R``.

    Returns ``(candidates, fell_back)``; if nobody is adjacent the whole pool
    is returned and ``fell_back`` is True.
    """
    pool = np.unique(np.asarray(pool, dtype=np.intp))
    if len(R) == 0:
        raise ValueError("remaining team must be non-empty")
    adj = _neighbourhood(net, R)
    kept = np.intersect1d(pool, adj, assume_unique=True)
    if len(kept) == 0:
        return pool, True
    return kept, False


def _neighbourhood(net: SocialNetwork, nodes: Sequence[int]) -> np.ndarray:
    parts = [net.neighbors(int(v)) for v in nodes]
    if not parts:
        return np.zeros(0, dtype=np.intp)
    return np.unique(np.concatenate(parts))


def build_context(net: SocialNetwork, T: Sequence[int], R: Sequence[int],
                  W: SkillRelevance, params: KernelParams) -> KernelContext:
    T = tuple(int(v) for v in T)
    R = tuple(int(v) for v in R)
    t, r = len(T), len(R)
    if r + 1 > t:
        raise ValueError(f"|R| + 1 = {r + 1} exceeds team size {t}")
    if len(set(R)) != r:
        raise ValueError("duplicate member in remaining team")
    I, J, w = W.pairs()
    c = params.c
    G_T = extract_subgraph(net, T)
    G_R = extract_subgraph(net, R)
    Z = weighted_slices(G_T, I, J) * w[:, None, None]
    Y = weighted_slices(G_R, I, J)
    d = r * t
    P = len(w)
    MK = c * (Y.reshape(P, r * r).T @ Z.reshape(P, t * t))
    MK = MK.reshape(r, r, t, t).transpose(0, 2, 1, 3).reshape(d, d)
    row_sums = MK.sum(axis=1)
    if d and row_sums.max() >= 1.0:
        raise ConvergenceError(float(row_sums.max()))
    K = np.eye(d) - MK
    if d:
        eig = np.linalg.eigvalsh(K)
        if not eig[0] > 0 or eig[-1] > 1e14 * eig[0]:
            raise np.linalg.LinAlgError(
                "candidate-invariant block is numerically singular "
                f"(eigenvalues {eig[0]:.3g}..{eig[-1]:.3g})")
        K_inv = np.linalg.inv(K)
    else:
        K_inv = np.zeros((0, 0))
    ones = K_inv.sum(axis=1)
    return KernelContext(
        team=T, remaining=R, c=c, pairs_i=I, pairs_j=J, Z=Z,
        Z_flat=-c * Z.reshape(len(w), t * t), Y=Y,
        K_inv=K_inv, K_inv_ones=ones, K_inv_sum=float(ones.sum()),
        K_row_sums=row_sums, L_R=G_R.L,
        R_plus=np.array(R + (-1,), dtype=np.intp),
    )


def _couplings(ctx: KernelContext, net: SocialNetwork, q: int) -> np.ndarray:
    nodes = ctx.R_plus.copy()
    nodes[-1] = q
    a = net.weights_to(q, nodes)
    if a[-1] != 0:
        raise ValueError(f"candidate {q} has a self-loop; bottom-right block is not I")
    return a[:-1]


def coupling_block(ctx: KernelContext, net: SocialNetwork, q: int) -> np.ndarray:
    """``F = -c sum_k B_k kron Z_k`` with shape ``(r t, t)``."""
    q = int(q)
    a_Rq = _couplings(ctx, net, q)
    Lq = net.L[q]
    I, J = ctx.pairs_i, ctx.pairs_j
    B = np.maximum(ctx.L_R[:, I] * Lq[J], ctx.L_R[:, J] * Lq[I]) * a_Rq[:, None]
    return (B @ ctx.Z_flat).reshape(ctx.r * ctx.t, ctx.t)


def _check_candidate_bound(ctx: KernelContext, F: np.ndarray) -> None:
    top = ctx.K_row_sums - F.sum(axis=1)
    bottom = -F.sum(axis=0)
    ub = max(top.max(initial=0.0), bottom.max(initial=0.0))
    if ub >= 1.0:
        raise ConvergenceError(ub)


def _padded_score(ctx: KernelContext, total: float) -> float:
    t = ctx.t
    return (total + t * (t - ctx.r - 1)) / t ** 4


def evaluate_candidate(ctx: KernelContext, net: SocialNetwork, q: int, *,
                       assemble: bool = False) -> float:
    """Approximate-kernel score of ``R + [q]`` against ``G_T``.

    The sum of the full inverse is ``sum(K^-1) + (u - 1)^T S (u - 1)`` with
    ``u = F^T K^-1 1`` and ``S`` the inverse Schur complement; this is the
    four-block inverse contracted with uniform vectors. ``assemble=True``
    builds the four blocks explicitly instead.
    """
    q = int(q)
    if q in ctx.remaining:
        raise ValueError(f"candidate {q} is already in the remaining team")
    t = ctx.t
    F = coupling_block(ctx, net, q)
    _check_candidate_bound(ctx, F)
    KF = ctx.K_inv @ F
    schur = np.eye(t) - F.T @ KF
    # symmetric positive definite whenever the walk series converges
    eig = np.linalg.eigvalsh(schur)
    if not eig[0] > 0 or eig[-1] > SCHUR_COND_LIMIT * eig[0]:
        raise SchurSingularError(eig[-1] / eig[0] if eig[0] > 0 else np.inf)
    if assemble:
        S = np.linalg.inv(schur)
        top_left = ctx.K_inv + KF @ S @ KF.T
        top_right = -KF @ S
        bottom_left = -S @ KF.T
        M = np.block([[top_left, top_right], [bottom_left, S]])
        return _padded_score(ctx, float(M.sum()))
    u = F.T @ ctx.K_inv_ones - 1.0
    total = ctx.K_inv_sum + float(u @ np.linalg.solve(schur, u))
    return _padded_score(ctx, total)


def evaluate_candidates(ctx: KernelContext, net: SocialNetwork, qs, *,
                        chunk: int = 256) -> np.ndarray:
    """Vectorised :func:`evaluate_candidate` over an array of candidates.

    Entries whose Schur complement is numerically singular come back as NaN.
    """
    qs = np.asarray(qs, dtype=np.intp)
    if np.isin(qs, ctx.remaining).any():
        raise ValueError("a candidate is already in the remaining team")
    if np.any(net.A.diagonal()[qs] != 0):
        raise ValueError("a candidate has a self-loop; bottom-right block is not I")
    t, r = ctx.t, ctx.r
    I, J = ctx.pairs_i, ctx.pairs_j
    R = np.asarray(ctx.remaining, dtype=np.intp)
    out = np.empty(len(qs))
    for start in range(0, len(qs), chunk):
        q = qs[start:start + chunk]
        m = len(q)
        a = net.A[q][:, R].toarray()
        Lq = net.L[q]
        B = np.maximum(ctx.L_R[None, :, I] * Lq[:, None, J],
                       ctx.L_R[None, :, J] * Lq[:, None, I]) * a[:, :, None]
        F = (B @ ctx.Z_flat).reshape(m, r * t, t)
        top = ctx.K_row_sums[None, :] - F.sum(axis=2)
        bottom = -F.sum(axis=1)
        ub = max(top.max(initial=0.0), bottom.max(initial=0.0))
        if ub >= 1.0:
            raise ConvergenceError(ub)
        Ft = F.transpose(0, 2, 1)
        schur = np.eye(t) - Ft @ (ctx.K_inv @ F)
        eig = np.linalg.eigvalsh(schur)
        ok = (eig[:, 0] > 0) & (eig[:, -1] <= SCHUR_COND_LIMIT * eig[:, 0])
        u = Ft @ ctx.K_inv_ones - 1.0
        scores = np.full(m, np.nan)
        if ok.any():
            z = np.linalg.solve(schur[ok], u[ok][:, :, None])[:, :, 0]
            total = ctx.K_inv_sum + np.einsum("ij,ij->i", u[ok], z)
            scores[ok] = (total + t * (t - r - 1)) / t ** 4
        out[start:start + m] = scores
    return out


def direct_candidate_score(net: SocialNetwork, T, R, q, W, params) -> float:
    G_T = extract_subgraph(net, T)
    return approx_kernel(G_T, extract_subgraph(net, tuple(R) + (int(q),)), W, params)


def default_pool(net: SocialNetwork, T, R) -> np.ndarray:
    excluded = np.unique(np.asarray(tuple(T) + tuple(R), dtype=np.intp))
    return np.setdiff1d(np.arange(net.n), excluded, assume_unique=True)


@dataclass(frozen=True)
class BestCandidate:
    node: int
    score: float
    evaluations: int
    fell_back: bool


def best_candidate(net: SocialNetwork, T, R, W: SkillRelevance, params: KernelParams,
                   pool: Sequence[int] | None = None) -> BestCandidate:
    """Pruned argmax with evaluation accounting; ties go to the smaller index."""
    R = tuple(int(v) for v in R)
    excluded = set(T) | set(R)
    if pool is None:
        cand = np.setdiff1d(_neighbourhood(net, R),
                            np.fromiter(excluded, dtype=np.intp), assume_unique=False)
        fell_back = False
        if len(cand) == 0:
            cand, fell_back = default_pool(net, T, R), True
    else:
        pool = np.asarray([v for v in pool if int(v) not in excluded], dtype=np.intp)
        if len(pool) == 0:
            raise ValueError("candidate pool is empty")
        cand, fell_back = prune_candidates(net, R, pool)
    if len(cand) == 0:
        raise ValueError("candidate pool is empty")
    ctx = build_context(net, T, R, W, params)
    scores = evaluate_candidates(ctx, net, cand)
    for k in np.flatnonzero(np.isnan(scores)):
        q = int(cand[k])
        log.warning("candidate %d: singular Schur complement; using direct solve", q)
        scores[k] = direct_candidate_score(net, T, R, q, W, params)
    k = int(np.argmax(scores))
    return BestCandidate(int(cand[k]), float(scores[k]), len(cand), fell_back)


def fast_kernel_best(net: SocialNetwork, T, R, W: SkillRelevance, params: KernelParams,
                     pool: Sequence[int] | None = None) -> tuple[int, float]:
    """Best node to add to ``R`` and its approximate-kernel score against ``G_T``."""
    res = best_candidate(net, T, R, W, params, pool)
    return res.node, res.score
