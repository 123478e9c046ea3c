"""Network, team and problem data model.

Internal math uses dense 0-based node positions. External identifiers are
strings kept on the network for I/O only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def add(self, message: str) -> None:
        self.violations.append(message)

    def __str__(self) -> str:
        if self.ok:
            return "pass"
        return "; ".join(self.violations)


class SocialNetwork:
    """Weighted undirected network with a non-negative skill matrix.

    Parameters
    ----------
    A : array_like or sparse matrix, shape (n, n)
        Symmetric non-negative edge weights. Stored as CSR.
    L : array_like, shape (n, l)
        Non-negative skill proficiencies.
    node_ids : sequence of str, optional
        External identifiers; defaults to ``"0", "1", ...``.
    skill_names : sequence of str, optional
    """

    def __init__(self, A, L, node_ids: Sequence[str] | None = None,
                 skill_names: Sequence[str] | None = None):
        A = sp.csr_array(A, dtype=float)
        A.sum_duplicates()
        A.sort_indices()
        L = np.array(L, dtype=float)
        if L.ndim == 1:
            L = L[:, None]
        if A.shape[0] != A.shape[1]:
            raise ValueError(f"adjacency must be square, got {A.shape}")
        if L.ndim != 2 or L.shape[0] != A.shape[0]:
            raise ValueError(
                f"skill matrix has {L.shape[0]} rows for {A.shape[0]} nodes")
        n, l = L.shape
        if node_ids is None:
            node_ids = [str(i) for i in range(n)]
        node_ids = tuple(str(x) for x in node_ids)
        if len(node_ids) != n:
            raise ValueError("node_ids length does not match node count")
        if len(set(node_ids)) != n:
            raise ValueError("node_ids must be unique")
        if skill_names is None:
            skill_names = [f"skill_{i + 1}" for i in range(l)]
        skill_names = tuple(str(x) for x in skill_names)
        if len(skill_names) != l:
            raise ValueError("skill_names length does not match skill count")
        L.flags.writeable = False
        self._A = A
        self._L = L
        self.node_ids = node_ids
        self.skill_names = skill_names
        self._pos = {name: i for i, name in enumerate(node_ids)}

    @property
    def A(self) -> sp.csr_array:
        return self._A

    @property
    def L(self) -> np.ndarray:
        return self._L

    @property
    def n(self) -> int:
        return self._L.shape[0]

    @property
    def l(self) -> int:
        return self._L.shape[1]

    @property
    def num_edges(self) -> int:
        upper = sp.triu(self._A, k=1)
        return int(np.count_nonzero(upper.data))

    @property
    def density(self) -> float:
        n = self.n
        return 0.0 if n < 2 else self.num_edges / (n * (n - 1) / 2)

    def index_of(self, node_id: str) -> int:
        try:
            return self._pos[str(node_id)]
        except KeyError:
            raise KeyError(f"unknown node id {node_id!r}") from None

    def indices_of(self, node_ids: Sequence[str]) -> list[int]:
        return [self.index_of(x) for x in node_ids]

    def neighbors(self, i: int) -> np.ndarray:
        """Positive-weight neighbours of node ``i`` in ascending order."""
        lo, hi = self._A.indptr[i], self._A.indptr[i + 1]
        ind = self._A.indices[lo:hi]
        return ind[self._A.data[lo:hi] > 0]

    def weights_to(self, q: int, nodes: np.ndarray) -> np.ndarray:
        """Dense vector ``A[q, nodes]``; cost depends on deg(q), not n."""
        nodes = np.asarray(nodes, dtype=np.intp)
        out = np.zeros(len(nodes))
        if len(nodes) == 0:
            return out
        lo, hi = self._A.indptr[q], self._A.indptr[q + 1]
        ind = self._A.indices[lo:hi]
        data = self._A.data[lo:hi]
        order = np.argsort(nodes, kind="stable")
        sorted_nodes = nodes[order]
        pos = np.searchsorted(sorted_nodes, ind)
        pos = np.minimum(pos, len(nodes) - 1)
        hit = sorted_nodes[pos] == ind
        out[order[pos[hit]]] = data[hit]
        return out

    def __repr__(self) -> str:
        return f"SocialNetwork(n={self.n}, l={self.l}, m={self.num_edges})"


@dataclass(frozen=True)
class SkillRelevance:
    """Upper-triangular non-negative ``l x l`` skill pair weights."""

    W: np.ndarray

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError(f"W must be square, got shape {W.shape}")
        W.flags.writeable = False
        object.__setattr__(self, "W", W)

    @classmethod
    def ones_upper(cls, l: int) -> "SkillRelevance":
        return cls(np.triu(np.ones((l, l))))

    @property
    def l(self) -> int:
        return self.W.shape[0]

    def pairs(self):
        """Row-major ``(i, j, weight)`` arrays for entries with i <= j and W > 0."""
        I, J = np.nonzero(np.triu(self.W) > 0)
        return I, J, self.W[I, J]

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        W = self.W
        if not np.all(np.isfinite(W)):
            for i, j in zip(*np.nonzero(~np.isfinite(W))):
                rep.add(f"non-finite value at ({i},{j})")
            return rep
        for i, j in zip(*np.nonzero(W < 0)):
            rep.add(f"negative entry at ({i},{j})")
        for i, j in zip(*np.nonzero(np.tril(W, k=-1) != 0)):
            rep.add(f"lower-triangle entry at ({i},{j})")
        if not np.any(W > 0):
            rep.add("no positive entry")
        return rep


@dataclass(frozen=True)
class ReplacementProblem:
    """A team, the unavailable subteam, and the network size.

    ``remaining`` keeps the team's order. ``pool`` overrides the default
    candidate set ``V \\ T`` when given.
    """

    team: tuple[int, ...]
    subteam: tuple[int, ...]
    n: int
    pool: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "team", tuple(int(x) for x in self.team))
        object.__setattr__(self, "subteam", tuple(int(x) for x in self.subteam))
        if self.pool is not None:
            object.__setattr__(self, "pool", tuple(sorted(int(x) for x in self.pool)))

    @classmethod
    def from_ids(cls, net: SocialNetwork, team: Sequence[str],
                 subteam: Sequence[str]) -> "ReplacementProblem":
        return cls(tuple(net.indices_of(team)), tuple(net.indices_of(subteam)), net.n)

    @property
    def t(self) -> int:
        return len(self.team)

    @property
    def s(self) -> int:
        return len(self.subteam)

    @property
    def remaining(self) -> tuple[int, ...]:
        gone = set(self.subteam)
        return tuple(v for v in self.team if v not in gone)

    @property
    def candidates(self) -> tuple[int, ...]:
        if self.pool is not None:
            return self.pool
        members = set(self.team)
        return tuple(v for v in range(self.n) if v not in members)


@dataclass(frozen=True)
class TeamSubgraph:
    """Dense induced subgraph ``{A[idx, idx], L[idx, :]}``.

    ``index_map[k]`` is the network position of row ``k``; ``None`` marks a
    dummy node (no edges, zero skills).
    """

    A: np.ndarray
    L: np.ndarray
    index_map: tuple

    @property
    def size(self) -> int:
        return self.A.shape[0]

    def padded(self, size: int) -> "TeamSubgraph":
        """Append isolated zero-skill dummy nodes up to ``size``."""
        k = size - self.size
        if k < 0:
            raise ValueError(f"cannot pad a {self.size}-node graph down to {size}")
        if k == 0:
            return self
        A = np.zeros((size, size))
        A[:self.size, :self.size] = self.A
        L = np.zeros((size, self.L.shape[1]))
        L[:self.size] = self.L
        return TeamSubgraph(A, L, self.index_map + (None,) * k)


def validate_network(net: SocialNetwork) -> ValidationReport:
    rep = ValidationReport()
    A = net.A
    if net.n < 1:
        rep.add("empty network")
    if net.l < 1:
        rep.add("no skills")
    if not np.all(np.isfinite(A.data)):
        rows = np.repeat(np.arange(net.n), np.diff(A.indptr))
        bad = ~np.isfinite(A.data)
        for i, j in zip(rows[bad], A.indices[bad]):
            rep.add(f"non-finite edge weight at ({i},{j})")
    if not np.all(np.isfinite(net.L)):
        for i, j in zip(*np.nonzero(~np.isfinite(net.L))):
            rep.add(f"non-finite skill at ({i},{j})")
    coo = A.tocoo()
    for i, j in zip(coo.row[coo.data < 0], coo.col[coo.data < 0]):
        rep.add(f"negative edge weight at ({i},{j})")
    for i, j in zip(*np.nonzero(net.L < 0)):
        rep.add(f"negative skill at ({i},{j})")
    diag = A.diagonal()
    for i in np.nonzero(diag != 0)[0]:
        rep.add(f"nonzero diagonal at {i}")
    asym = (A - A.T).tocoo()
    seen = set()
    for i, j, d in zip(asym.row, asym.col, asym.data):
        if d != 0 and np.isfinite(d):
            key = (min(i, j), max(i, j))
            if key not in seen:
                seen.add(key)
                rep.add(f"asymmetric at ({key[0]},{key[1]})")
    return rep


def _check_indices(n: int, idx) -> np.ndarray:
    idx = np.asarray(idx, dtype=np.intp).reshape(-1)
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise IndexError(f"node index out of range [0, {n})")
    if len(np.unique(idx)) != len(idx):
        raise ValueError("duplicate node index")
    return idx


def extract_subgraph(net: SocialNetwork, idx) -> TeamSubgraph:
    idx = _check_indices(net.n, idx)
    A_sub = net.A[idx][:, idx].toarray() if len(idx) else np.zeros((0, 0))
    return TeamSubgraph(A_sub, net.L[idx].copy(), tuple(int(i) for i in idx))


def validate_problem(net: SocialNetwork, prob: ReplacementProblem) -> ValidationReport:
    rep = ValidationReport()
    T, S = prob.team, prob.subteam
    if prob.n != net.n:
        rep.add(f"problem built for n={prob.n}, network has n={net.n}")
    if len(set(T)) != len(T):
        rep.add("duplicate member in team")
    if len(set(S)) != len(S):
        rep.add("duplicate member in subteam")
    if any(v < 0 or v >= net.n for v in T):
        rep.add("team member outside the network")
    if not set(S) <= set(T):
        rep.add("subteam is not a subset of the team")
    t, s = len(set(T)), len(set(S))
    if not 1 <= s <= t - 1:
        rep.add(f"constraint (1) violated: need 1 <= |S| <= |T| - 1, got |S|={s}, |T|={t}")
    if net.n - t < s:
        rep.add(f"constraint (2) violated: need n - |T| >= |S|, got n={net.n}, |T|={t}, |S|={s}")
    if prob.pool is not None:
        if set(prob.pool) & set(T):
            rep.add("candidate pool overlaps the team")
        if len(prob.pool) < s:
            rep.add(f"candidate pool has {len(prob.pool)} nodes, need {s}")
        if any(v < 0 or v >= net.n for v in prob.pool):
            rep.add("pool node outside the network")
    return rep
