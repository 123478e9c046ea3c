"""Synthetic and record-built networks, plus team and subteam sampling."""

from __future__ import annotations

import json
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import networkx as nx
import numpy as np
import scipy.sparse as sp

from .network import SocialNetwork

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class BAConfig:
    """Barabasi-Albert network with exponential skills and edge weights.

    ``rate`` is the exponential rate (mean ``1 / rate``). ``seed_graph`` picks
    the starting graph: ``"complete"`` on ``attach`` nodes, or ``"star"`` on
    ``attach + 1`` nodes (the classic construction; 141 edges at n=50).
    """

    n: int = 50
    attach: int = 3
    l: int = 6
    rate: float = 1.0
    seed: int = 0
    seed_graph: str = "complete"

    def __post_init__(self):
        if not self.n > self.attach >= 1:
            raise ValueError(f"need n > attach >= 1, got n={self.n}, attach={self.attach}")
        if self.seed_graph == "star" and self.attach + 1 > self.n:
            raise ValueError("star seed graph needs n >= attach + 1")
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate}")
        if self.l < 1:
            raise ValueError(f"need at least one skill, got l={self.l}")
        if self.seed_graph not in ("complete", "star"):
            raise ValueError(f"unknown seed_graph {self.seed_graph!r}")


def generate_ba(cfg: BAConfig) -> SocialNetwork:
    """Preferential attachment; each new node links to ``attach`` distinct nodes.

    Skills are drawn first, row by row, then one weight per edge as it is
    created.
    """
    rng = np.random.default_rng(cfg.seed)
    scale = 1.0 / cfg.rate
    n, m = cfg.n, cfg.attach
    L = rng.exponential(scale, size=(n, cfg.l))
    rows, cols, weights = [], [], []
    degree = np.zeros(n)

    def link(u, v):
        rows.append(u)
        cols.append(v)
        weights.append(rng.exponential(scale))
        degree[u] += 1
        degree[v] += 1

    if cfg.seed_graph == "complete":
        start = m
        for u in range(m):
            for v in range(u + 1, m):
                link(u, v)
    else:
        start = m + 1
        for v in range(1, m + 1):
            link(0, v)
    for new in range(start, n):
        deg = degree[:new]
        total = deg.sum()
        p = deg / total if total > 0 else None
        targets = rng.choice(new, size=m, replace=False, p=p)
        for v in sorted(int(x) for x in targets):
            link(v, new)
    A = sp.coo_array((weights, (rows, cols)), shape=(n, n))
    A = A + A.T
    return SocialNetwork(A, L)


@dataclass
class CollabRecord:
    members: list[str]
    tags: list[str]
    year: int = 0
    weight: float = 1.0

    @classmethod
    def from_json(cls, obj: dict) -> "CollabRecord":
        members = obj["members"]
        tags = obj["tags"]
        if not isinstance(members, list) or not all(isinstance(m, str) for m in members):
            raise ValueError("members must be a list of strings")
        if not isinstance(tags, list) or not all(isinstance(x, str) for x in tags):
            raise ValueError("tags must be a list of strings")
        if not members or not tags:
            raise ValueError("members and tags must be non-empty")
        year = obj["year"]
        if isinstance(year, bool) or not isinstance(year, int):
            raise ValueError("year must be an integer")
        weight = obj.get("weight", 1)
        if isinstance(weight, bool) or not isinstance(weight, (int, float)) or weight < 0:
            raise ValueError("weight must be a non-negative number")
        return cls(members, tags, year, float(weight))

    def to_json(self) -> dict:
        out = {"members": self.members, "tags": self.tags, "year": self.year}
        if self.weight != 1.0:
            out["weight"] = self.weight
        return out


@dataclass
class IngestStats:
    records: int = 0
    skipped: int = 0
    errors: list[str] = field(default_factory=list)


def read_records(path, stats: IngestStats | None = None) -> Iterator[CollabRecord]:
    """Stream records from a JSON-lines file; malformed lines are skipped and counted."""
    stats = stats if stats is not None else IngestStats()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = CollabRecord.from_json(json.loads(line))
            except (ValueError, KeyError, TypeError) as err:
                stats.skipped += 1
                stats.errors.append(f"line {lineno}: {err}")
                continue
            yield rec


def write_records(path, records: Iterable[CollabRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")


def ingest_records(records: Iterable, skill_mode: str = "count", base: float = 0.95,
                   stats: IngestStats | None = None) -> SocialNetwork:
    """Co-membership network from collaboration records.

    Nodes are the distinct members and skills the distinct tags, both sorted,
    so the result does not depend on record order. Edge weight is the sum of
    record weights over shared records. ``count`` adds 1 per record per tag;
    ``decay`` adds ``base ** (k - 1)`` for the member listed k-th.
    """
    if skill_mode not in ("count", "decay"):
        raise ValueError(f"unknown skill mode {skill_mode!r}")
    if skill_mode == "decay" and not 0 < base <= 1:
        raise ValueError(f"decay base must be in (0, 1], got {base}")
    stats = stats if stats is not None else IngestStats()
    edge_terms: dict[tuple[str, str], list[float]] = defaultdict(list)
    skill_terms: dict[tuple[str, str], list[float]] = defaultdict(list)
    members_seen: set[str] = set()
    tags_seen: set[str] = set()
    for raw in records:
        try:
            rec = raw if isinstance(raw, CollabRecord) else CollabRecord.from_json(raw)
            if not rec.members or not rec.tags:
                raise ValueError("members and tags must be non-empty")
        except (ValueError, KeyError, TypeError) as err:
            stats.skipped += 1
            stats.errors.append(str(err))
            continue
        stats.records += 1
        members = list(dict.fromkeys(rec.members))
        tags = sorted(set(rec.tags))
        members_seen.update(members)
        tags_seen.update(tags)
        for k, person in enumerate(members):
            points = 1.0 if skill_mode == "count" else base ** k
            for tag in tags:
                skill_terms[person, tag].append(points)
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                u, v = sorted((members[a], members[b]))
                edge_terms[u, v].append(rec.weight)
    if stats.skipped:
        log.warning("skipped %d malformed record(s)", stats.skipped)
    if not stats.records:
        raise ValueError("no valid records to ingest")
    ids = sorted(members_seen)
    skills = sorted(tags_seen)
    pos = {x: i for i, x in enumerate(ids)}
    spos = {x: i for i, x in enumerate(skills)}
    L = np.zeros((len(ids), len(skills)))
    for (person, tag), pts in skill_terms.items():
        L[pos[person], spos[tag]] = math.fsum(pts)
    rows, cols, vals = [], [], []
    for (u, v), ws in edge_terms.items():
        w = math.fsum(ws)
        if w > 0:
            rows += [pos[u], pos[v]]
            cols += [pos[v], pos[u]]
            vals += [w, w]
    A = sp.coo_array((vals, (rows, cols)), shape=(len(ids), len(ids)))
    return SocialNetwork(A, L, node_ids=ids, skill_names=skills)


def filter_records(records: Iterable[CollabRecord], years: tuple[int, int] | None = None,
                   tags: Iterable[str] | None = None) -> Iterator[CollabRecord]:
    """Keep records within an inclusive year range and/or carrying any of ``tags``."""
    wanted = set(tags) if tags is not None else None
    for rec in records:
        if years is not None and not years[0] <= rec.year <= years[1]:
            continue
        if wanted is not None and not wanted.intersection(rec.tags):
            continue
        yield rec


def _is_connected(net: SocialNetwork, nodes) -> bool:
    nodes = list(nodes)
    if len(nodes) <= 1:
        return True
    members = set(nodes)
    seen = {nodes[0]}
    stack = [nodes[0]]
    while stack:
        u = stack.pop()
        for v in net.neighbors(u):
            v = int(v)
            if v in members and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(members)


def sample_team(net: SocialNetwork, t: int, mode: str = "connected_subgraph", seed=None,
                max_tries: int = 200) -> tuple[int, ...]:
    """Random team of ``t`` nodes.

    ``connected_subgraph`` grows a random walk until it has visited ``t``
    distinct nodes, restarting on a fresh node if the walk stalls.
    ``clique`` draws a maximal clique of size >= t uniformly, then a uniform
    size-t subset of it.
    """
    if not 1 <= t <= net.n:
        raise ValueError(f"team size {t} out of range for n={net.n}")
    rng = np.random.default_rng(seed)
    if mode == "connected_subgraph":
        if t == 1:
            return (int(rng.integers(net.n)),)
        steps = 50 * t
        for _ in range(max_tries):
            u = int(rng.integers(net.n))
            visited = [u]
            seen = {u}
            for _ in range(steps):
                nbrs = net.neighbors(u)
                if len(nbrs) == 0:
                    break
                u = int(nbrs[rng.integers(len(nbrs))])
                if u not in seen:
                    seen.add(u)
                    visited.append(u)
                    if len(visited) == t:
                        return tuple(visited)
        raise ValueError(
            f"no connected team of size {t} found after {max_tries} random walks")
    if mode == "clique":
        G = nx.from_scipy_sparse_array(net.A)
        cliques = sorted(sorted(c) for c in nx.find_cliques(G) if len(c) >= t)
        if not cliques:
            sizes = [len(c) for c in nx.find_cliques(G)]
            raise ValueError(
                f"no clique of size {t}; largest maximal clique has {max(sizes, default=0)} nodes")
        clique = cliques[int(rng.integers(len(cliques)))]
        picked = rng.choice(len(clique), size=t, replace=False)
        return tuple(int(clique[i]) for i in sorted(picked))
    raise ValueError(f"unknown team mode {mode!r}")


def sample_subteam(team, s: int, seed=None) -> tuple[int, ...]:
    """Uniform size-``s`` subset of ``team``, in team order."""
    team = tuple(int(v) for v in team)
    if not 1 <= s <= len(team) - 1:
        raise ValueError(f"need 1 <= s <= |team| - 1, got s={s}, |team|={len(team)}")
    rng = np.random.default_rng(seed)
    picked = set(int(i) for i in rng.choice(len(team), size=s, replace=False))
    return tuple(v for k, v in enumerate(team) if k in picked)


def network_summary(net: SocialNetwork) -> dict:
    return {"n": net.n, "m": net.num_edges, "density": net.density, "l": net.l}
