"""Network file set: edges TSV, skills CSV, skill-relevance CSV."""

from __future__ import annotations

import csv
import logging
import warnings
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .network import SkillRelevance, SocialNetwork

log = logging.getLogger(__name__)

EDGES_FILE = "edges.tsv"
SKILLS_FILE = "skills.csv"
W_FILE = "W.csv"


class FormatError(ValueError):
    pass


def read_skills(path) -> tuple[list[str], list[str], np.ndarray]:
    """``id,skill_1,...`` CSV -> (ids, skill names, L)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty skills file") from None
        if not header or header[0] != "id" or len(header) < 2:
            raise FormatError(f"{path}: header must be 'id,skill_1,...'")
        ids, rows = [], []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(header):
                raise FormatError(f"{path}:{lineno}: expected {len(header)} fields")
            ids.append(row[0])
            try:
                rows.append([float(x) for x in row[1:]])
            except ValueError as err:
                raise FormatError(f"{path}:{lineno}: {err}") from None
    if not ids:
        raise FormatError(f"{path}: no nodes")
    return ids, header[1:], np.array(rows, dtype=float)


def read_edges(path, index: dict[str, int], n: int) -> sp.csr_array:
    """Undirected weighted edges; repeated pairs are summed."""
    rows, cols, vals = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise FormatError(f"{path}:{lineno}: expected src<TAB>dst<TAB>weight")
            a, b, w = parts
            try:
                u, v = index[a], index[b]
            except KeyError as err:
                raise FormatError(f"{path}:{lineno}: unknown node id {err.args[0]!r}") from None
            try:
                w = float(w)
            except ValueError:
                raise FormatError(f"{path}:{lineno}: bad weight {w!r}") from None
            if u == v:
                raise FormatError(f"{path}:{lineno}: self-loop on {a!r}")
            rows += [u, v]
            cols += [v, u]
            vals += [w, w]
    return sp.csr_array(sp.coo_array((vals, (rows, cols)), shape=(n, n)))


def read_skill_relevance(path, l: int | None = None) -> SkillRelevance:
    """``l x l`` CSV; a nonzero strict lower triangle is zeroed with a warning."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        W = np.array([[float(x) for x in r] for r in rows], dtype=float)
    except ValueError as err:
        raise FormatError(f"{path}: {err}") from None
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise FormatError(f"{path}: W must be square, got {len(rows)} rows")
    if l is not None and W.shape[0] != l:
        raise FormatError(f"{path}: W is {W.shape[0]}x{W.shape[0]} but there are {l} skills")
    lower = np.tril(W, k=-1)
    if np.any(lower != 0):
        warnings.warn(f"{path}: zeroing nonzero strict lower triangle of W", stacklevel=2)
        W = W - lower
    return SkillRelevance(W)


def read_network(edges, skills) -> SocialNetwork:
    ids, names, L = read_skills(skills)
    if len(set(ids)) != len(ids):
        raise FormatError(f"{skills}: duplicate node id")
    index = {x: i for i, x in enumerate(ids)}
    A = read_edges(edges, index, len(ids))
    return SocialNetwork(A, L, node_ids=ids, skill_names=names)


def _fmt(x: float) -> str:
    return repr(float(x))


def write_network(net: SocialNetwork, out_dir, W: SkillRelevance | None = None) -> dict[str, Path]:
    """Write ``edges.tsv``, ``skills.csv`` and optionally ``W.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"edges": out / EDGES_FILE, "skills": out / SKILLS_FILE}
    upper = sp.triu(net.A, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    with open(paths["edges"], "w", encoding="utf-8", newline="") as fh:
        for k in order:
            i, j, w = upper.row[k], upper.col[k], upper.data[k]
            fh.write(f"{net.node_ids[i]}\t{net.node_ids[j]}\t{_fmt(w)}\n")
    with open(paths["skills"], "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", *net.skill_names])
        for i, name in enumerate(net.node_ids):
            writer.writerow([name, *(_fmt(x) for x in net.L[i])])
    if W is not None:
        paths["W"] = out / W_FILE
        write_skill_relevance(W, paths["W"])
    return paths


def write_skill_relevance(W: SkillRelevance, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in W.W:
            writer.writerow([_fmt(x) for x in row])
