"""Feature extraction: PCA and Isomap.

Isomap replaces Euclidean distances with shortest-path geodesics over a
symmetrized k-nearest-neighbor graph, then embeds them by classical MDS
(double-centering, top eigenpairs, coordinates scaled by sqrt(eigenvalue)).
"""

import heapq
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DisconnectedNeighborGraph, RankDeficientWarning


@dataclass
class PcaModel:
    means: np.ndarray
    components: np.ndarray      # (n_comps, d), orthonormal rows
    eigenvalues: np.ndarray     # all covariance eigenvalues, descending


@dataclass
class IsomapModel:
    n_neighbors: int
    n_comps: int
    edges: list[tuple[int, int]]
    geodesics: np.ndarray       # (n, n), symmetric, zero diagonal
    embedding: np.ndarray       # (n, n_comps)
    eigenvalues: np.ndarray
    bridged_links: list[tuple[int, int]] = field(default_factory=list)


def _as_array(m) -> np.ndarray:
    values = getattr(m, "values", m)
    return np.asarray(values, dtype=float)


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Deterministic sign per column: the largest-magnitude entry is positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        pivot = int(np.argmax(np.abs(col)))
        if col[pivot] < 0:
            out[:, j] = -col
    return out


def pca_fit_transform(m, n_comps: int) -> tuple[np.ndarray, PcaModel]:
    """Project rows onto the top principal directions of the centered data."""
    x = _as_array(m)
    n, d = x.shape
    if not 1 <= n_comps <= min(n, d):
        raise ValueError(f"n_comps must be in [1, {min(n, d)}], got {n_comps}")
    means = x.mean(axis=0)
    xc = x - means
    u, s, vt = np.linalg.svd(xc, full_matrices=False)
    eigenvalues = s ** 2 / max(n - 1, 1)
    tol = s.max(initial=0.0) * max(n, d) * np.finfo(float).eps
    rank = int(np.sum(s > tol))
    if n_comps > rank:
        warnings.warn(
            f"requested {n_comps} components but numerical rank is {rank}",
            RankDeficientWarning)
    components = _fix_signs(vt[:n_comps].T).T
    reduced = xc @ components.T
    return reduced, PcaModel(means=means, components=components,
                             eigenvalues=eigenvalues)


def pca_inverse(model: PcaModel, reduced: np.ndarray) -> np.ndarray:
    return reduced @ model.components + model.means


def _knn_edges(dist: np.ndarray, k: int) -> set[tuple[int, int]]:
    """Union-symmetrized k-NN edge set; distance ties resolved by index order."""
    n = len(dist)
    edges: set[tuple[int, int]] = set()
    for i in range(n):
        order = np.argsort(dist[i], kind="stable")
        picked = 0
        for j in order:
            if j == i:
                continue
            edges.add((min(i, int(j)), max(i, int(j))))
            picked += 1
            if picked == k:
                break
    return edges


def _graph_components(n: int, adj: list[list[tuple[int, float]]]) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for start in range(n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def _dijkstra_all(n: int, adj: list[list[tuple[int, float]]]) -> np.ndarray:
    geo = np.full((n, n), np.inf)
    for s in range(n):
        dist = geo[s]
        dist[s] = 0.0
        done = [False] * n
        heap = [(0.0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            for v, ln in adj[u]:
                nd = d + ln
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return geo


def classical_mds(dist: np.ndarray, n_comps: int) -> tuple[np.ndarray, np.ndarray]:
    """Embed a distance matrix: eigenpairs of the double-centered -D^2/2.

    Negative eigenvalues (non-Euclidean distances) are clamped to zero with a
    warning when they land inside the requested components.
    """
    n = len(dist)
    d2 = np.asarray(dist, dtype=float) ** 2
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * j @ d2 @ j
    b = (b + b.T) / 2.0
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]
    top = evals[:n_comps]
    if np.any(top < 0):
        warnings.warn(
            f"{int(np.sum(top < 0))} negative MDS eigenvalues clamped to zero")
    clamped = np.maximum(top, 0.0)
    embedding = _fix_signs(evecs[:, :n_comps]) * np.sqrt(clamped)
    return embedding, evals


def isomap_embed(m, n_neighbors: int, n_comps: int,
                 bridge: bool = False) -> tuple[np.ndarray, IsomapModel]:
    """k-NN graph geodesics followed by classical MDS.

    With bridge=False a disconnected neighbor graph raises
    DisconnectedNeighborGraph (listing the components); with bridge=True the
    shortest inter-component Euclidean link is added repeatedly until the
    graph connects, and those links are recorded on the model.
    """
    x = _as_array(m)
    n = len(x)
    if n_neighbors < 2 or n_comps < 2:
        raise ValueError("need n_neighbors >= 2 and n_comps >= 2")
    if n <= n_neighbors:
        raise ValueError(f"need more rows ({n}) than neighbors ({n_neighbors})")
    if n_comps > n:
        raise ValueError(f"n_comps {n_comps} exceeds number of rows {n}")
    diff = x[:, None, :] - x[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=2))
    edges = _knn_edges(dist, n_neighbors)
    bridged: list[tuple[int, int]] = []

    def build_adj():
        adj: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for a, b in edges:
            w = float(dist[a, b])
            adj[a].append((b, w))
            adj[b].append((a, w))
        return adj

    adj = build_adj()
    comps = _graph_components(n, adj)
    if len(comps) > 1 and not bridge:
        raise DisconnectedNeighborGraph(comps)
    while len(comps) > 1:
        # global shortest Euclidean link between any two components
        best = None
        for ci in range(len(comps)):
            for cj in range(ci + 1, len(comps)):
                block = dist[np.ix_(comps[ci], comps[cj])]
                flat = int(np.argmin(block))
                a = comps[ci][flat // block.shape[1]]
                b = comps[cj][flat % block.shape[1]]
                if best is None or dist[a, b] < best[0]:
                    best = (float(dist[a, b]), min(a, b), max(a, b))
        _, a, b = best
        edges.add((a, b))
        bridged.append((a, b))
        adj = build_adj()
        comps = _graph_components(n, adj)
    geo = _dijkstra_all(n, adj)
    embedding, evals = classical_mds(geo, n_comps)
    model = IsomapModel(n_neighbors=n_neighbors, n_comps=n_comps,
                        edges=sorted(edges), geodesics=geo,
                        embedding=embedding, eigenvalues=evals,
                        bridged_links=bridged)
    return embedding, model


@dataclass
class SweepResult:
    scores: dict[tuple[int, int], float | None]   # (n_neighbors, n_comps)
    best: tuple[float, int, int] | None           # (score, n_neighbors, n_comps)

    def to_dict(self) -> dict:
        cells = [
            {"n_neighbors": nn, "n_comps": nc, "score": sc}
            for (nn, nc), sc in sorted(self.scores.items())
        ]
        best = None
        if self.best is not None:
            score, nn, nc = self.best
            best = {"score": score, "n_neighbors": nn, "n_comps": nc}
        return {"cells": cells, "best": best}


def parameter_sweep(m, scorer, lo: int = 2, hi: int = 15,
                    bridge: bool = False) -> SweepResult:
    """Grid of CV scores over (n_neighbors, n_comps) in [lo, hi].

    `scorer(embedding)` returns the success rate for one cell.  Cells whose
    neighbor graph is disconnected are recorded as None.  The best cell is the
    highest score, ties broken by smallest n_comps then smallest n_neighbors.
    """
    x = _as_array(m)
    n = len(x)
    scores: dict[tuple[int, int], float | None] = {}
    best = None
    for nn in range(lo, hi + 1):
        for nc in range(lo, hi + 1):
            if nn >= n or nc > n:
                scores[(nn, nc)] = None
                continue
            try:
                embedding, _ = isomap_embed(x, nn, nc, bridge=bridge)
            except DisconnectedNeighborGraph:
                scores[(nn, nc)] = None
                continue
            sc = scorer(embedding)
            scores[(nn, nc)] = sc
            if best is None or (sc, -nc, -nn) > (best[0], -best[2], -best[1]):
                best = (sc, nn, nc)
    return SweepResult(scores=scores, best=best)


def export_2d(embedding: np.ndarray, rows: list[tuple[str, str]]) -> list[tuple]:
    """(x, y, author, book) rows from the first two embedding coordinates."""
    if embedding.shape[1] < 2:
        raise ValueError("need an embedding with at least 2 components")
    return [
        (float(embedding[i, 0]), float(embedding[i, 1]), author, doc)
        for i, (author, doc) in enumerate(rows)
    ]


def write_embedding_csv(embedding: np.ndarray, rows: list[tuple[str, str]],
                        path) -> None:
    from pathlib import Path
    n_comps = embedding.shape[1]
    header = "author,book," + ",".join(f"dim{i + 1}" for i in range(n_comps))
    lines = [header + "\n"]
    for (author, doc), coords in zip(rows, embedding):
        lines.append(f"{author},{doc}," + ",".join(repr(float(c)) for c in coords) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8")
