"""The twelve global topological measurements of a partition network.

Distance and triangle metrics run on a simple undirected projection of the
directed network (edge present iff either direction is, weights summed);
degree uses the directed edge count; intermittency reads token positions from
the partition itself.  Disconnected graphs restrict diameter, radius and mean
shortest path to the largest connected component so the series stay finite.
"""

import heapq
import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .errors import CliqueBudgetExceeded
from .netbuild import CooccurrenceNetwork, Partition

METRIC_NAMES = ("C", "D", "R", "Cq", "L", "T", "B", "S", "K", "I", "N", "E")

DEFAULT_CLIQUE_CAP = 1_000_000


@dataclass(frozen=True)
class NetworkMetrics:
    clustering: float       # C
    diameter: float         # D
    radius: float           # R
    cliques: int            # Cq
    load: float             # L
    transitivity: float     # T
    betweenness: float      # B
    shortest_path: float    # S
    degree: float           # K
    intermittency: float    # I
    nodes: int              # N
    edges: int              # E

    def as_row(self) -> list[float]:
        return [self.clustering, self.diameter, self.radius, float(self.cliques),
                self.load, self.transitivity, self.betweenness,
                self.shortest_path, self.degree, self.intermittency,
                float(self.nodes), float(self.edges)]


class UndirectedView:
    """Simple undirected projection of a directed network.

    An undirected edge exists iff at least one direction does; its weight is
    the sum of both directions.  No self-loops by construction upstream.
    """

    def __init__(self, net: CooccurrenceNetwork):
        self.n = net.n_nodes
        weights: dict[tuple[int, int], int] = {}
        for (s, d), w in net.edges.items():
            key = (s, d) if s < d else (d, s)
            weights[key] = weights.get(key, 0) + w
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in weights:
            adj[a].append(b)
            adj[b].append(a)
        for lst in adj:
            lst.sort()
        self.adj = adj
        self.weights = weights
        self.adjsets = [set(lst) for lst in adj]


def _components(view: UndirectedView) -> list[list[int]]:
    seen = [False] * view.n
    comps: list[list[int]] = []
    for start in range(view.n):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v in view.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        comps.append(comp)
    return comps


def largest_component(view: UndirectedView) -> list[int]:
    """Largest component; ties broken by smallest member id."""
    comps = _components(view)
    return max(comps, key=lambda c: (len(c), -min(c)))


def _unit_brandes(view: UndirectedView):
    """One BFS sweep per source: Brandes betweenness accumulation plus the
    per-source distance stats (eccentricity, distance sum, reach count)."""
    n = view.n
    adj = view.adj
    betw = [0.0] * n
    ecc = [0] * n
    dist_sum = [0] * n
    reach = [0] * n
    for s in range(n):
        dist = [-1] * n
        sigma = [0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1
        order: list[int] = []
        queue = deque([s])
        while queue:
            u = queue.popleft()
            order.append(u)
            du1 = dist[u] + 1
            su = sigma[u]
            for v in adj[u]:
                if dist[v] < 0:
                    dist[v] = du1
                    queue.append(v)
                if dist[v] == du1:
                    sigma[v] += su
                    preds[v].append(u)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                betw[w] += delta[w]
        ecc[s] = dist[order[-1]]
        dist_sum[s] = sum(dist[u] for u in order)
        reach[s] = len(order)
    # each unordered pair was visited from both endpoints
    betw = [b / 2.0 for b in betw]
    return betw, ecc, dist_sum, reach


def _weighted_brandes(view: UndirectedView) -> list[float]:
    """Brandes accumulation with edge length 1/weight (heavier ties are closer).

    Lengths are scaled by the lcm of all weights so Dijkstra runs on exact
    integers; shortest-path ties are then counted exactly, not within a float
    tolerance.
    """
    n = view.n
    if not view.weights:
        return [0.0] * n
    scale = math.lcm(*view.weights.values())
    length: dict[tuple[int, int], int] = {
        e: scale // w for e, w in view.weights.items()}
    adj_len: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (a, b), ln in length.items():
        adj_len[a].append((b, ln))
        adj_len[b].append((a, ln))
    betw = [0.0] * n
    inf = None
    for s in range(n):
        dist: list[int | None] = [inf] * n
        sigma = [0] * n
        preds: list[list[int]] = [[] for _ in range(n)]
        dist[s] = 0
        sigma[s] = 1
        done = [False] * n
        order: list[int] = []
        heap: list[tuple[int, int]] = [(0, s)]
        while heap:
            d, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            order.append(u)
            su = sigma[u]
            for v, ln in adj_len[u]:
                nd = d + ln
                dv = dist[v]
                if dv is None or nd < dv:
                    dist[v] = nd
                    sigma[v] = su
                    preds[v] = [u]
                    heapq.heappush(heap, (nd, v))
                elif nd == dv and not done[v]:
                    sigma[v] += su
                    preds[v].append(u)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                betw[w] += delta[w]
    return [b / 2.0 for b in betw]


def _pair_norm(n: int) -> float:
    return (n - 1) * (n - 2) / 2.0 if n > 2 else 0.0


def _triangle_counts(view: UndirectedView) -> list[int]:
    tri = [0] * view.n
    adjsets = view.adjsets
    for v in range(view.n):
        nv = adjsets[v]
        if len(nv) < 2:
            continue
        tri[v] = sum(len(adjsets[a] & nv) for a in nv) // 2
    return tri


def avg_clustering(net: CooccurrenceNetwork, view: UndirectedView | None = None) -> float:
    view = view or UndirectedView(net)
    tri = _triangle_counts(view)
    total = 0.0
    for v in range(view.n):
        deg = len(view.adj[v])
        if deg >= 2:
            total += tri[v] / (deg * (deg - 1) / 2.0)
    return total / view.n


def transitivity(net: CooccurrenceNetwork, view: UndirectedView | None = None) -> float:
    view = view or UndirectedView(net)
    tri = _triangle_counts(view)
    triads = sum(len(a) * (len(a) - 1) // 2 for a in view.adj)
    if triads == 0:
        return 0.0
    return sum(tri) / triads  # == 3 * triangles / triads


def diameter(net: CooccurrenceNetwork, view: UndirectedView | None = None) -> float:
    view = view or UndirectedView(net)
    return _distance_stats(view)[0]


def radius(net: CooccurrenceNetwork, view: UndirectedView | None = None) -> float:
    view = view or UndirectedView(net)
    return _distance_stats(view)[1]


def avg_shortest_path(net: CooccurrenceNetwork, view: UndirectedView | None = None) -> float:
    view = view or UndirectedView(net)
    return _distance_stats(view)[2]


def _distance_stats(view: UndirectedView) -> tuple[float, float, float]:
    _, ecc, dist_sum, _ = _unit_brandes(view)
    return _distance_stats_from(view, ecc, dist_sum)


def _distance_stats_from(view: UndirectedView, ecc, dist_sum) -> tuple[float, float, float]:
    comp = largest_component(view)
    m = len(comp)
    if m <= 1:
        return 0.0, 0.0, 0.0
    d = max(ecc[u] for u in comp)
    r = min(ecc[u] for u in comp)
    s = sum(dist_sum[u] for u in comp) / (m * (m - 1))
    return float(d), float(r), s


def avg_betweenness(net: CooccurrenceNetwork, view: UndirectedView | None = None) -> float:
    view = view or UndirectedView(net)
    norm = _pair_norm(view.n)
    if norm == 0.0:
        return 0.0
    betw = _unit_brandes(view)[0]
    return sum(b / norm for b in betw) / view.n


def avg_load(net: CooccurrenceNetwork, view: UndirectedView | None = None) -> float:
    view = view or UndirectedView(net)
    norm = _pair_norm(view.n)
    if norm == 0.0:
        return 0.0
    betw = _weighted_brandes(view)
    return sum(b / norm for b in betw) / view.n


def count_cliques(net: CooccurrenceNetwork,
                  view: UndirectedView | None = None,
                  cap: int = DEFAULT_CLIQUE_CAP) -> int:
    """Count maximal cliques (Bron-Kerbosch with pivoting).

    Isolated nodes count as size-1 maximal cliques.  Raises
    CliqueBudgetExceeded beyond `cap` cliques.
    """
    view = view or UndirectedView(net)
    adjsets = view.adjsets
    count = 0

    def expand(candidates: set[int], excluded: set[int]) -> None:
        nonlocal count
        if not candidates and not excluded:
            count += 1
            if count > cap:
                raise CliqueBudgetExceeded(f"more than {cap} maximal cliques")
            return
        pivot = max(candidates | excluded, key=lambda u: len(adjsets[u] & candidates))
        for v in list(candidates - adjsets[pivot]):
            expand(candidates & adjsets[v], excluded & adjsets[v])
            candidates.remove(v)
            excluded.add(v)

    expand(set(range(view.n)), set())
    return count


def avg_degree(net: CooccurrenceNetwork) -> float:
    """Mean in+out degree over distinct directed edges: 2E/N."""
    if net.n_nodes == 0:
        return 0.0
    return 2.0 * net.n_edges / net.n_nodes


def avg_intermittency(p: Partition) -> float:
    """Mean coefficient of variation of the gaps between repeats of a lemma.

    Words occurring once contribute nothing; a partition with no repeated
    lemma scores 0.  A perfectly periodic word also scores 0.
    """
    positions: dict[str, list[int]] = {}
    for i, lemma in enumerate(p.lemmas):
        positions.setdefault(lemma, []).append(i)
    scores = []
    for pos in positions.values():
        if len(pos) < 2:
            continue
        gaps = [b - a for a, b in zip(pos, pos[1:])]
        mu = sum(gaps) / len(gaps)
        var = sum((g - mu) ** 2 for g in gaps) / len(gaps)
        scores.append(math.sqrt(var) / mu)
    if not scores:
        return 0.0
    return sum(scores) / len(scores)


def compute_graph_metrics(net: CooccurrenceNetwork,
                          clique_cap: int = DEFAULT_CLIQUE_CAP) -> dict[str, float]:
    """The eleven measurements derivable from the graph alone (all but I),
    keyed by their column letters, sharing one traversal pass."""
    view = UndirectedView(net)
    betw_raw, ecc, dist_sum, _ = _unit_brandes(view)
    d, r, s = _distance_stats_from(view, ecc, dist_sum)
    norm = _pair_norm(view.n)
    if norm > 0.0:
        b = sum(x / norm for x in betw_raw) / view.n
        load_raw = _weighted_brandes(view)
        load = sum(x / norm for x in load_raw) / view.n
    else:
        b = 0.0
        load = 0.0
    return {
        "C": avg_clustering(net, view),
        "D": d,
        "R": r,
        "Cq": float(count_cliques(net, view, cap=clique_cap)),
        "L": load,
        "T": transitivity(net, view),
        "B": b,
        "S": s,
        "K": avg_degree(net),
        "N": float(net.n_nodes),
        "E": float(net.n_edges),
    }


def compute_all(net: CooccurrenceNetwork, p: Partition,
                clique_cap: int = DEFAULT_CLIQUE_CAP) -> NetworkMetrics:
    """All twelve measurements for one partition's network."""
    g = compute_graph_metrics(net, clique_cap=clique_cap)
    return NetworkMetrics(
        clustering=g["C"],
        diameter=g["D"],
        radius=g["R"],
        cliques=int(g["Cq"]),
        load=g["L"],
        transitivity=g["T"],
        betweenness=g["B"],
        shortest_path=g["S"],
        degree=g["K"],
        intermittency=avg_intermittency(p),
        nodes=net.n_nodes,
        edges=net.n_edges,
    )


def write_metrics_csv(rows: list[NetworkMetrics], path: str | Path) -> None:
    """Per-book metrics table: one row per partition, full float precision."""
    lines = ["partition," + ",".join(METRIC_NAMES) + "\n"]
    for i, m in enumerate(rows):
        lines.append(str(i) + "," + ",".join(repr(v) for v in m.as_row()) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_metrics_csv(path: str | Path) -> list[NetworkMetrics]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    expected = "partition," + ",".join(METRIC_NAMES)
    if not lines or lines[0] != expected:
        raise ValueError(f"unexpected metrics header in {path}")
    rows = []
    for line in lines[1:]:
        vals = line.split(",")[1:]
        rows.append(NetworkMetrics(
            clustering=float(vals[0]), diameter=float(vals[1]),
            radius=float(vals[2]), cliques=int(float(vals[3])),
            load=float(vals[4]), transitivity=float(vals[5]),
            betweenness=float(vals[6]), shortest_path=float(vals[7]),
            degree=float(vals[8]), intermittency=float(vals[9]),
            nodes=int(float(vals[10])), edges=int(float(vals[11]))))
    return rows
