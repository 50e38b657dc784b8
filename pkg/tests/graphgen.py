"""Graph construction helpers shared by the metric tests."""

from itertools import combinations

import numpy as np

from netstylo.netbuild import CooccurrenceNetwork


def net_from_edges(n: int, edges: dict[tuple[int, int], int]) -> CooccurrenceNetwork:
    return CooccurrenceNetwork(lemmas=[f"w{i}" for i in range(n)],
                               edges=dict(edges), window=0)


def undirected_net(n: int, pairs, weight: int = 1) -> CooccurrenceNetwork:
    """One directed edge per undirected pair (low -> high), fixed weight."""
    return net_from_edges(n, {(a, b): weight for a, b in pairs})


def _connected(n: int, pairs) -> bool:
    adj = {v: set() for v in range(n)}
    for a, b in pairs:
        adj[a].add(b)
        adj[b].add(a)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def connected_graphs(max_n: int):
    """Yield every connected labeled graph on 1..max_n nodes as a directed,
    weighted network (deterministic orientations and weights)."""
    for n in range(1, max_n + 1):
        all_pairs = list(combinations(range(n), 2))
        for mask in range(1 << len(all_pairs)):
            pairs = [p for i, p in enumerate(all_pairs) if mask >> i & 1]
            if n > 1 and (len(pairs) < n - 1 or not _connected(n, pairs)):
                continue
            edges = {}
            for i, (a, b) in enumerate(pairs):
                w = 1 + i % 3
                if i % 2 == 0:
                    edges[(a, b)] = w
                else:
                    edges[(b, a)] = w
                if i % 4 == 0:  # exercise two-directional combining
                    edges[(b, a)] = edges.get((b, a), 0) + 1
            yield net_from_edges(n, edges)


def random_digraph(rng: np.random.Generator, max_nodes: int = 30) -> CooccurrenceNetwork:
    """Sparse random weighted digraph; may be disconnected on purpose."""
    n = int(rng.integers(5, max_nodes + 1))
    p = float(rng.uniform(0.08, 0.30))
    edges = {}
    for a in range(n):
        for b in range(n):
            if a != b and rng.random() < p:
                edges[(a, b)] = int(rng.integers(1, 7))
    return net_from_edges(n, edges)
