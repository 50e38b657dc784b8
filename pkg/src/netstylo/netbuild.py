"""Partitioning of token streams and construction of co-occurrence networks.

A book is cut into contiguous windows of exactly W lemmas (the trailing
remainder is discarded) and each window becomes one directed, integer-weighted
adjacency network: an edge u->v for every occurrence of lemma u immediately
followed by lemma v, weighted by the pair count.  Self-loops (identical
adjacent lemmas) are dropped.
"""

from dataclasses import dataclass, field
from pathlib import Path

from .corpus import TokenStream
from .errors import EmptySeries, NoFeasibleW


@dataclass(frozen=True)
class Partition:
    author_id: str
    doc_id: str
    index: int
    lemmas: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.lemmas)


@dataclass
class CooccurrenceNetwork:
    """Directed weighted graph for one partition; node ids by first appearance."""

    lemmas: list[str]                      # node id -> lemma
    edges: dict[tuple[int, int], int]      # (src, dst) -> weight >= 1
    window: int                            # W of the source partition

    @property
    def n_nodes(self) -> int:
        return len(self.lemmas)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def total_weight(self) -> int:
        return sum(self.edges.values())


def partition_stream(stream: TokenStream, window: int) -> list[Partition]:
    """Cut a stream into floor(len/W) windows of exactly W lemmas each."""
    if window < 2:
        raise ValueError(f"window must be >= 2, got {window}")
    lemmas = stream.lemmas()
    n_full = len(lemmas) // window
    if n_full == 0:
        raise EmptySeries(
            f"book ({stream.author_id}, {stream.doc_id}) has {len(lemmas)} tokens, "
            f"fewer than one window of {window}")
    return [
        Partition(author_id=stream.author_id, doc_id=stream.doc_id, index=i,
                  lemmas=tuple(lemmas[i * window:(i + 1) * window]))
        for i in range(n_full)
    ]


def build_network(p: Partition) -> CooccurrenceNetwork:
    """Build the directed co-occurrence network of one partition."""
    ids: dict[str, int] = {}
    lemmas: list[str] = []
    for lemma in p.lemmas:
        if lemma not in ids:
            ids[lemma] = len(lemmas)
            lemmas.append(lemma)
    edges: dict[tuple[int, int], int] = {}
    for a, b in zip(p.lemmas, p.lemmas[1:]):
        if a == b:
            continue  # no self-loops
        key = (ids[a], ids[b])
        edges[key] = edges.get(key, 0) + 1
    return CooccurrenceNetwork(lemmas=lemmas, edges=edges, window=len(p.lemmas))


def write_edge_list(net: CooccurrenceNetwork, path: str | Path) -> None:
    """Dump `src_lemma<TAB>dst_lemma<TAB>weight` rows, sorted by node ids."""
    lines = [
        f"{net.lemmas[s]}\t{net.lemmas[d]}\t{w}\n"
        for (s, d), w in sorted(net.edges.items())
    ]
    Path(path).write_text("".join(lines), encoding="utf-8")


@dataclass
class WindowChoice:
    window: int
    min_nodes: int
    avg_series_len: float
    excluded_books: list[tuple[str, str]] = field(default_factory=list)
    meets_series_target: bool | None = None


def _min_nodes_for(streams: list[TokenStream], window: int):
    """Scan a window size: min per-partition node count, series lengths, exclusions."""
    min_nodes = None
    lengths = []
    excluded = []
    for stream in streams:
        lemmas = stream.lemmas()
        n_full = len(lemmas) // window
        if n_full == 0:
            excluded.append((stream.author_id, stream.doc_id))
            continue
        lengths.append(n_full)
        for i in range(n_full):
            distinct = len(set(lemmas[i * window:(i + 1) * window]))
            if min_nodes is None or distinct < min_nodes:
                min_nodes = distinct
    return min_nodes, lengths, excluded


def choose_window(streams: list[TokenStream],
                  grid: list[int],
                  target_min_nodes: int = 100,
                  target_series_len: int | None = None) -> WindowChoice:
    """Pick the smallest window in the grid keeping every partition's node count
    at or above `target_min_nodes`.

    Smaller windows give longer (noisier) series, larger ones fewer, more
    stable networks; the node floor arbitrates.  Books too short to yield one
    partition at a candidate window are excluded from the feasibility check
    and reported in the result.  `target_series_len` is advisory only: the
    choice records whether the average series length reaches it.
    """
    if not grid:
        raise ValueError("window grid is empty")
    for window in sorted(set(grid)):
        if window < 2:
            raise ValueError(f"window must be >= 2, got {window}")
        min_nodes, lengths, excluded = _min_nodes_for(streams, window)
        if min_nodes is None or min_nodes < target_min_nodes:
            continue
        avg_len = sum(lengths) / len(lengths)
        meets = None if target_series_len is None else avg_len >= target_series_len
        return WindowChoice(window=window, min_nodes=min_nodes,
                            avg_series_len=avg_len, excluded_books=excluded,
                            meets_series_target=meets)
    raise NoFeasibleW(
        f"no window in {sorted(set(grid))} keeps min node count >= {target_min_nodes}")
