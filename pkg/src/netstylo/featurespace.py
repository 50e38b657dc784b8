"""The instances x attributes matrix of moment features, and feature selection.

Each book contributes one row of 48 attributes: the four moments of each of
the twelve metric series, columns ordered metric-major ("C.mu1" ... "E.mu4").
"""

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConstantColumnWarning, IncompleteBook
from .graphmetrics import METRIC_NAMES
from .serieslab import MomentVector

COLUMN_NAMES = tuple(f"{m}.mu{i}" for m in METRIC_NAMES for i in (1, 2, 3, 4))


@dataclass
class FeatureMatrix:
    rows: list[tuple[str, str]]          # (author, doc) per row
    columns: list[str]
    values: np.ndarray                   # shape (n_rows, n_cols)
    normalized: bool = False
    constant_columns: list[str] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return [author for author, _ in self.rows]

    def column_index(self, name: str) -> int:
        return self.columns.index(name)


@dataclass(frozen=True)
class AttributeSubset:
    indices: tuple[int, ...]
    provenance: str

    def __len__(self) -> int:
        return len(self.indices)


def assemble(moments_by_book: dict[tuple[str, str], dict[str, MomentVector]]
             ) -> FeatureMatrix:
    """One row per book, 48 columns in deterministic metric-major order."""
    rows = sorted(moments_by_book)
    data = np.empty((len(rows), len(COLUMN_NAMES)))
    for r, book in enumerate(rows):
        per_metric = moments_by_book[book]
        missing = [m for m in METRIC_NAMES if m not in per_metric]
        if missing:
            raise IncompleteBook(book, missing)
        data[r] = [v for m in METRIC_NAMES for v in per_metric[m].as_tuple()]
    if not np.all(np.isfinite(data)):
        bad = np.argwhere(~np.isfinite(data))
        raise ValueError(f"non-finite feature values at (row, col) {bad.tolist()[:5]}")
    return FeatureMatrix(rows=rows, columns=list(COLUMN_NAMES), values=data)


def minmax_normalize(m: FeatureMatrix) -> FeatureMatrix:
    """Rescale every column to [0, 1]; constant columns map to 0 and are flagged.

    Idempotent: applying it to an already normalized matrix changes nothing.
    """
    lo = m.values.min(axis=0)
    hi = m.values.max(axis=0)
    span = hi - lo
    constant = span == 0
    safe_span = np.where(constant, 1.0, span)
    values = (m.values - lo) / safe_span
    values[:, constant] = 0.0
    flagged = [m.columns[j] for j in np.flatnonzero(constant)]
    if flagged:
        warnings.warn(f"constant feature columns: {flagged}", ConstantColumnWarning)
    return FeatureMatrix(rows=list(m.rows), columns=list(m.columns),
                         values=values, normalized=True,
                         constant_columns=flagged)


def column_variances(m: FeatureMatrix) -> np.ndarray:
    return m.values.var(axis=0, ddof=1)


def variance_threshold(m: FeatureMatrix, theta: float) -> AttributeSubset:
    """Columns whose sample variance is at least theta."""
    var = column_variances(m)
    kept = tuple(int(j) for j in np.flatnonzero(var >= theta))
    return AttributeSubset(indices=kept, provenance=f"variance({theta!r})")


def variance_sweep(m: FeatureMatrix) -> list[tuple[float, AttributeSubset]]:
    """The full shrinkage path: one subset per distinct column variance.

    The first threshold keeps every column, the last only the highest-variance
    ones; subsets are nested along the path.
    """
    var = column_variances(m)
    path = []
    for theta in sorted(set(var.tolist())):
        path.append((theta, variance_threshold(m, theta)))
    return path


@dataclass
class SelectionLevel:
    level: int
    size: int
    best_score: float
    subsets: list[tuple[int, ...]]


@dataclass
class SelectionTrace:
    levels: list[SelectionLevel]
    beam_cap: int

    def best(self) -> tuple[float, SelectionLevel]:
        """Highest score over all levels; ties go to the fewest attributes."""
        return max(((lv.best_score, lv) for lv in self.levels),
                   key=lambda t: (t[0], t[1].level))

    def to_dict(self) -> dict:
        return {
            "beam_cap": self.beam_cap,
            "levels": [
                {"level": lv.level, "size": lv.size, "best_score": lv.best_score,
                 "subsets": [list(s) for s in lv.subsets]}
                for lv in self.levels
            ],
        }


def greedy_backward_select(m: FeatureMatrix, scorer,
                           beam_cap: int = 50) -> SelectionTrace:
    """Backward elimination keeping, per level, every subset tying the level's
    best cross-validated score (up to beam_cap, lexicographic order).

    `scorer(subset_indices)` must return the CV success rate; it is also
    called on the empty tuple at the final level, where classification
    degenerates to majority vote.  beam_cap=1 is classical backward
    elimination.
    """
    if beam_cap < 1:
        raise ValueError("beam_cap must be >= 1")
    d = m.values.shape[1]
    full = tuple(range(d))
    levels = [SelectionLevel(level=0, size=d, best_score=scorer(full),
                             subsets=[full])]
    current = [full]
    for level in range(1, d + 1):
        candidates = sorted({
            tuple(col for col in subset if col != drop)
            for subset in current for drop in subset
        })
        scores = [scorer(c) for c in candidates]
        best = max(scores)
        tying = [c for c, s in zip(candidates, scores) if s == best][:beam_cap]
        levels.append(SelectionLevel(level=level, size=d - level,
                                     best_score=best, subsets=tying))
        current = tying
    return SelectionTrace(levels=levels, beam_cap=beam_cap)


def moment_slice(m: FeatureMatrix, which: str) -> AttributeSubset:
    """"mu1": the 12 first-moment columns; "dynamic": the 36 higher-moment ones."""
    if which == "mu1":
        kept = tuple(j for j, c in enumerate(m.columns) if c.endswith(".mu1"))
        return AttributeSubset(indices=kept, provenance="mu1_only")
    if which == "dynamic":
        kept = tuple(j for j, c in enumerate(m.columns) if not c.endswith(".mu1"))
        return AttributeSubset(indices=kept, provenance="dynamic_only")
    raise ValueError(f"which must be 'mu1' or 'dynamic', got {which!r}")


def write_matrix_csv(m: FeatureMatrix, path: str | Path) -> None:
    lines = ["author,book," + ",".join(m.columns) + "\n"]
    for (author, doc), row in zip(m.rows, m.values):
        lines.append(f"{author},{doc}," + ",".join(repr(float(v)) for v in row) + "\n")
    Path(path).write_text("".join(lines), encoding="utf-8")


def read_matrix_csv(path: str | Path) -> FeatureMatrix:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    if header[:2] != ["author", "book"]:
        raise ValueError(f"unexpected feature matrix header in {path}")
    columns = header[2:]
    rows = []
    data = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append((parts[0], parts[1]))
        data.append([float(v) for v in parts[2:]])
    return FeatureMatrix(rows=rows, columns=columns,
                         values=np.asarray(data, dtype=float))
