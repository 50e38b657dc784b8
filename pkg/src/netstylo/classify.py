"""Supervised classifiers, stratified k-fold CV, and precision/recall scoring.

Six paradigms: majority vote (zeror), single-attribute rules (oner), Gaussian
naive Bayes (nb), k-nearest neighbors (knn), a C4.5-style decision tree (j48)
and a radial basis function network (rbfn).  Hyperparameter defaults are
pinned here so runs are reproducible; every report echoes its spec and seed.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import TooFewInstances

CLASSIFIER_KINDS = ("zeror", "oner", "nb", "knn", "j48", "rbfn")


@dataclass
class ClassifierSpec:
    kind: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in CLASSIFIER_KINDS:
            raise ValueError(f"unknown classifier kind {self.kind!r}")

    def key(self) -> str:
        inner = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        return f"{self.kind}({inner})" if inner else self.kind


def stratified_kfold(labels, k: int, seed: int) -> np.ndarray:
    """Fold index per instance: per-class seeded shuffle then round-robin."""
    if k < 2:
        raise ValueError(f"need k >= 2 folds, got {k}")
    labels = list(labels)
    n = len(labels)
    classes = sorted(set(labels))
    for cls in classes:
        if labels.count(cls) < 2:
            raise TooFewInstances(f"class {cls!r} has < 2 instances")
    rng = np.random.default_rng(seed)
    fold = np.empty(n, dtype=int)
    for cls in classes:
        idx = np.asarray([i for i, lab in enumerate(labels) if lab == cls])
        rng.shuffle(idx)
        for j, i in enumerate(idx):
            fold[i] = j % k
    return fold


# --- individual classifiers -------------------------------------------------

class _ZeroR:
    def fit(self, x, y):
        counts = np.bincount(y)
        self.klass = int(np.argmax(counts))  # ties -> lowest class id
        return self

    def predict(self, x):
        return np.full(len(x), self.klass, dtype=int)


class _OneR:
    """Single best attribute with equal-frequency discretization."""

    def __init__(self, min_bucket: int = 6):
        self.min_bucket = min_bucket

    @staticmethod
    def _buckets(values: np.ndarray, y: np.ndarray, n_classes: int,
                 min_bucket: int):
        """Equal-frequency cut points (between distinct values only) and the
        majority class per bucket; returns (thresholds, classes, errors)."""
        order = np.argsort(values, kind="stable")
        sv = values[order]
        sy = y[order]
        n = len(sv)
        n_buckets = max(1, n // min_bucket)
        size = n / n_buckets
        cuts = []
        for b in range(1, n_buckets):
            cut = round(b * size)
            # never split a run of equal values
            while 0 < cut < n and sv[cut - 1] == sv[cut]:
                cut += 1
            if 0 < cut < n and (not cuts or cut > cuts[-1]):
                cuts.append(cut)
        bounds = [0] + cuts + [n]
        thresholds = []
        classes = []
        errors = 0
        for lo, hi in zip(bounds, bounds[1:]):
            seg = sy[lo:hi]
            counts = np.bincount(seg, minlength=n_classes)
            classes.append(int(np.argmax(counts)))
            errors += int(len(seg) - counts.max())
            if hi < n:
                thresholds.append((sv[hi - 1] + sv[hi]) / 2.0)
        return np.asarray(thresholds), np.asarray(classes, dtype=int), errors

    def fit(self, x, y):
        n_classes = int(y.max()) + 1
        best = None
        for j in range(x.shape[1]):
            thr, classes, errors = self._buckets(x[:, j], y, n_classes,
                                                 self.min_bucket)
            if best is None or errors < best[0]:
                best = (errors, j, thr, classes)
        if best is None:  # zero attributes
            self._fallback = _ZeroR().fit(x, y)
            return self
        self._fallback = None
        _, self.attr, self.thresholds, self.classes = best
        return self

    def predict(self, x):
        if self._fallback is not None:
            return self._fallback.predict(x)
        buckets = np.searchsorted(self.thresholds, x[:, self.attr], side="right")
        return self.classes[buckets]


class _NaiveBayes:
    """Per-class, per-attribute normal model with a variance floor."""

    VAR_FLOOR = 1e-9

    def fit(self, x, y):
        self.classes = np.unique(y)
        n = len(y)
        self.log_prior = []
        self.mean = []
        self.var = []
        for cls in self.classes:
            rows = x[y == cls]
            self.log_prior.append(math.log(len(rows) / n))
            self.mean.append(rows.mean(axis=0))
            self.var.append(np.maximum(rows.var(axis=0), self.VAR_FLOOR))
        self.mean = np.asarray(self.mean)
        self.var = np.asarray(self.var)
        self.log_prior = np.asarray(self.log_prior)
        return self

    def predict(self, x):
        # log-likelihood per class: sum over attributes of the normal logpdf
        ll = np.empty((len(x), len(self.classes)))
        for c in range(len(self.classes)):
            diff = x - self.mean[c]
            ll[:, c] = self.log_prior[c] - 0.5 * np.sum(
                np.log(2.0 * math.pi * self.var[c]) + diff * diff / self.var[c],
                axis=1)
        return self.classes[np.argmax(ll, axis=1)]


class _KNN:
    def __init__(self, k: int = 1):
        self.k = k

    def fit(self, x, y):
        self.x = x
        self.y = y
        return self

    def predict(self, x):
        out = np.empty(len(x), dtype=int)
        for i, row in enumerate(x):
            d2 = np.sum((self.x - row) ** 2, axis=1)
            order = np.argsort(d2, kind="stable")  # distance ties -> lowest row
            votes = self.y[order[:self.k]]
            counts = np.bincount(votes)
            top = counts.max()
            tied = np.flatnonzero(counts == top)
            if len(tied) == 1:
                out[i] = tied[0]
            else:
                # among vote-tied classes, the one seen closest wins
                for v in votes:
                    if v in tied:
                        out[i] = v
                        break
        return out


def _c45_z(cf: float) -> float:
    """Normal deviate for the C4.5 confidence level, from Quinlan's table."""
    levels = (0.0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00)
    devs = (4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00)
    i = 0
    while cf > levels[i]:
        i += 1
    frac = (cf - levels[i - 1]) / (levels[i] - levels[i - 1])
    return devs[i - 1] + frac * (devs[i] - devs[i - 1])


def _estimate_errors(n: float, e: float, cf: float, z2: float) -> float:
    """C4.5 pessimistic error count for a leaf covering n cases with e errors."""
    if n == 0:
        return 0.0
    if e < 1e-6:
        return n * (1.0 - math.exp(math.log(cf) / n))
    if e < 0.9999:
        v0 = n * (1.0 - math.exp(math.log(cf) / n))
        return v0 + e * (_estimate_errors(n, 1.0, cf, z2) - v0)
    if e + 0.5 >= n:
        return 0.67 * (n - e)
    pr = ((e + 0.5 + z2 / 2.0
           + math.sqrt(z2 * ((e + 0.5) * (1.0 - (e + 0.5) / n) + z2 / 4.0)))
          / (n + z2))
    return n * pr - e


class _TreeNode:
    __slots__ = ("attr", "thr", "left", "right", "klass", "n", "errors")

    def __init__(self):
        self.attr = None
        self.thr = None
        self.left = None
        self.right = None
        self.klass = None
        self.n = 0
        self.errors = 0


class _J48:
    """C4.5-style tree: binary numeric splits by gain ratio, pessimistic pruning."""

    def __init__(self, min_leaf: int = 2, confidence: float = 0.25,
                 prune: bool = True):
        self.min_leaf = min_leaf
        self.confidence = confidence
        self.prune = prune
        z = _c45_z(confidence)
        self._z2 = z * z

    @staticmethod
    def _entropy(counts: np.ndarray, total: int) -> float:
        if total == 0:
            return 0.0
        h = 0.0
        for c in counts:
            if c:
                p = c / total
                h -= p * math.log2(p)
        return h

    def _best_split(self, x, y, idx, n_classes):
        base_counts = np.bincount(y[idx], minlength=n_classes)
        total = len(idx)
        base_h = self._entropy(base_counts, total)
        best = None  # (gain_ratio, attr, thr)
        for j in range(x.shape[1]):
            vals = x[idx, j]
            order = np.argsort(vals, kind="stable")
            sv = vals[order]
            sy = y[idx][order]
            left = np.zeros(n_classes, dtype=int)
            for cut in range(1, total):
                left[sy[cut - 1]] += 1
                if sv[cut - 1] == sv[cut]:
                    continue
                if cut < self.min_leaf or total - cut < self.min_leaf:
                    continue
                right = base_counts - left
                h = (cut * self._entropy(left, cut)
                     + (total - cut) * self._entropy(right, total - cut)) / total
                gain = base_h - h
                if gain <= 1e-12:
                    continue
                p = cut / total
                split_info = -(p * math.log2(p) + (1 - p) * math.log2(1 - p))
                ratio = gain / split_info
                if best is None or ratio > best[0] + 1e-12:
                    best = (ratio, j, (sv[cut - 1] + sv[cut]) / 2.0)
        return best

    def _build(self, x, y, idx, n_classes):
        node = _TreeNode()
        counts = np.bincount(y[idx], minlength=n_classes)
        node.klass = int(np.argmax(counts))
        node.n = len(idx)
        node.errors = int(node.n - counts.max())
        if node.errors == 0 or node.n < 2 * self.min_leaf:
            return node
        best = self._best_split(x, y, idx, n_classes)
        if best is None:
            return node
        _, node.attr, node.thr = best
        mask = x[idx, node.attr] <= node.thr
        node.left = self._build(x, y, idx[mask], n_classes)
        node.right = self._build(x, y, idx[~mask], n_classes)
        return node

    def _subtree_estimate(self, node) -> float:
        if node.attr is None:
            return node.errors + _estimate_errors(node.n, node.errors,
                                                  self.confidence, self._z2)
        return (self._subtree_estimate(node.left)
                + self._subtree_estimate(node.right))

    def _prune(self, node):
        if node.attr is None:
            return
        self._prune(node.left)
        self._prune(node.right)
        as_leaf = node.errors + _estimate_errors(node.n, node.errors,
                                                 self.confidence, self._z2)
        as_tree = self._subtree_estimate(node)
        if as_leaf <= as_tree + 0.1:  # C4.5's tolerance for leaning on the leaf
            node.attr = None
            node.thr = None
            node.left = None
            node.right = None

    def fit(self, x, y):
        n_classes = int(y.max()) + 1
        if x.shape[1] == 0:
            self.root = _TreeNode()
            counts = np.bincount(y, minlength=n_classes)
            self.root.klass = int(np.argmax(counts))
            return self
        self.root = self._build(x, y, np.arange(len(y)), n_classes)
        if self.prune:
            self._prune(self.root)
        return self

    def predict(self, x):
        out = np.empty(len(x), dtype=int)
        for i, row in enumerate(x):
            node = self.root
            while node.attr is not None:
                node = node.left if row[node.attr] <= node.thr else node.right
            out[i] = node.klass
        return out


def _kmeans(points: np.ndarray, k: int, rng) -> list[np.ndarray]:
    """Plain Lloyd k-means; returns per-cluster point groups (k <= #points)."""
    uniq = np.unique(points, axis=0)
    k = min(k, len(uniq))
    pick = rng.choice(len(uniq), size=k, replace=False)
    centers = uniq[np.sort(pick)]
    assign = None
    for _ in range(100):
        d2 = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_assign = np.argmin(d2, axis=1)
        for c in range(k):  # re-seed empty clusters with the farthest point
            if not np.any(new_assign == c):
                far = int(np.argmax(d2[np.arange(len(points)), new_assign]))
                new_assign[far] = c
        if assign is not None and np.array_equal(assign, new_assign):
            break
        assign = new_assign
        centers = np.stack([points[assign == c].mean(axis=0) for c in range(k)])
    return [points[assign == c] for c in range(k)]


class _RBFN:
    """Per-class k-means centers, Gaussian bases, one-vs-rest logistic output."""

    def __init__(self, seed: int = 0, centers_per_class: int = 2,
                 width_floor: float = 0.1, max_epochs: int = 1000,
                 tol: float = 1e-6):
        self.seed = seed
        self.centers_per_class = centers_per_class
        self.width_floor = width_floor
        self.max_epochs = max_epochs
        self.tol = tol

    def _activations(self, x):
        d2 = np.sum((x[:, None, :] - self.centers[None, :, :]) ** 2, axis=2)
        phi = np.exp(-d2 / (2.0 * self.widths ** 2))
        return np.hstack([phi, np.ones((len(x), 1))])

    def fit(self, x, y):
        rng = np.random.default_rng(self.seed)
        self.classes = np.unique(y)
        centers = []
        widths = []
        for cls in self.classes:
            pts = x[y == cls]
            for cluster in _kmeans(pts, self.centers_per_class, rng):
                c = cluster.mean(axis=0)
                spread = math.sqrt(float(np.mean(np.sum((cluster - c) ** 2, axis=1))))
                centers.append(c)
                widths.append(max(spread, self.width_floor))
        self.centers = np.stack(centers)
        self.widths = np.asarray(widths)
        phi = self._activations(x)
        targets = (y[:, None] == self.classes[None, :]).astype(float)
        n, m = phi.shape
        # convex one-vs-rest logistic loss; the trace of phi'phi/n bounds the
        # Lipschitz constant of the gradient (L <= trace/4), keep lr below 2/L
        trace = float(np.sum(phi * phi)) / n
        lr = 4.0 / max(trace, 1.0)
        w = np.zeros((m, len(self.classes)))
        for _ in range(self.max_epochs):
            z = phi @ w
            p = 1.0 / (1.0 + np.exp(-z))
            grad = phi.T @ (p - targets) / n
            step = lr * grad
            w -= step
            if np.max(np.abs(step)) < self.tol:
                break
        self.weights = w
        return self

    def predict(self, x):
        scores = self._activations(x) @ self.weights
        return self.classes[np.argmax(scores, axis=1)]


def _make(spec: ClassifierSpec):
    p = spec.params
    if spec.kind == "zeror":
        return _ZeroR()
    if spec.kind == "oner":
        return _OneR(min_bucket=p.get("min_bucket", 6))
    if spec.kind == "nb":
        return _NaiveBayes()
    if spec.kind == "knn":
        return _KNN(k=p.get("k", 1))
    if spec.kind == "j48":
        return _J48(min_leaf=p.get("min_leaf", 2),
                    confidence=p.get("confidence", 0.25),
                    prune=p.get("prune", True))
    if spec.kind == "rbfn":
        return _RBFN(seed=spec.seed,
                     centers_per_class=p.get("centers_per_class", 2),
                     width_floor=p.get("width_floor", 0.1),
                     max_epochs=p.get("max_epochs", 1000),
                     tol=p.get("tol", 1e-6))
    raise ValueError(spec.kind)


def train_predict(spec: ClassifierSpec, x_train: np.ndarray, y_train: np.ndarray,
                  x_test: np.ndarray) -> np.ndarray:
    """Fit per spec and label the test rows; deterministic given spec.seed.

    Degenerate training (a single class, or zero attributes) falls back to
    majority vote rather than failing.
    """
    if len(y_train) == 0:
        raise ValueError("empty training set")
    if len(np.unique(y_train)) == 1:
        return np.full(len(x_test), int(y_train[0]), dtype=int)
    if x_train.shape[1] == 0:
        model = _ZeroR().fit(x_train, y_train)
        return model.predict(x_test)
    model = _make(spec).fit(x_train, y_train)
    return model.predict(x_test)


# --- evaluation --------------------------------------------------------------

@dataclass
class EvaluationReport:
    spec_key: str
    seed: int
    k_folds: int
    classes: list[str]
    confusion: np.ndarray          # rows = true class, cols = predicted
    folds: list[int]
    subset_size: int
    undefined_precision: list[str] = field(default_factory=list)

    @property
    def tau(self) -> np.ndarray:
        return np.diag(self.confusion)

    @property
    def eps(self) -> np.ndarray:
        return self.confusion.sum(axis=0) - self.tau

    @property
    def gamma(self) -> np.ndarray:
        return self.confusion.sum(axis=1) - self.tau

    @property
    def precision_per_class(self) -> np.ndarray:
        denom = self.tau + self.eps
        return np.where(denom > 0, self.tau / np.maximum(denom, 1), 0.0)

    @property
    def recall_per_class(self) -> np.ndarray:
        denom = self.tau + self.gamma
        return np.where(denom > 0, self.tau / np.maximum(denom, 1), 0.0)

    @property
    def micro_precision(self) -> float:
        total = int(self.confusion.sum())
        return float(self.tau.sum()) / total if total else 0.0

    @property
    def micro_recall(self) -> float:
        total = int(self.confusion.sum())
        return float(self.tau.sum()) / total if total else 0.0

    @property
    def macro_precision(self) -> float:
        return float(self.precision_per_class.mean())

    @property
    def macro_recall(self) -> float:
        return float(self.recall_per_class.mean())

    @property
    def success_rate(self) -> float:
        return self.micro_recall

    def to_dict(self) -> dict:
        return {
            "spec": self.spec_key,
            "seed": self.seed,
            "k_folds": self.k_folds,
            "classes": self.classes,
            "confusion": self.confusion.tolist(),
            "folds": list(map(int, self.folds)),
            "subset_size": self.subset_size,
            "per_class": {
                cls: {"tau": int(self.tau[i]), "eps": int(self.eps[i]),
                      "gamma": int(self.gamma[i]),
                      "precision": float(self.precision_per_class[i]),
                      "recall": float(self.recall_per_class[i])}
                for i, cls in enumerate(self.classes)
            },
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "success_rate": self.success_rate,
            "undefined_precision": self.undefined_precision,
        }


def cross_val_predict(spec: ClassifierSpec, x: np.ndarray, y: np.ndarray,
                      folds: np.ndarray,
                      normalize_per_fold: bool = False) -> np.ndarray:
    """Predicted label per instance from its held-out fold."""
    pred = np.empty(len(y), dtype=int)
    for f in sorted(set(folds.tolist())):
        test = folds == f
        train = ~test
        x_train, x_test = x[train], x[test]
        if normalize_per_fold and x.shape[1] > 0:
            lo = x_train.min(axis=0)
            span = x_train.max(axis=0) - lo
            span = np.where(span > 0, span, 1.0)
            x_train = (x_train - lo) / span
            x_test = (x_test - lo) / span
        pred[test] = train_predict(spec, x_train, y[train], x_test)
    return pred


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray,
                     n_classes: int) -> np.ndarray:
    conf = np.zeros((n_classes, n_classes), dtype=int)
    for t, p in zip(y_true, y_pred):
        conf[t, p] += 1
    return conf


def report_from_confusion(conf: np.ndarray, classes: list[str],
                          spec_key: str = "manual", seed: int = 0,
                          k_folds: int = 0, folds: list[int] | None = None,
                          subset_size: int = 0) -> EvaluationReport:
    conf = np.asarray(conf, dtype=int)
    rep = EvaluationReport(spec_key=spec_key, seed=seed, k_folds=k_folds,
                           classes=list(classes), confusion=conf,
                           folds=folds or [], subset_size=subset_size)
    rep.undefined_precision = [
        classes[i] for i in range(len(classes))
        if conf[:, i].sum() == 0
    ]
    return rep


def evaluate(spec: ClassifierSpec, x: np.ndarray, labels, subset,
             k: int, seed: int,
             normalize_per_fold: bool = False) -> EvaluationReport:
    """Stratified k-fold evaluation of one classifier on a column subset."""
    labels = list(labels)
    classes = sorted(set(labels))
    lookup = {c: i for i, c in enumerate(classes)}
    y = np.asarray([lookup[lab] for lab in labels])
    cols = list(subset)
    xs = x[:, cols] if cols else x[:, :0]
    folds = stratified_kfold(labels, k, seed)
    pred = cross_val_predict(spec, xs, y, folds,
                             normalize_per_fold=normalize_per_fold)
    conf = confusion_matrix(y, pred, len(classes))
    return report_from_confusion(conf, classes, spec_key=spec.key(),
                                 seed=seed, k_folds=k,
                                 folds=folds.tolist(), subset_size=len(cols))
