"""Pipeline orchestration: flat key=value configuration, staged artifacts with
content-hash caching, and the experiment harness that compares the whole
attribute set against selected and extracted feature spaces.

Every stage persists its output in a documented format under its own
directory and records an artifact manifest; rerunning with unchanged inputs
reuses the cached artifact.  Reports carry no timestamps or absolute paths so
identical inputs produce byte-identical outputs.
"""

import hashlib
import json
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import classify, corpus, featurespace, graphmetrics, manifold, netbuild, serieslab
from .errors import EmptySeries, NetstyloError

STAGES = ("preprocess", "partition", "metrics", "series", "stationarity",
          "features", "select", "extract", "classify", "report")

_DEPENDS = {
    "preprocess": (),
    "partition": ("preprocess",),
    "metrics": ("partition",),
    "series": ("metrics",),
    "stationarity": ("series",),
    "features": ("series",),
    "select": ("features",),
    "extract": ("features",),
    "classify": ("select", "extract"),
    "report": ("classify", "stationarity"),
}

COMBINATIONS = ("whole", "variance_best", "score_best", "mu1", "dynamic",
                "pca", "isomap")


@dataclass
class PipelineConfig:
    manifest: Path
    out: Path
    stopwords: Path | None = None
    lemma_dict: Path | None = None
    tag_lexicon: Path | None = None
    window: int = 200
    window_grid: list[int] | None = None
    target_min_nodes: int = 100
    clique_cap: int = 1_000_000
    alpha: float = 0.05
    theta_grid: list[float] | None = None
    beam_cap: int = 50
    normalize_scope: str = "full"        # "full" (as published) or "train"
    pca_comps: int = 13
    isomap_neighbors: int = 10
    isomap_comps: int = 13
    isomap_bridge: bool = False
    sweep: bool = False
    sweep_lo: int = 2
    sweep_hi: int = 15
    sweep_classifier: str = "knn"
    kinds: list[str] = field(default_factory=lambda: ["j48", "knn", "nb", "rbfn"])
    folds: int = 10
    seed: int = 42
    knn_k: int = 1
    rbfn_epochs: int = 1000

    def validate(self) -> None:
        if not self.manifest.exists():
            raise FileNotFoundError(f"corpus manifest not found: {self.manifest}")
        for p in (self.stopwords, self.lemma_dict, self.tag_lexicon):
            if p is not None and not p.exists():
                raise FileNotFoundError(f"configured resource not found: {p}")
        if self.window < 2:
            raise ValueError(f"window must be >= 2, got {self.window}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.folds < 2:
            raise ValueError(f"folds must be >= 2, got {self.folds}")
        if self.normalize_scope not in ("full", "train"):
            raise ValueError(f"normalize_scope must be full or train")
        for kind in self.kinds + [self.sweep_classifier]:
            if kind not in classify.CLASSIFIER_KINDS:
                raise ValueError(f"unknown classifier kind {kind!r}")

    def spec_for(self, kind: str) -> classify.ClassifierSpec:
        params: dict = {}
        if kind == "knn":
            params["k"] = self.knn_k
        if kind == "rbfn":
            params["max_epochs"] = self.rbfn_epochs
        return classify.ClassifierSpec(kind=kind, seed=self.seed, params=params)


_KEYS = {
    "corpus.manifest": ("manifest", "path"),
    "corpus.stopwords": ("stopwords", "path"),
    "corpus.lemma_dict": ("lemma_dict", "path"),
    "corpus.tag_lexicon": ("tag_lexicon", "path"),
    "netbuild.window": ("window", "int"),
    "netbuild.window_grid": ("window_grid", "intlist"),
    "netbuild.target_min_nodes": ("target_min_nodes", "int"),
    "netbuild.clique_cap": ("clique_cap", "int"),
    "series.alpha": ("alpha", "float"),
    "features.theta_grid": ("theta_grid", "floatlist"),
    "features.beam_cap": ("beam_cap", "int"),
    "features.normalize_scope": ("normalize_scope", "str"),
    "reduce.pca_comps": ("pca_comps", "int"),
    "reduce.isomap_neighbors": ("isomap_neighbors", "int"),
    "reduce.isomap_comps": ("isomap_comps", "int"),
    "reduce.isomap_bridge": ("isomap_bridge", "bool"),
    "reduce.sweep": ("sweep", "bool"),
    "reduce.sweep_lo": ("sweep_lo", "int"),
    "reduce.sweep_hi": ("sweep_hi", "int"),
    "reduce.sweep_classifier": ("sweep_classifier", "str"),
    "classify.kinds": ("kinds", "strlist"),
    "classify.folds": ("folds", "int"),
    "classify.knn_k": ("knn_k", "int"),
    "classify.rbfn_epochs": ("rbfn_epochs", "int"),
    "run.seed": ("seed", "int"),
    "run.out": ("out", "path"),
}


def _convert(raw: str, kind: str, base: Path):
    if kind == "path":
        p = Path(raw)
        return p if p.is_absolute() else base / p
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "bool":
        if raw.lower() in ("true", "yes", "1"):
            return True
        if raw.lower() in ("false", "no", "0"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind == "str":
        return raw
    if kind == "intlist":
        return [int(v.strip()) for v in raw.split(",") if v.strip()]
    if kind == "floatlist":
        return [float(v.strip()) for v in raw.split(",") if v.strip()]
    if kind == "strlist":
        return [v.strip() for v in raw.split(",") if v.strip()]
    raise AssertionError(kind)


def parse_config(path: str | Path) -> PipelineConfig:
    """Flat `section.key = value` file; full-line # comments; paths relative to
    the config file's directory."""
    p = Path(path)
    base = p.parent
    values: dict = {}
    for i, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"{p}:{i}: expected key = value, got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key not in _KEYS:
            raise ValueError(f"{p}:{i}: unknown config key {key!r}")
        if raw == "":
            continue
        attr, kind = _KEYS[key]
        values[attr] = _convert(raw, kind, base)
    if "manifest" not in values:
        raise ValueError(f"{p}: corpus.manifest is required")
    if "out" not in values:
        raise ValueError(f"{p}: run.out is required")
    cfg = PipelineConfig(**values)
    return cfg


@dataclass
class RunArtifact:
    stage: str
    hash: str
    path: str
    upstream: list[str]
    warnings: list[str] = field(default_factory=list)
    cached: bool = False


def _sha(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _hash_parts(*parts: str) -> str:
    return _sha("\x00".join(parts).encode("utf-8"))


def _safe_name(author: str, doc: str) -> str:
    return (re.sub(r"[^A-Za-z0-9_.-]", "_", author) + "__"
            + re.sub(r"[^A-Za-z0-9_.-]", "_", doc))


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n",
                    encoding="utf-8")


class PipelineRun:
    """Executes stages against one config, reusing hash-matched artifacts."""

    def __init__(self, config: PipelineConfig):
        config.validate()
        self.config = config
        self.out = Path(config.out)
        self._memo: dict = {}

    # -- plumbing -------------------------------------------------------------

    def _stage_dir(self, stage: str) -> Path:
        d = self.out / stage
        d.mkdir(parents=True, exist_ok=True)
        return d

    def _load_artifact(self, stage: str) -> RunArtifact | None:
        meta = self.out / stage / "artifact.json"
        if not meta.exists():
            return None
        data = json.loads(meta.read_text(encoding="utf-8"))
        for name in data.get("files", []):
            if not (self.out / stage / name).exists():
                return None
        return RunArtifact(stage=stage, hash=data["hash"],
                           path=str(self.out / stage),
                           upstream=data.get("upstream", []),
                           warnings=data.get("warnings", []), cached=True)

    def _store_artifact(self, stage: str, digest: str, upstream: list[str],
                        files: list[str], warns: list[str]) -> RunArtifact:
        meta = {"stage": stage, "hash": digest, "upstream": upstream,
                "files": sorted(files), "warnings": warns}
        _dump_json(meta, self._stage_dir(stage) / "artifact.json")
        return RunArtifact(stage=stage, hash=digest,
                           path=str(self.out / stage), upstream=upstream,
                           warnings=warns)

    def run_stage(self, stage: str, stage_only: bool = False) -> RunArtifact:
        if stage not in _DEPENDS:
            raise ValueError(f"unknown stage {stage!r}")
        ups = []
        for dep in _DEPENDS[stage]:
            if stage_only:
                art = self._load_artifact(dep)
                if art is None:
                    raise NetstyloError(
                        f"--stage-only: upstream stage {dep!r} has no artifact")
                ups.append(art)
            else:
                ups.append(self.run_stage(dep))
        digest = self._input_hash(stage, ups)
        cached = self._load_artifact(stage)
        if cached is not None and cached.hash == digest:
            return cached
        runner = getattr(self, f"_run_{stage}")
        files, warns = runner(ups)
        return self._store_artifact(stage, digest, [u.hash for u in ups],
                                    files, warns)

    def _input_hash(self, stage: str, ups: list[RunArtifact]) -> str:
        cfg = self.config
        if stage == "preprocess":
            parts = ["preprocess", Path(cfg.manifest).read_bytes().hex()]
            for author, doc, path in corpus.load_manifest(cfg.manifest):
                try:
                    parts.append(f"{author}/{doc}:{_sha(Path(path).read_bytes())}")
                except OSError:
                    parts.append(f"{author}/{doc}:unreadable")
            for res in (cfg.stopwords, cfg.lemma_dict, cfg.tag_lexicon):
                parts.append("bundled" if res is None
                             else _sha(Path(res).read_bytes()))
            return _hash_parts(*parts)
        knobs = {
            "partition": [cfg.window, cfg.window_grid, cfg.target_min_nodes],
            "metrics": [cfg.clique_cap],
            "series": [],
            "stationarity": [cfg.alpha],
            "features": [],
            "select": [cfg.theta_grid, cfg.beam_cap, cfg.normalize_scope,
                       cfg.kinds, cfg.folds, cfg.seed, cfg.knn_k,
                       cfg.rbfn_epochs],
            "extract": [cfg.pca_comps, cfg.isomap_neighbors, cfg.isomap_comps,
                        cfg.isomap_bridge, cfg.sweep, cfg.sweep_lo,
                        cfg.sweep_hi, cfg.sweep_classifier, cfg.folds,
                        cfg.seed, cfg.knn_k],
            "classify": [cfg.kinds, cfg.folds, cfg.seed,
                         cfg.normalize_scope, cfg.knn_k, cfg.rbfn_epochs],
            "report": [],
        }[stage]
        return _hash_parts(stage, *[u.hash for u in ups],
                           json.dumps(knobs, sort_keys=True))

    # -- loading helpers (memoized per hash) ----------------------------------

    def _books_meta(self) -> list[dict]:
        data = json.loads((self.out / "preprocess" / "books.json")
                          .read_text(encoding="utf-8"))
        return data["books"]

    def _streams(self) -> list[corpus.TokenStream]:
        key = ("streams", str(self.out))
        if key not in self._memo:
            streams = []
            for meta in self._books_meta():
                stream = corpus.ingest_pretagged(
                    self.out / "preprocess" / "streams" / meta["file"],
                    author_id=meta["author"], doc_id=meta["doc"])
                streams.append(stream)
            self._memo[key] = streams
        return self._memo[key]

    def _partition_meta(self) -> dict:
        return json.loads((self.out / "partition" / "partitions.json")
                          .read_text(encoding="utf-8"))

    def _metric_rows(self) -> dict[tuple[str, str], list[graphmetrics.NetworkMetrics]]:
        key = ("metric_rows", str(self.out))
        if key not in self._memo:
            rows = {}
            for meta in self._partition_meta()["books"]:
                csv_path = (self.out / "metrics"
                            / f"{_safe_name(meta['author'], meta['doc'])}.csv")
                rows[(meta["author"], meta["doc"])] = \
                    graphmetrics.read_metrics_csv(csv_path)
            self._memo[key] = rows
        return self._memo[key]

    def _series_by_book(self):
        key = ("series", str(self.out))
        if key not in self._memo:
            series = {}
            for (author, doc), rows in sorted(self._metric_rows().items()):
                if len(rows) < 2:
                    continue
                series[(author, doc)] = serieslab.build_series(author, doc, rows)
            self._memo[key] = series
        return self._memo[key]

    def _matrices(self):
        key = ("matrices", str(self.out))
        if key not in self._memo:
            raw = featurespace.read_matrix_csv(self.out / "features" / "matrix.csv")
            norm = featurespace.read_matrix_csv(
                self.out / "features" / "normalized.csv")
            norm.normalized = True
            self._memo[key] = (raw, norm)
        return self._memo[key]

    # -- stages ---------------------------------------------------------------

    def _run_preprocess(self, ups):
        cfg = self.config
        stage_dir = self._stage_dir("preprocess")
        streams_dir = stage_dir / "streams"
        streams_dir.mkdir(exist_ok=True)
        stopwords = corpus.load_stopwords(cfg.stopwords)
        tagger = (corpus.LexiconTagger.bundled() if cfg.tag_lexicon is None
                  else corpus.LexiconTagger.from_file(cfg.tag_lexicon))
        rules = (corpus.LemmaRules.bundled() if cfg.lemma_dict is None
                 else corpus.LemmaRules.from_file(cfg.lemma_dict))
        books = []
        warns = []
        files = []
        for author, doc, path in corpus.load_manifest(cfg.manifest):
            try:
                text = Path(path).read_text(encoding="utf-8")
                if not text.strip():
                    raise ValueError("empty text")
            except (OSError, ValueError) as exc:
                warns.append(f"skipping book ({author}, {doc}): {exc}")
                continue
            raw_doc = corpus.RawDocument(author_id=author, doc_id=doc, text=text,
                                         source_path=str(path))
            surfaces = corpus.tokenize(raw_doc.text)
            tokens = corpus.tag_and_lemmatize(surfaces, tagger, rules)
            stream = corpus.remove_stopwords(
                corpus.TokenStream(author_id=author, doc_id=doc, tokens=tokens),
                stopwords)
            name = _safe_name(author, doc) + ".tsv"
            stream.write_tsv(streams_dir / name)
            files.append(f"streams/{name}")
            books.append({"author": author, "doc": doc, "file": name,
                          "raw_tokens": len(surfaces),
                          "kept_tokens": len(stream)})
        if not books:
            raise NetstyloError("no readable books in the corpus")
        _dump_json({"books": books, "skipped": warns}, stage_dir / "books.json")
        files.append("books.json")
        self._memo.pop(("streams", str(self.out)), None)
        return files, warns

    def _run_partition(self, ups):
        cfg = self.config
        stage_dir = self._stage_dir("partition")
        streams = self._streams()
        warns = []
        if cfg.window_grid:
            choice = netbuild.choose_window(streams, cfg.window_grid,
                                            cfg.target_min_nodes)
            window = choice.window
        else:
            window = cfg.window
        books = []
        for stream in streams:
            n_tokens = len(stream)
            n_parts = n_tokens // window
            if n_parts == 0:
                warns.append(
                    f"book ({stream.author_id}, {stream.doc_id}) excluded: "
                    f"{n_tokens} tokens < window {window}")
                continue
            books.append({"author": stream.author_id, "doc": stream.doc_id,
                          "n_partitions": n_parts,
                          "discarded_tokens": n_tokens - n_parts * window})
        if not books:
            raise EmptySeries(f"no book yields a partition at window {window}")
        _dump_json({"window": window, "books": books}, stage_dir / "partitions.json")
        self._memo.pop(("metric_rows", str(self.out)), None)
        return ["partitions.json"], warns

    def _run_metrics(self, ups):
        cfg = self.config
        stage_dir = self._stage_dir("metrics")
        window = self._partition_meta()["window"]
        included = {(b["author"], b["doc"]) for b in self._partition_meta()["books"]}
        files = []
        for stream in self._streams():
            book = (stream.author_id, stream.doc_id)
            if book not in included:
                continue
            parts = netbuild.partition_stream(stream, window)
            rows = [graphmetrics.compute_all(netbuild.build_network(p), p,
                                             clique_cap=cfg.clique_cap)
                    for p in parts]
            name = _safe_name(*book) + ".csv"
            graphmetrics.write_metrics_csv(rows, stage_dir / name)
            files.append(name)
        self._memo.pop(("metric_rows", str(self.out)), None)
        self._memo.pop(("series", str(self.out)), None)
        return files, []

    def _run_series(self, ups):
        stage_dir = self._stage_dir("series")
        warns = []
        index = []
        for (author, doc), rows in sorted(self._metric_rows().items()):
            if len(rows) < 2:
                warns.append(f"book ({author}, {doc}) excluded from series: "
                             f"only {len(rows)} partition")
                continue
            index.append({"author": author, "doc": doc, "length": len(rows)})
        if not index:
            raise EmptySeries("no book has >= 2 partitions")
        _dump_json({"books": index}, stage_dir / "series_index.json")
        return ["series_index.json"], warns

    def _run_stationarity(self, ups):
        stage_dir = self._stage_dir("stationarity")
        entries = serieslab.stationarity_battery(self._series_by_book(),
                                                 alpha=self.config.alpha)
        report = serieslab.battery_to_dict(entries)
        _dump_json(report, stage_dir / "report.json")
        warns = [f"series flagged as possibly nonstationary: "
                 f"{f['book']}/{f['metric']}" for f in report["flagged"]]
        return ["report.json"], warns

    def _run_features(self, ups):
        stage_dir = self._stage_dir("features")
        moments_by_book = {}
        for book, per_metric in self._series_by_book().items():
            moments_by_book[book] = {
                name: serieslab.moments(series.values, metric=name)
                for name, series in per_metric.items()
            }
        matrix = featurespace.assemble(moments_by_book)
        warns = []
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            normalized = featurespace.minmax_normalize(matrix)
        warns.extend(str(w.message) for w in caught)
        featurespace.write_matrix_csv(matrix, stage_dir / "matrix.csv")
        featurespace.write_matrix_csv(normalized, stage_dir / "normalized.csv")
        self._memo.pop(("matrices", str(self.out)), None)
        return ["matrix.csv", "normalized.csv"], warns

    def _selection_data(self):
        raw, norm = self._matrices()
        labels = norm.labels
        classes = sorted(set(labels))
        lookup = {c: i for i, c in enumerate(classes)}
        y = np.asarray([lookup[lab] for lab in labels])
        per_fold = self.config.normalize_scope == "train"
        x = raw.values if per_fold else norm.values
        folds = classify.stratified_kfold(labels, self.config.folds,
                                          self.config.seed)
        return norm, x, y, folds, per_fold

    def _cv_rate(self, spec, x, y, folds, per_fold, subset) -> float:
        cols = list(subset)
        xs = x[:, cols] if cols else x[:, :0]
        pred = classify.cross_val_predict(spec, xs, y, folds,
                                          normalize_per_fold=per_fold)
        return float(np.mean(pred == y))

    def _run_select(self, ups):
        cfg = self.config
        stage_dir = self._stage_dir("select")
        norm, x, y, folds, per_fold = self._selection_data()
        if cfg.theta_grid is not None:
            path = [(theta, featurespace.variance_threshold(norm, theta))
                    for theta in sorted(cfg.theta_grid)]
        else:
            path = featurespace.variance_sweep(norm)
        files = []
        variance_report = {"path": [], "best": {}}
        summary = {"variance_best": {}, "score_best": {}}
        for theta, subset in path:
            entry = {"theta": theta, "n_attrs": len(subset),
                     "columns": [norm.columns[j] for j in subset.indices],
                     "scores": {}}
            variance_report["path"].append(entry)
        for kind in cfg.kinds:
            spec = cfg.spec_for(kind)
            best = None
            for entry, (theta, subset) in zip(variance_report["path"], path):
                score = self._cv_rate(spec, x, y, folds, per_fold, subset.indices)
                entry["scores"][kind] = score
                rank = (score, -len(subset), -theta)
                if best is None or rank > best[0]:
                    best = (rank, theta, subset, score)
            _, theta, subset, score = best
            variance_report["best"][kind] = {
                "theta": theta, "score": score, "n_attrs": len(subset),
                "columns": [norm.columns[j] for j in subset.indices]}
            summary["variance_best"][kind] = list(subset.indices)
        _dump_json(variance_report, stage_dir / "variance.json")
        files.append("variance.json")
        for kind in cfg.kinds:
            spec = cfg.spec_for(kind)
            trace = featurespace.greedy_backward_select(
                norm,
                lambda subset: self._cv_rate(spec, x, y, folds, per_fold, subset),
                beam_cap=cfg.beam_cap)
            best_score, level = trace.best()
            chosen = level.subsets[0]
            doc = trace.to_dict()
            doc["best"] = {"score": best_score, "level": level.level,
                           "n_attrs": level.size,
                           "columns": [norm.columns[j] for j in chosen]}
            _dump_json(doc, stage_dir / f"greedy_{kind}.json")
            files.append(f"greedy_{kind}.json")
            summary["score_best"][kind] = list(chosen)
        _dump_json(summary, stage_dir / "subsets.json")
        files.append("subsets.json")
        return files, []

    def _run_extract(self, ups):
        cfg = self.config
        stage_dir = self._stage_dir("extract")
        norm, x, y, folds, per_fold = self._selection_data()
        warns = []
        files = []
        n, d = norm.values.shape
        pca_comps = min(cfg.pca_comps, n, d)
        if pca_comps != cfg.pca_comps:
            warns.append(f"pca_comps reduced to {pca_comps} (matrix is {n}x{d})")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            pca_embedding, pca_model = manifold.pca_fit_transform(
                norm.values, pca_comps)
        warns.extend(str(w.message) for w in caught)
        manifold.write_embedding_csv(pca_embedding, norm.rows,
                                     stage_dir / "pca.csv")
        _dump_json({"eigenvalues": pca_model.eigenvalues.tolist(),
                    "n_comps": pca_comps}, stage_dir / "pca.json")
        files += ["pca.csv", "pca.json"]

        nn, nc = cfg.isomap_neighbors, cfg.isomap_comps
        sweep_doc = None
        if cfg.sweep:
            spec = cfg.spec_for(cfg.sweep_classifier)
            sweep = manifold.parameter_sweep(
                norm.values,
                lambda emb: float(np.mean(
                    classify.cross_val_predict(spec, emb, y, folds) == y)),
                lo=cfg.sweep_lo, hi=cfg.sweep_hi, bridge=cfg.isomap_bridge)
            sweep_doc = sweep.to_dict()
            if sweep.best is None:
                raise NetstyloError("isomap sweep found no connected cell")
            _, nn, nc = sweep.best
        nn = min(nn, n - 1)
        nc = min(nc, n)
        if (nn, nc) != (cfg.isomap_neighbors, cfg.isomap_comps) and not cfg.sweep:
            warns.append(f"isomap parameters clamped to ({nn}, {nc})")
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            iso_embedding, iso_model = manifold.isomap_embed(
                norm.values, nn, nc, bridge=cfg.isomap_bridge)
        warns.extend(str(w.message) for w in caught)
        for a, b in iso_model.bridged_links:
            warns.append(f"isomap neighbor graph bridged rows {a} and {b}")
        manifold.write_embedding_csv(iso_embedding, norm.rows,
                                     stage_dir / "isomap.csv")
        rows_2d = manifold.export_2d(iso_embedding, norm.rows)
        lines = ["x,y,author,book\n"]
        lines += [f"{repr(px)},{repr(py)},{a},{b}\n" for px, py, a, b in rows_2d]
        (stage_dir / "isomap_2d.csv").write_text("".join(lines), encoding="utf-8")
        _dump_json({"n_neighbors": nn, "n_comps": nc,
                    "eigenvalues": iso_model.eigenvalues.tolist(),
                    "bridged_links": [list(l) for l in iso_model.bridged_links],
                    "sweep": sweep_doc},
                   stage_dir / "isomap.json")
        files += ["isomap.csv", "isomap_2d.csv", "isomap.json"]
        return files, warns

    def _run_classify(self, ups):
        cfg = self.config
        stage_dir = self._stage_dir("classify")
        norm, x, y, folds, per_fold = self._selection_data()
        labels = norm.labels
        warns = []
        if len(set(labels)) == 1:
            warns.append("degenerate corpus: a single author class")
        subsets = json.loads((self.out / "select" / "subsets.json")
                             .read_text(encoding="utf-8"))
        embeddings = {}
        for name in ("pca", "isomap"):
            emb = featurespace.read_matrix_csv(self.out / "extract" / f"{name}.csv")
            embeddings[name] = emb.values
        results = {}
        files = []
        d = norm.values.shape[1]
        for kind in cfg.kinds:
            spec = cfg.spec_for(kind)
            results[kind] = {}
            for combo in COMBINATIONS:
                if combo == "whole":
                    subset = tuple(range(d))
                elif combo == "mu1":
                    subset = featurespace.moment_slice(norm, "mu1").indices
                elif combo == "dynamic":
                    subset = featurespace.moment_slice(norm, "dynamic").indices
                elif combo == "variance_best":
                    subset = tuple(subsets["variance_best"][kind])
                elif combo == "score_best":
                    subset = tuple(subsets["score_best"][kind])
                else:
                    subset = None
                if subset is None:  # extracted features, classified as-is
                    emb = embeddings[combo]
                    report = classify.evaluate(
                        spec, emb, labels, tuple(range(emb.shape[1])),
                        cfg.folds, cfg.seed)
                else:
                    report = classify.evaluate(
                        spec, x, labels, subset, cfg.folds, cfg.seed,
                        normalize_per_fold=per_fold)
                doc = report.to_dict()
                doc["combination"] = combo
                name = f"report_{combo}__{kind}.json"
                _dump_json(doc, stage_dir / name)
                files.append(name)
                results[kind][combo] = doc
        zeror = classify.evaluate(classify.ClassifierSpec("zeror", seed=cfg.seed),
                                  x, labels, tuple(range(d)), cfg.folds, cfg.seed,
                                  normalize_per_fold=per_fold)
        summary = {
            "kinds": cfg.kinds,
            "zeror_whole": zeror.to_dict(),
            "cells": {kind: {combo: results[kind][combo]["success_rate"]
                             for combo in COMBINATIONS}
                      for kind in cfg.kinds},
        }
        _dump_json(summary, stage_dir / "classify.json")
        files.append("classify.json")
        return files, warns

    def _run_report(self, ups):
        cfg = self.config
        stage_dir = self._stage_dir("report")
        summary = json.loads((self.out / "classify" / "classify.json")
                             .read_text(encoding="utf-8"))
        stationarity = json.loads((self.out / "stationarity" / "report.json")
                                  .read_text(encoding="utf-8"))
        cells = summary["cells"]
        kinds = summary["kinds"]
        lines = ["combination," + ",".join(kinds) + "\n"]
        for combo in COMBINATIONS:
            row = [f"{100.0 * cells[kind][combo]:.2f}" for kind in kinds]
            lines.append(combo + "," + ",".join(row) + "\n")
        (stage_dir / "table.csv").write_text("".join(lines), encoding="utf-8")

        comparison = {}
        for kind in kinds:
            per_combo = {}
            for combo in ("whole", "pca", "isomap"):
                doc = json.loads(
                    (self.out / "classify" / f"report_{combo}__{kind}.json")
                    .read_text(encoding="utf-8"))
                per_combo[combo] = {
                    "precision": doc["macro_precision"],
                    "recall": doc["micro_recall"],
                }
            comparison[kind] = per_combo
        upstream_warnings = []
        for stage in STAGES[:-1]:
            art = self._load_artifact(stage)
            if art is not None:
                upstream_warnings.extend(
                    f"{stage}: {w}" for w in art.warnings)
        report = {
            "combinations": list(COMBINATIONS),
            "kinds": kinds,
            "success_rates": cells,
            "zeror_baseline": summary["zeror_whole"]["success_rate"],
            "extraction_comparison": comparison,
            "stationarity_flags": stationarity["flagged"],
            "warnings": upstream_warnings,
            "seed": cfg.seed,
            "folds": cfg.folds,
            "window": self._partition_meta()["window"],
        }
        _dump_json(report, stage_dir / "experiment.json")
        return ["table.csv", "experiment.json"], []


def run_experiment(config: PipelineConfig) -> tuple[dict, int]:
    """Run the full pipeline through the report stage.

    Returns (experiment report dict, warning count across stages).
    """
    run = PipelineRun(config)
    run.run_stage("report")
    report = json.loads((Path(config.out) / "report" / "experiment.json")
                        .read_text(encoding="utf-8"))
    return report, len(report.get("warnings", []))
