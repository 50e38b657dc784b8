"""Per-book metric time series: assembly, autocorrelation, stationarity
testing and four-moment summaries.

The moment summary follows the (T-1)-normalized form with the i-th root taken
sign-preservingly for odd i, so skewness direction survives.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (DegenerateSeries, EmptySeries, SeriesTooShort,
                     SingularRegression)
from .graphmetrics import METRIC_NAMES, NetworkMetrics

TEST_IDS = ("KPSS", "ADF", "MacKinnon-finite", "MacKinnon-asymptotic")

# KPSS level-stationarity critical values, Kwiatkowski et al. (1992), Table 1.
_KPSS_CRIT = ((0.10, 0.347), (0.05, 0.463), (0.025, 0.574), (0.01, 0.739))

# MacKinnon (1994) response-surface coefficients for the approximate
# asymptotic p-value of the ADF tau statistic, constant-only regression:
# p = Phi(poly(tau)), with a switch point at tau* between the two branches.
_TAU_MAX = 2.74
_TAU_MIN = -18.83
_TAU_STAR = -1.61
_TAU_SMALLP = (2.1659, 1.4412, 0.038269)
_TAU_LARGEP = (1.7339, 0.93202, -0.12745, -0.010368)

# MacKinnon (2010) critical-value response surfaces for the ADF tau statistic,
# constant-only regression: cv(T) = b0 + b1/T + b2/T^2 + b3/T^3.
_CV_SURFACE = (
    (0.01, (-3.43035, -6.5393, -16.786, -79.433)),
    (0.05, (-2.86154, -2.8903, -4.234, -40.040)),
    (0.10, (-2.56677, -1.5384, -2.809, 0.0)),
)


@dataclass(frozen=True)
class MetricSeries:
    author_id: str
    doc_id: str
    metric: str
    values: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class StationarityReport:
    test: str
    statistic: float
    p_value: float
    null_hypothesis: str      # "stationary" (KPSS) or "unit_root" (ADF family)
    reject_at_05: bool
    lags: int


@dataclass(frozen=True)
class MomentVector:
    metric: str
    mu1: float
    mu2: float
    mu3: float
    mu4: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.mu1, self.mu2, self.mu3, self.mu4)


def build_series(author_id: str, doc_id: str,
                 rows: list[NetworkMetrics]) -> dict[str, MetricSeries]:
    """One series per metric from a book's per-partition metric rows."""
    if len(rows) < 2:
        raise EmptySeries(
            f"book ({author_id}, {doc_id}) has {len(rows)} partitions; need >= 2")
    columns = list(zip(*(m.as_row() for m in rows)))
    return {
        name: MetricSeries(author_id=author_id, doc_id=doc_id, metric=name,
                           values=tuple(col))
        for name, col in zip(METRIC_NAMES, columns)
    }


def autocorrelation(values, max_lag: int):
    """Sample autocorrelation r(0..max_lag) plus the 1.96/sqrt(T) band."""
    x = np.asarray(values, dtype=float)
    t = len(x)
    if not (t > max_lag >= 1):
        raise ValueError(f"need T > max_lag >= 1, got T={t}, max_lag={max_lag}")
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        raise DegenerateSeries("zero-variance series has no autocorrelation")
    acf = [1.0]
    for lag in range(1, max_lag + 1):
        acf.append(float(xc[lag:] @ xc[:-lag]) / denom)
    return acf, 1.96 / math.sqrt(t)


def moments(values, metric: str = "") -> MomentVector:
    """First four moments: mean, then sign-preserving i-th roots of the
    (T-1)-normalized central sums for i = 2, 3, 4."""
    x = np.asarray(values, dtype=float)
    t = len(x)
    if t < 2:
        raise EmptySeries(f"need >= 2 series values for moments, got {t}")
    if np.all(x == x[0]):
        return MomentVector(metric=metric, mu1=float(x[0]), mu2=0.0, mu3=0.0, mu4=0.0)
    mu1 = float(x.mean())
    dev = x - mu1
    out = [mu1]
    for i in (2, 3, 4):
        radicand = float(np.sum(dev ** i)) / (t - 1)
        root = math.copysign(abs(radicand) ** (1.0 / i), radicand)
        out.append(root)
    return MomentVector(metric=metric, mu1=out[0], mu2=out[1], mu3=out[2], mu4=out[3])


def _kpss_bandwidth(t: int) -> int:
    return int(4 * (t / 100.0) ** 0.25)


def _schwert_lag(t: int) -> int:
    return int(12 * (t / 100.0) ** 0.25)


def kpss_test(values, bandwidth: int | None = None) -> StationarityReport:
    """KPSS level-stationarity test with Bartlett-kernel long-run variance.

    The p-value is interpolated in the published critical-value table and
    clamped to [0.01, 0.10] outside it.
    """
    x = np.asarray(values, dtype=float)
    t = len(x)
    if t < 20:
        raise SeriesTooShort(f"KPSS needs T >= 20, got {t}")
    if np.all(x == x[0]):
        raise DegenerateSeries("KPSS is undefined on a constant series")
    lags = _kpss_bandwidth(t) if bandwidth is None else bandwidth
    resid = x - x.mean()
    s_hat = float(resid @ resid)
    for i in range(1, lags + 1):
        s_hat += 2.0 * float(resid[i:] @ resid[:-i]) * (1.0 - i / (lags + 1.0))
    sigma2 = s_hat / t
    eta = float(np.sum(np.cumsum(resid) ** 2)) / (t * t)
    stat = eta / sigma2
    p = _interp_pvalue(stat, [(cv, pv) for pv, cv in _KPSS_CRIT], increasing=True)
    return StationarityReport(test="KPSS", statistic=stat, p_value=p,
                              null_hypothesis="stationary",
                              reject_at_05=p < 0.05, lags=lags)


def _interp_pvalue(stat: float, cv_p: list[tuple[float, float]],
                   increasing: bool) -> float:
    """Piecewise-linear p-value from (critical value, p) pairs, clamped at the
    table edges.  `increasing` means larger statistics are more extreme."""
    pairs = sorted(cv_p)
    if not increasing:
        # map to a scale where larger == more extreme
        pairs = sorted((-cv, p) for cv, p in cv_p)
        stat = -stat
    # pairs now ascend in statistic while p descends
    if stat <= pairs[0][0]:
        return pairs[0][1]
    if stat >= pairs[-1][0]:
        return pairs[-1][1]
    for (c0, p0), (c1, p1) in zip(pairs, pairs[1:]):
        if c0 <= stat <= c1:
            frac = (stat - c0) / (c1 - c0)
            return p0 + frac * (p1 - p0)
    raise AssertionError("unreachable")


def _norm_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _adf_regression(x: np.ndarray, lag: int):
    """OLS of dx_t on (x_{t-1}, dx_{t-1..t-lag}, const); returns the tau
    statistic of the level coefficient."""
    t = len(x)
    xd = np.diff(x)
    n = t - 1 - lag
    y = xd[lag:]
    cols = [x[lag:t - 1]]
    for j in range(1, lag + 1):
        cols.append(xd[lag - j:t - 1 - j])
    cols.append(np.ones(n))
    design = np.column_stack(cols)
    k = design.shape[1]
    if n <= k:
        raise SeriesTooShort(f"only {n} usable observations for {k} parameters")
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < k:
        raise SingularRegression("ADF design matrix is rank-deficient")
    resid = y - design @ beta
    s2 = float(resid @ resid) / (n - k)
    try:
        xtx_inv = np.linalg.inv(design.T @ design)
    except np.linalg.LinAlgError as exc:
        raise SingularRegression("ADF design matrix is singular") from exc
    se = math.sqrt(s2 * float(xtx_inv[0, 0]))
    if se == 0.0:
        raise SingularRegression("zero standard error in ADF regression")
    return float(beta[0]) / se


def _mackinnon_surface_p(tau: float) -> float:
    """Approximate asymptotic p-value via the MacKinnon (1994) probit surface."""
    if tau > _TAU_MAX:
        return 1.0
    if tau < _TAU_MIN:
        return 0.0
    coeffs = _TAU_SMALLP if tau <= _TAU_STAR else _TAU_LARGEP
    z = sum(c * tau ** i for i, c in enumerate(coeffs))
    return _norm_cdf(z)


def _mackinnon_cv_p(tau: float, t: int | None) -> float:
    """P-value by interpolation in MacKinnon (2010) critical values; the
    finite-sample variant evaluates the 1/T correction terms, the asymptotic
    one uses the limiting constants (t=None)."""
    table = []
    for p, (b0, b1, b2, b3) in _CV_SURFACE:
        cv = b0 if t is None else b0 + b1 / t + b2 / t ** 2 + b3 / t ** 3
        table.append((cv, p))
    return _interp_pvalue(tau, table, increasing=False)


def adf_test(values, variant: str = "surface",
             lag: int | None = None) -> StationarityReport:
    """Augmented Dickey-Fuller test (constant-only regression, Schwert lag).

    variant:
      "surface"    - asymptotic p-value from the MacKinnon (1994) probit
                     response surface (the usual ADF p-value); reported as ADF.
      "finite"     - p-value interpolated in MacKinnon (2010) finite-sample
                     critical values, clamped to [0.01, 0.10].
      "asymptotic" - same, using the limiting critical values.
    """
    if variant not in ("surface", "finite", "asymptotic"):
        raise ValueError(f"unknown ADF variant {variant!r}")
    x = np.asarray(values, dtype=float)
    t = len(x)
    if t < 20:
        raise SeriesTooShort(f"ADF needs T >= 20, got {t}")
    if lag is None:
        lag = min(_schwert_lag(t), max(0, (t - 1) // 2 - 2))
    tau = _adf_regression(x, lag)
    if variant == "surface":
        p = _mackinnon_surface_p(tau)
        label = "ADF"
    elif variant == "finite":
        p = _mackinnon_cv_p(tau, t)
        label = "MacKinnon-finite"
    else:
        p = _mackinnon_cv_p(tau, None)
        label = "MacKinnon-asymptotic"
    return StationarityReport(test=label, statistic=tau, p_value=p,
                              null_hypothesis="unit_root",
                              reject_at_05=p < 0.05, lags=lag)


@dataclass
class BatteryEntry:
    author_id: str
    doc_id: str
    metric: str
    reports: dict[str, StationarityReport]
    error: str | None = None
    nonstationary_votes: int = 0
    flagged: bool = False


def stationarity_battery(series_by_book: dict[tuple[str, str], dict[str, MetricSeries]],
                         alpha: float = 0.05) -> list[BatteryEntry]:
    """Run all four tests on every (book, metric) series.

    A series collects a nonstationarity vote from KPSS when KPSS rejects, and
    from each unit-root test when that test fails to reject its unit-root
    null.  Two or more votes flag the series; flagged metrics are reported,
    never dropped.  Degenerate or too-short series are recorded with their
    error and not flagged.
    """
    entries: list[BatteryEntry] = []
    for (author_id, doc_id) in sorted(series_by_book):
        per_metric = series_by_book[(author_id, doc_id)]
        for metric in METRIC_NAMES:
            series = per_metric[metric]
            entry = BatteryEntry(author_id=author_id, doc_id=doc_id,
                                 metric=metric, reports={})
            try:
                entry.reports["KPSS"] = kpss_test(series.values)
                entry.reports["ADF"] = adf_test(series.values, "surface")
                entry.reports["MacKinnon-finite"] = adf_test(series.values, "finite")
                entry.reports["MacKinnon-asymptotic"] = adf_test(series.values,
                                                                 "asymptotic")
            except (DegenerateSeries, SeriesTooShort, SingularRegression) as exc:
                entry.error = f"{type(exc).__name__}: {exc}"
                entries.append(entry)
                continue
            votes = 0
            for test_id, rep in entry.reports.items():
                rejected = rep.p_value < alpha
                if rep.null_hypothesis == "stationary":
                    votes += int(rejected)
                else:
                    votes += int(not rejected)
            entry.nonstationary_votes = votes
            entry.flagged = votes >= 2
            entries.append(entry)
    return entries


def battery_to_dict(entries: list[BatteryEntry]) -> dict:
    """JSON-ready view: book -> metric -> test -> {statistic, p_value, reject}."""
    books: dict[str, dict] = {}
    flagged = []
    for e in entries:
        key = f"{e.author_id}/{e.doc_id}"
        slot = books.setdefault(key, {})
        if e.error is not None:
            slot[e.metric] = {"error": e.error}
            continue
        slot[e.metric] = {
            test: {"statistic": rep.statistic, "p_value": rep.p_value,
                   "null_hypothesis": rep.null_hypothesis,
                   "reject_at_05": rep.reject_at_05}
            for test, rep in e.reports.items()
        }
        slot[e.metric]["nonstationary_votes"] = e.nonstationary_votes
        slot[e.metric]["flagged"] = e.flagged
        if e.flagged:
            flagged.append({"book": key, "metric": e.metric})
    return {"books": books, "flagged": flagged}
