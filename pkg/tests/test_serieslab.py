import math

import numpy as np
import pytest

from netstylo.errors import (DegenerateSeries, EmptySeries, SeriesTooShort,
                             SingularRegression)
from netstylo.graphmetrics import METRIC_NAMES, NetworkMetrics
from netstylo.serieslab import (MetricSeries, adf_test, autocorrelation,
                                build_series, kpss_test, moments,
                                stationarity_battery)


def _metric_row(value: float) -> NetworkMetrics:
    return NetworkMetrics(clustering=value, diameter=value, radius=value,
                          cliques=int(abs(value)) + 1, load=value,
                          transitivity=value, betweenness=value,
                          shortest_path=value, degree=value,
                          intermittency=value, nodes=3, edges=2)


def test_build_series_shapes():
    rows = [_metric_row(float(i)) for i in range(14)]
    series = build_series("a", "d", rows)
    assert set(series) == set(METRIC_NAMES)
    assert all(len(s) == 14 for s in series.values())
    assert series["C"].values == tuple(float(i) for i in range(14))


def test_build_series_too_few():
    with pytest.raises(EmptySeries):
        build_series("a", "d", [_metric_row(1.0)])


# --- moments -----------------------------------------------------------------

def test_moments_hand_example():
    mv = moments([1, 2, 3, 4, 5])
    assert mv.mu1 == pytest.approx(3.0, abs=1e-12)
    assert mv.mu2 == pytest.approx(math.sqrt(2.5), abs=1e-12)
    assert mv.mu3 == 0.0
    assert mv.mu4 == pytest.approx(8.5 ** 0.25, abs=1e-12)
    # frozen spec-level tolerances
    assert mv.as_tuple() == pytest.approx((3.0, 1.58114, 0.0, 1.70747), abs=1e-5)


def test_moments_constant_series_exact():
    assert moments([7.25] * 9).as_tuple() == (7.25, 0.0, 0.0, 0.0)


def test_moments_right_skew_sign():
    mv = moments([0.0, 0.0, 0.0, 1.0])
    assert mv.mu3 > 0.0
    # radicand check: (1/3)(3(-1/4)^3 + (3/4)^3) = 0.125
    assert mv.mu3 == pytest.approx(0.125 ** (1.0 / 3.0))


def test_moments_left_skew_sign():
    assert moments([0.0, 1.0, 1.0, 1.0]).mu3 < 0.0


def test_moments_permutation_invariant():
    rng = np.random.default_rng(2)
    x = rng.normal(size=40)
    shuffled = rng.permutation(x)
    assert moments(x).as_tuple() == pytest.approx(moments(shuffled).as_tuple(),
                                                  abs=1e-12)


def test_moments_affine_equivariance():
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = rng.normal(size=int(rng.integers(5, 60)))
        a = float(rng.uniform(0.5, 3.0))
        b = float(rng.uniform(-2.0, 2.0))
        base = moments(x)
        scaled = moments(a * x + b)
        assert scaled.mu1 == pytest.approx(a * base.mu1 + b, abs=1e-9)
        for i in (2, 3, 4):
            assert getattr(scaled, f"mu{i}") == pytest.approx(
                a * getattr(base, f"mu{i}"), abs=1e-9)


def test_moments_too_short():
    with pytest.raises(EmptySeries):
        moments([1.0])


# --- autocorrelation ----------------------------------------------------------

def test_autocorrelation_lag_zero_and_band():
    acf, band = autocorrelation([1.0, 2.0, 1.5, 3.0, 2.5], max_lag=2)
    assert acf[0] == 1.0
    assert band == pytest.approx(1.96 / math.sqrt(5))


def test_autocorrelation_alternating():
    t = 500
    x = [1.0 if i % 2 == 0 else -1.0 for i in range(t)]
    acf, _ = autocorrelation(x, max_lag=1)
    assert acf[1] == pytest.approx(-(t - 1) / t, abs=1e-12)
    assert abs(acf[1] + 1.0) <= 1.5 / t


def test_autocorrelation_white_noise_inside_band():
    rng = np.random.default_rng(3)
    x = rng.normal(size=500)
    acf, band = autocorrelation(x, max_lag=20)
    inside = sum(1 for r in acf[1:] if abs(r) < band)
    assert inside >= 19  # >= 95% of 20 lags


def test_autocorrelation_degenerate():
    with pytest.raises(DegenerateSeries):
        autocorrelation([2.0] * 30, max_lag=3)


def test_autocorrelation_lag_validation():
    with pytest.raises(ValueError):
        autocorrelation([1.0, 2.0, 3.0], max_lag=3)


# --- stationarity tests --------------------------------------------------------

def test_kpss_matches_statsmodels_statistic():
    sm = pytest.importorskip("statsmodels.tsa.stattools")
    import warnings
    rng = np.random.default_rng(17)
    for trial in range(10):
        x = rng.normal(size=120) + 0.3 * np.sin(np.arange(120) / 9.0)
        rep = kpss_test(x)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            stat, _, _, _ = sm.kpss(x, regression="c", nlags=rep.lags)
        assert rep.statistic == pytest.approx(stat, abs=1e-6)


def test_adf_matches_statsmodels_statistic():
    sm = pytest.importorskip("statsmodels.tsa.stattools")
    rng = np.random.default_rng(23)
    makers = [
        lambda r, t: r.normal(size=t),
        lambda r, t: np.cumsum(r.normal(size=t)),
        lambda r, t: r.normal(size=t) + np.linspace(0, 1, t),
    ]
    for trial in range(10):
        t = int(rng.integers(80, 300))
        x = makers[trial % 3](rng, t)
        rep = adf_test(x)
        stat = sm.adfuller(x, maxlag=rep.lags, regression="c", autolag=None)[0]
        assert rep.statistic == pytest.approx(stat, abs=1e-6)


def test_kpss_null_and_direction():
    rng = np.random.default_rng(4)
    noise = rng.normal(size=500)
    rep = kpss_test(noise)
    assert rep.null_hypothesis == "stationary"
    assert rep.p_value > 0.05 and not rep.reject_at_05
    trend = 0.05 * np.arange(500) + rng.normal(size=500) * 0.1
    rep2 = kpss_test(trend)
    assert rep2.p_value < 0.05 and rep2.reject_at_05


def test_adf_null_and_direction():
    rng = np.random.default_rng(6)
    noise = rng.normal(size=500)
    rep = adf_test(noise)
    assert rep.test == "ADF"
    assert rep.null_hypothesis == "unit_root"
    assert rep.p_value < 0.05 and rep.reject_at_05
    walk = np.cumsum(rng.normal(size=500))
    rep2 = adf_test(walk)
    assert rep2.p_value > 0.05 and not rep2.reject_at_05


def test_adf_variants():
    rng = np.random.default_rng(8)
    x = rng.normal(size=200)
    fin = adf_test(x, "finite")
    asy = adf_test(x, "asymptotic")
    assert fin.test == "MacKinnon-finite"
    assert asy.test == "MacKinnon-asymptotic"
    assert fin.statistic == asy.statistic
    for rep in (fin, asy):
        assert 0.01 <= rep.p_value <= 0.10
    with pytest.raises(ValueError):
        adf_test(x, "bogus")


def test_adf_finite_vs_asymptotic_differ_near_boundary():
    # an AR(1) with root near unity lands between the critical values, where
    # the 1/T corrections actually move the interpolated p-value
    rng = np.random.default_rng(41)
    found = False
    for _ in range(50):
        x = np.empty(60)
        x[0] = 0.0
        eps = rng.normal(size=60)
        for i in range(1, 60):
            x[i] = 0.92 * x[i - 1] + eps[i]
        fin = adf_test(x, "finite")
        asy = adf_test(x, "asymptotic")
        if 0.01 < fin.p_value < 0.10:
            found = True
            assert fin.p_value != asy.p_value
    assert found


def test_stationarity_errors():
    with pytest.raises(SeriesTooShort):
        kpss_test(np.arange(10.0))
    with pytest.raises(SeriesTooShort):
        adf_test(np.arange(10.0))
    with pytest.raises(DegenerateSeries):
        kpss_test(np.full(50, 3.3))
    with pytest.raises(SingularRegression):
        adf_test(np.full(50, 3.3))


def test_calibration_small():
    rng = np.random.default_rng(9)
    adf_noise_rejects = 0
    kpss_noise_ok = 0
    for _ in range(20):
        noise = rng.normal(size=500)
        adf_noise_rejects += adf_test(noise).reject_at_05
        kpss_noise_ok += not kpss_test(noise).reject_at_05
    assert adf_noise_rejects >= 19
    assert kpss_noise_ok >= 19


# --- battery -------------------------------------------------------------------

def _series_book(values_per_metric):
    return {name: MetricSeries(author_id="a", doc_id="d", metric=name,
                               values=tuple(values_per_metric[name]))
            for name in METRIC_NAMES}


def test_battery_stationary_corpus_unflagged():
    rng = np.random.default_rng(12)
    book = _series_book({m: rng.normal(size=300) for m in METRIC_NAMES})
    entries = stationarity_battery({("a", "d"): book})
    assert len(entries) == 12
    assert all(not e.flagged for e in entries)
    assert all(set(e.reports) == {"KPSS", "ADF", "MacKinnon-finite",
                                  "MacKinnon-asymptotic"} for e in entries)


def test_battery_flags_trend_but_keeps_it():
    rng = np.random.default_rng(13)
    values = {m: rng.normal(size=300) for m in METRIC_NAMES}
    values["C"] = 0.02 * np.arange(300) + rng.normal(size=300) * 0.05
    entries = stationarity_battery({("a", "d"): _series_book(values)})
    by_metric = {e.metric: e for e in entries}
    assert by_metric["C"].flagged
    # flagged series stay in the report with full test results
    assert "KPSS" in by_metric["C"].reports
    assert sum(e.flagged for e in entries) == 1


def test_battery_records_degenerate_series():
    rng = np.random.default_rng(14)
    values = {m: rng.normal(size=300) for m in METRIC_NAMES}
    values["E"] = np.full(300, 5.0)
    entries = stationarity_battery({("a", "d"): _series_book(values)})
    by_metric = {e.metric: e for e in entries}
    assert by_metric["E"].error is not None
    assert not by_metric["E"].flagged
