import json
from pathlib import Path

import numpy as np
import pytest
from statsmodels.tsa.adfvalues import mackinnonp

from chanforecast.analysis import (
    CSV_COLUMNS,
    MetricsReport,
    achievable_se,
    adf_test,
    cosine_similarity,
    mean_nmse,
    nmse,
    pvalue_cdf,
    reports_from_csv,
    reports_to_csv,
    reports_to_json,
    schwert_lags,
    segment_pvalues,
    to_db,
)
from chanforecast.analysis.adf import df_statistics, simulate_df_distribution
from chanforecast.channel import build_dataset, preset
from chanforecast.predictors import zf_beamform

from conftest import crandn

TABLE = Path(__file__).parent / "data" / "df_mc_table.json"


def load_table():
    return json.loads(TABLE.read_text())


def random_walk(seed, n=1000):
    return np.cumsum(np.random.default_rng(seed).standard_normal(n))


def ar1(seed, phi=0.5, n=1000):
    e = np.random.default_rng(seed).standard_normal(n)
    y = np.empty(n)
    y[0] = e[0]
    for t in range(1, n):
        y[t] = phi * y[t - 1] + e[t]
    return y


def speed_battery(speed, seed=0):
    """16 trajectories x 13 segments = 208 segment p-values."""
    cfg = preset("NLOS", speed_kmh=speed, n_snapshots=700, seed=seed)
    ds = build_dataset(cfg, 16, 15, (1,), 0.75, seed=seed, threads=1)
    return pvalue_cdf(ds.snapshots, 100, 50, "schwert")


class TestNmse:
    def test_exact_prediction(self, rng):
        h = crandn(rng, 4, 8)
        assert np.all(nmse(h, h) == 0)

    def test_zero_prediction_is_0db(self, rng):
        h = crandn(rng, 8)
        assert nmse(np.zeros_like(h), h) == pytest.approx(1.0)
        assert to_db(nmse(np.zeros_like(h), h)) == pytest.approx(0.0, abs=1e-12)

    def test_double_is_one(self, rng):
        h = crandn(rng, 8)
        assert nmse(2 * h, h) == pytest.approx(1.0, rel=1e-14)

    def test_zero_truth(self):
        with pytest.raises(ValueError):
            nmse(np.ones(3), np.zeros(3))

    def test_scale_invariance(self, rng):
        p, h = crandn(rng, 5, 8), crandn(rng, 5, 8)
        c = -0.7 + 3.1j
        np.testing.assert_allclose(nmse(c * p, c * h), nmse(p, h), rtol=1e-12)

    def test_aggregate_is_mean_of_ratios(self):
        truth = np.array([[1.0, 0.0], [0.0, 10.0]])
        pred = np.array([[0.0, 0.0], [0.0, 9.0]])
        # ratios 1 and 0.01, not total error / total power
        assert mean_nmse(pred, truth) == pytest.approx(0.505)


class TestCosine:
    def test_self(self, rng):
        a = crandn(rng, 6)
        assert cosine_similarity(a, a) == pytest.approx(1.0, rel=1e-14)

    def test_orthogonal(self):
        assert cosine_similarity(np.array([1, 0j]), np.array([0, 1 + 0j])) == 0.0

    @pytest.mark.parametrize("theta", [0.0, 1.3, -2.9])
    @pytest.mark.parametrize("c", [0.01, 1.0, 40.0])
    def test_phase_and_scale(self, rng, theta, c):
        a = crandn(rng, 6)
        assert cosine_similarity(np.exp(1j * theta) * c * a, a) == pytest.approx(1.0, rel=1e-12)

    def test_symmetric(self, rng):
        a, b = crandn(rng, 7, 5), crandn(rng, 7, 5)
        np.testing.assert_allclose(cosine_similarity(a, b), cosine_similarity(b, a), rtol=1e-14)

    def test_bounded(self, rng):
        c = cosine_similarity(crandn(rng, 200, 4), crandn(rng, 200, 4))
        assert np.all((c >= 0) & (c <= 1 + 1e-15))

    def test_zero_input(self):
        with pytest.raises(ValueError):
            cosine_similarity(np.zeros(2), np.ones(2))

    def test_zf_bridge(self, rng):
        hh, h = crandn(rng, 10, 32), crandn(rng, 10, 32)
        direct = np.abs(np.sum(np.conj(hh) * h, -1)) / (np.linalg.norm(hh, axis=-1) * np.linalg.norm(h, axis=-1))
        np.testing.assert_allclose(cosine_similarity(zf_beamform(hh), zf_beamform(h)), direct, atol=1e-14)


class TestAchievableSe:
    def test_orthogonal_beam(self):
        assert achievable_se(np.array([1, 0j]), np.array([0, 1 + 0j]), 0.5) == 0.0

    def test_unit_snr(self):
        h = np.array([0.6, 0.8j])
        w = np.conj(h) * 0.5
        assert achievable_se(h, w, 0.25) == pytest.approx(1.0, rel=1e-14)

    def test_snr_three(self):
        assert achievable_se(np.array([np.sqrt(3.0)]), np.array([1.0]), 1.0) == pytest.approx(2.0, rel=1e-14)

    def test_monotone(self, rng):
        h = crandn(rng, 8)
        gains = [achievable_se(h, s * np.conj(h), 1.0) for s in np.linspace(0, 3, 20)]
        assert np.all(np.diff(gains) >= 0)

    def test_bad_noise(self):
        with pytest.raises(ValueError):
            achievable_se(np.ones(2), np.ones(2), 0.0)


class TestAdf:
    def test_random_walk_not_rejected(self):
        assert adf_test(random_walk(0), lags=1).pvalue > 0.4

    def test_random_walk_pvalues_roughly_uniform(self):
        p = np.array([adf_test(random_walk(s, 300), lags=1).pvalue for s in range(200)])
        assert 0.02 < np.mean(p < 0.1) < 0.2

    @pytest.mark.parametrize("seed", range(5))
    def test_ar1_rejected(self, seed):
        assert adf_test(ar1(seed), lags=1).pvalue < 0.05

    def test_affine_invariance(self):
        y = random_walk(3, 400)
        for lags in (0, 1, 4):
            a, b = adf_test(y, lags), adf_test(2 * y + 5, lags)
            assert a.statistic == pytest.approx(b.statistic, rel=1e-10)

    def test_matches_vectorized(self):
        ys = np.stack([random_walk(s, 300) for s in range(4)])
        batch = df_statistics(ys, 2)
        single = [adf_test(y, 2).statistic for y in ys]
        np.testing.assert_allclose(batch, single, rtol=1e-10)

    def test_result_fields(self):
        r = adf_test(random_walk(1, 200), lags=3)
        assert (r.lags, r.nobs) == (3, 196)
        assert 0 <= r.pvalue <= 1

    def test_schwert(self):
        assert schwert_lags(100) == 12
        assert adf_test(random_walk(0, 100), "schwert").lags == 12

    def test_too_short(self):
        with pytest.raises(ValueError):
            adf_test(np.arange(12.0), lags=3)

    def test_singular(self):
        with pytest.raises(np.linalg.LinAlgError):
            adf_test(np.ones(50), lags=1)

    def test_pvalue_monotone_in_left_tail(self):
        t = np.linspace(-6, 0, 61)
        p = [mackinnonp(x, regression="c", N=1) for x in t]
        assert np.all(np.diff(p) >= 0)

    def test_critical_one_percent(self):
        assert mackinnonp(-3.43, regression="c", N=1) == pytest.approx(0.01, abs=0.003)


class TestMonteCarloTable:
    def test_table_shape(self):
        tab = load_table()
        assert tab["reps"] >= 100_000
        assert len(tab["probabilities"]) == len(tab["quantiles"])
        assert np.all(np.diff(tab["quantiles"]) > 0)

    def test_pvalue_map_against_table(self):
        tab = load_table()
        for prob, q in zip(tab["probabilities"], tab["quantiles"]):
            assert abs(mackinnonp(q, regression="c", N=1) - prob) < 0.01

    def test_table_one_percent_quantile(self):
        tab = load_table()
        q01 = tab["quantiles"][tab["probabilities"].index(0.01)]
        assert q01 == pytest.approx(-3.43, abs=0.03)

    def test_table_reproducible_in_distribution(self):
        """A fresh, smaller simulation agrees with the shipped quantiles."""
        tab = load_table()
        stats = simulate_df_distribution(500, lags=1, reps=20_000, seed=7)
        probs = np.array(tab["probabilities"])
        fresh = np.quantile(stats, probs)
        # empirical CDF of the fresh sample at the shipped quantiles
        ecdf = np.searchsorted(np.sort(stats), tab["quantiles"]) / stats.size
        np.testing.assert_allclose(ecdf, probs, atol=0.012)
        assert np.all(np.isfinite(fresh))


class TestSegments:
    def test_white_noise_rejected(self):
        rng = np.random.default_rng(5)
        snaps = (rng.standard_normal((4, 1000, 2)) + 0j)
        p = pvalue_cdf(snaps, 100, 50, lags=1)
        assert np.mean(p < 0.05) >= 0.95

    def test_rows_and_order(self):
        rng = np.random.default_rng(0)
        snaps = crandn(rng, 2, 300, 3)
        rows = segment_pvalues(snaps, 100, 50, antenna=1)
        assert [(r.trajectory, r.segment, r.start) for r in rows][:5] == [
            (0, 0, 0), (0, 1, 50), (0, 2, 100), (0, 3, 150), (0, 4, 200)]
        assert len(rows) == 10
        assert rows[3].statistic == pytest.approx(adf_test(snaps[0, 150:250, 1].real, 1).statistic)

    def test_cdf_sorted_and_deterministic(self):
        a = speed_battery(30.0, seed=4)
        b = speed_battery(30.0, seed=4)
        assert np.array_equal(a, b)
        assert np.all(np.diff(a) >= 0)

    def test_segment_too_long(self):
        with pytest.raises(ValueError):
            segment_pvalues(np.zeros((1, 50, 2), complex), 100, 10)

    def test_faster_ue_smaller_median_p(self):
        p30, p60 = speed_battery(30.0), speed_battery(60.0)
        assert p60.size >= 200
        assert np.median(p60) < np.median(p30)


class TestReport:
    def make(self, **kw):
        base = dict(scenario="NLOS", speed_kmh="60", horizon_ms=2.0, method="AR", nmse=0.1,
                    cosine_pct=87.5, n=1000, seeds=(0, 1, 2))
        base.update(kw)
        return MetricsReport(**base)

    def test_db(self):
        assert self.make().nmse_db == pytest.approx(-10.0)
        assert np.isnan(self.make(nmse=float("nan")).nmse_db)

    @pytest.mark.parametrize("kw", [{"nmse": -1.0}, {"cosine_pct": 101.0}, {"cosine_pct": -0.5}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            self.make(**kw)

    def test_golden_csv(self):
        text = reports_to_csv([self.make(), self.make(method="JLPCNet", nmse=float("nan"), cosine_pct=99.0)])
        assert text == (
            "scenario,speed_kmh,horizon_ms,method,nmse_db,cosine_pct,n\n"
            "NLOS,60,2.000,AR,-10.000000,87.500000,1000\n"
            "NLOS,60,2.000,JLPCNet,nan,99.000000,1000\n"
        )

    def test_csv_round_trip(self):
        rows = reports_from_csv(reports_to_csv([self.make()]))
        assert tuple(rows[0]) == CSV_COLUMNS
        assert float(rows[0]["nmse_db"]) == pytest.approx(-10.0)

    def test_csv_bad_header(self):
        with pytest.raises(ValueError):
            reports_from_csv("a,b\n1,2\n")

    def test_json(self):
        doc = json.loads(reports_to_json([self.make()], {"seed": 3}))
        assert doc["metadata"] == {"seed": 3}
        assert doc["reports"][0]["seeds"] == [0, 1, 2]
        assert doc["reports"][0]["nmse_db"] == pytest.approx(-10.0)
