import numpy as np
import pytest

import oracles
from lbrc.data import Dataset
from lbrc.empirical import build_empirical, classic_at_risk, event_cdf


def random_dataset(rng, n, tie_prob=0.3, censor_prob=0.3, allow_zero_v=True):
    """Random small dataset; with some probability values land on a coarse
    lattice so ties (including a-vs-v collisions) actually occur."""
    if rng.random() < tie_prob:
        a = rng.integers(1, 8, n) * 0.25
        v = rng.integers(0 if allow_zero_v else 1, 8, n) * 0.25
    else:
        a = rng.uniform(0.05, 2.0, n)
        v = rng.uniform(0.0, 2.0, n)
    delta = (rng.random(n) > censor_prob).astype(int)
    return Dataset(a, v, delta)


def probe_points(d):
    vals = np.concatenate([d.a, d.v, d.y])
    pts = np.unique(np.concatenate([vals, vals + 0.1, vals - 0.1, [0.0, vals.max() + 5.0]]))
    return pts[pts >= 0]


def test_event_cdf_single_event():
    d = Dataset([1.0], [2.0], [1])
    nb = event_cdf(d)
    assert nb.at(2.9) == 0.0
    assert nb.at(3.0) == 1.0


def test_event_cdf_single_censored():
    d = Dataset([1.0], [2.0], [0])
    nb = event_cdf(d)
    assert nb.at(100.0) == 0.0


def test_event_cdf_two_events():
    d = Dataset([1.0, 1.0], [1.0, 3.0], [1, 1])
    nb = event_cdf(d)
    assert nb.at(2.0) == 0.5
    assert nb.at(4.0) == 1.0


def test_at_risk_closed_interval():
    d = Dataset([1.0], [2.0], [1])
    rb = classic_at_risk(d)
    assert rb.at(0.5) == 0.0
    assert rb.at(1.0) == 1.0
    assert rb.at(3.0) == 1.0
    assert rb.at(3.1) == 0.0


def test_at_risk_two_subjects():
    d = Dataset([1.0, 2.0], [2.0, 3.0], [1, 1])
    rb = classic_at_risk(d)
    assert rb.at(2.5) == 1.0


def test_at_risk_vanishes_beyond_exits():
    rng = np.random.default_rng(0)
    d = random_dataset(rng, 12)
    rb = classic_at_risk(d)
    assert rb.at(float(d.y.max()) + 1.0) == 0.0


def test_pooled_counts_one_observation():
    d = Dataset([1.0], [2.0], [1])
    e = build_empirical(d)
    assert e.pooled_cdf.at(1.0) == 1.0
    assert e.pooled_cdf.at(2.0) == 2.0
    assert e.pooled_at_risk.at(1.0) == 2.0
    assert e.pooled_at_risk.at(2.0) == 1.0
    assert e.pooled_at_risk.at(2.1) == 0.0


def test_pooled_counts_censored_residual():
    d = Dataset([1.0], [2.0], [0])
    e = build_empirical(d)
    assert e.residual_event_cdf.at(10.0) == 0.0
    assert e.residual_at_risk.at(2.0) == 1.0


def test_pooled_at_risk_mixed():
    d = Dataset([1.0, 2.0], [5.0, 6.0], [1, 1])
    e = build_empirical(d)
    assert e.pooled_at_risk.at(1.5) == pytest.approx(1.5)


@pytest.mark.parametrize("seed", range(12))
def test_brute_force_equality(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 51))
    d = random_dataset(rng, n)
    e = build_empirical(d)
    for t in probe_points(d):
        assert e.event_cdf.at(t) == pytest.approx(oracles.n_bar_at(d, t), abs=1e-12)
        assert e.at_risk.at(t) == pytest.approx(oracles.r_bar_at(d, t), abs=1e-12)
        assert e.pooled_cdf.at(t) == pytest.approx(oracles.q_tilde_at(d, t), abs=1e-12)
        assert e.pooled_at_risk.at(t) == pytest.approx(oracles.k_tilde_at(d, t), abs=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_monotonicity_and_bounds(seed):
    rng = np.random.default_rng(100 + seed)
    d = random_dataset(rng, int(rng.integers(2, 40)))
    e = build_empirical(d)
    pts = probe_points(d)
    q = e.pooled_cdf.at(pts)
    k = e.pooled_at_risk.at(pts)
    r = e.at_risk.at(pts)
    assert np.all(np.diff(q) >= -1e-15)
    assert np.all(np.diff(k) <= 1e-15)
    assert np.all((k >= 0) & (k <= 2))
    assert np.all((r >= -1e-15) & (r <= 1))
    # counting consistency: at risk can't exceed entered or still-present
    entered = e.entry_cdf.at(pts)
    present = e.exit_survival.at(pts)
    assert np.all(r <= entered + 1e-15)
    assert np.all(r <= present + 1e-15)


def test_totals():
    rng = np.random.default_rng(42)
    d = random_dataset(rng, 25, allow_zero_v=False)
    e = build_empirical(d)
    big = float(d.y.max()) + 10
    assert e.event_cdf.at(big) == pytest.approx(d.n_events / d.n)
    assert e.pooled_cdf.at(big) == pytest.approx(1.0 + d.n_events / d.n)
    tiny = 1e-12
    if d.a.min() > 0 and d.v.min() > 0:
        assert e.pooled_at_risk.at(tiny) == pytest.approx(2.0)
