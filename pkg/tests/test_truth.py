import numpy as np
import pytest
from scipy import integrate

from lbrc.errors import ConfigError
from lbrc.truth import ExponentialModel, WeibullModel, make_model

MODELS = [
    ExponentialModel(censor_rate=0.5, rate=1.0),
    ExponentialModel(censor_rate=None, rate=2.0),
    ExponentialModel(censor_rate=1.5, rate=0.7),
    WeibullModel(censor_rate=0.5, shape=1.5, scale=1.0),
    WeibullModel(censor_rate=None, shape=2.0, scale=1.3),
]

GRID_Q = np.linspace(0.05, 0.9, 20)


def quad(fn, lo, hi):
    val, _ = integrate.quad(fn, lo, hi, limit=300)
    return val


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_entry_density_integrates_to_one(model):
    total = quad(lambda u: model.entry_density(u), 0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_entry_survival_matches_defining_integral(model):
    for t in model.quantile(GRID_Q):
        direct = quad(lambda u: model.survival(u), t, np.inf) / model.mu
        assert model.entry_survival(t) == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_cumhaz_is_neg_log_survival(model):
    t = model.quantile(GRID_Q)
    assert np.allclose(model.cumhaz(t), -np.log(model.survival(t)), atol=1e-10)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_risk_matches_defining_probability(model):
    # P(A <= t <= Y): integrate the joint density of (A, V) with the
    # censoring clock surviving past t - a
    lc = model.censor_rate
    for t in model.quantile(np.linspace(0.1, 0.85, 6)):
        def inner(aa):
            keep = model.survival(t)  # integral of f(a+v) over v >= t-a
            cens = 1.0 if lc is None else np.exp(-lc * (t - aa))
            return keep / model.mu * cens

        direct = quad(inner, 0, t)
        assert model.risk(t) == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_event_subdist_matches_quadrature(model):
    for t in model.quantile(np.linspace(0.1, 0.9, 8)):
        direct = quad(model.event_subdist_density, 0, t)
        assert model.event_subdist(t) == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_pooled_at_risk_identity(model):
    # pooled at-risk = entry survival * (1 + censor survival), because the
    # entry delay and the residual share a marginal and the clock is free
    t = model.quantile(GRID_Q)
    lhs = model.pooled_at_risk(t)
    rhs = model.entry_survival(t) * (1.0 + model.censor_survival(t))
    assert np.allclose(lhs, rhs, atol=1e-12)
    for tt in model.quantile(np.linspace(0.1, 0.9, 6)):
        # the residual survives past tt iff both the residual lifetime and
        # the independent clock do; the residual shares the entry marginal
        marginal_tail = quad(lambda u: model.entry_density(u), tt, np.inf)
        clock = 1.0 if model.censor_rate is None else np.exp(-model.censor_rate * tt)
        direct = marginal_tail + marginal_tail * clock
        assert model.pooled_at_risk(tt) == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_pooled_cdf_matches_quadrature(model):
    for t in model.quantile(np.linspace(0.1, 0.9, 6)):
        direct = quad(model.pooled_density, 0, t)
        assert model.pooled_cdf(t) == pytest.approx(direct, abs=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_exit_cdf_matches_quadrature_and_reaches_one(model):
    for t in model.quantile(np.linspace(0.1, 0.9, 6)):
        direct = quad(model.exit_density, 0, t)
        assert model.exit_cdf(t) == pytest.approx(direct, abs=1e-8)
    total = quad(model.exit_density, 0, np.inf)
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_event_fraction_complements_censoring(model):
    total = quad(model.event_subdist_density, 0, np.inf)
    assert model.event_fraction() == pytest.approx(total, abs=1e-8)
    assert 0 < model.event_fraction() <= 1


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_alpha_is_one(model):
    assert model.alpha == 1.0


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_risk_vanishes_at_origin(model):
    small = np.array([1e-9, 1e-6, 1e-3])
    vals = model.risk(small)
    assert np.all(np.diff(vals) > 0)
    assert vals[0] < 1e-6


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_hazard_identity_event_density_over_risk(model):
    # the defining identity: event-subdistribution density over risk equals
    # the plain lifetime hazard
    t = model.quantile(GRID_Q)
    lhs = model.event_subdist_density(t) / model.risk(t)
    rhs = model.density(t) / model.survival(t)
    assert np.allclose(lhs, rhs, rtol=1e-10)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_h_quantile_inverts_exit_cdf(model):
    for q in (0.5, 0.9, 0.95):
        t = model.h_quantile(q)
        assert model.exit_cdf(t) == pytest.approx(q, abs=1e-9)


@pytest.mark.parametrize("model", MODELS, ids=str)
def test_mean_exit_time(model):
    direct = quad(lambda u: 1.0 - model.exit_cdf(u), 0, model.lb_quantile(1 - 1e-10))
    assert model.mean_exit_time() == pytest.approx(direct, abs=1e-6)


def test_lb_quantile_round_trip():
    model = ExponentialModel(censor_rate=None, rate=1.0)
    # length-biased CDF of the exponential is the shape-2 gamma CDF
    from scipy import special

    p = np.linspace(0.05, 0.95, 10)
    t = model.lb_quantile(p)
    assert np.allclose(special.gammainc(2.0, t), p, atol=1e-12)


def test_default_grid():
    model = ExponentialModel(censor_rate=0.5, rate=1.0)
    grid = model.default_grid()
    assert grid.points.size == 25
    assert grid.points[0] == pytest.approx(model.quantile(0.10))
    assert grid.b == pytest.approx(model.quantile(0.90))


def test_make_model_validation():
    assert isinstance(make_model("exponential", rate=2.0), ExponentialModel)
    assert isinstance(make_model("weibull", shape=2.0, scale=1.0), WeibullModel)
    with pytest.raises(ConfigError):
        make_model("gamma")
    with pytest.raises(ConfigError):
        make_model("exponential", rate=-1.0)
    with pytest.raises(ConfigError):
        make_model("exponential", shape=2.0)
    with pytest.raises(ConfigError):
        make_model("weibull", shape=0.0)
    with pytest.raises(ConfigError):
        ExponentialModel(censor_rate=-0.5, rate=1.0)


def test_zero_censor_rate_normalizes_to_none():
    model = ExponentialModel(censor_rate=0.0, rate=1.0)
    assert model.censor_rate is None
    assert model.event_fraction() == 1.0
