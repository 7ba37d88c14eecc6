"""Analytic population models for stationary length-biased sampling.

Under a constant disease-onset rate, the sampled subject's lifetime is a
length-biased draw from the underlying lifetime distribution, the entry delay
is uniform on (0, lifetime), and the entry delay and the residual lifetime
share the marginal density ``S(t)/mu``.  Residual censoring is an independent
exponential clock.  Everything the simulation harness and the influence
oracle need follows in closed form or by cached quadrature:

* ``risk(t) = S(t) * wc(t) / mu``            (probability of being under
  observation and event-free at t, with ``wc`` the censoring-survival
  integral, reducing to ``t`` when there is no censoring)
* ``pooled_at_risk(t) = entry_survival(t) * (1 + censor_survival(t))``
* ``event_subdist_density(u) = f(u) * wc(u) / mu``

so that ``event_subdist_density / risk = f / S``, the plain hazard, which is
the identity everything else leans on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize, special

from .errors import ConfigError
from .stepfun import EvalGrid
from .quadrature import SmoothCumulative, uniform_edges

__all__ = ["TruthModel", "ExponentialModel", "WeibullModel", "make_model"]


@dataclass(frozen=True)
class TruthModel:
    """Shared machinery; subclasses provide the lifetime family."""

    censor_rate: float | None = None

    def __post_init__(self):
        lc = self.censor_rate
        if lc is not None:
            lc = float(lc)
            if not math.isfinite(lc) or lc < 0:
                raise ConfigError(f"censor rate must be finite and >= 0, got {lc}")
            if lc == 0.0:
                lc = None
            object.__setattr__(self, "censor_rate", lc)

    # -- lifetime family interface --------------------------------------
    @property
    def mu(self) -> float:
        raise NotImplementedError

    def survival(self, t):
        raise NotImplementedError

    def density(self, t):
        raise NotImplementedError

    def quantile(self, p):
        raise NotImplementedError

    def lb_quantile(self, p):
        """Quantile of the length-biased lifetime distribution."""
        raise NotImplementedError

    def entry_survival(self, t):
        raise NotImplementedError

    # -- generic population functions ------------------------------------
    @property
    def alpha(self) -> float:
        """P(exit time >= entry delay): structurally one in this design."""
        return 1.0

    @property
    def b_h(self) -> float:
        return math.inf

    def cdf(self, t):
        return 1.0 - self.survival(t)

    def cumhaz(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            out = -np.log(self.survival(t))
        return out if out.ndim else float(out)

    def entry_cdf(self, t):
        return 1.0 - self.entry_survival(t)

    def entry_density(self, t):
        return self.survival(t) / self.mu

    def entry_cumhaz(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            out = -np.log(self.entry_survival(t))
        return out if out.ndim else float(out)

    def censor_survival(self, t):
        t = np.asarray(t, dtype=float)
        if self.censor_rate is None:
            out = np.ones_like(t)
        else:
            out = np.exp(-self.censor_rate * t)
        return out if out.ndim else float(out)

    def wc(self, t):
        """Integral of censoring survival over (0, t); equals t uncensored."""
        t = np.asarray(t, dtype=float)
        if self.censor_rate is None:
            out = t.astype(float)
        else:
            out = -np.expm1(-self.censor_rate * t) / self.censor_rate
        return out if out.ndim else float(out)

    def risk(self, t):
        return self.survival(t) * self.wc(t) / self.mu

    def pooled_at_risk(self, t):
        return self.entry_survival(t) * (1.0 + self.censor_survival(t))

    def pooled_density(self, t):
        return self.survival(t) * (1.0 + self.censor_survival(t)) / self.mu

    def pooled_cdf(self, t):
        return self.entry_cdf(t) + self.residual_event_subdist(t)

    def event_subdist_density(self, u):
        return self.density(u) * self.wc(u) / self.mu

    def influence_weight(self, u):
        """Event-subdistribution density over squared risk."""
        return self.mu * self.density(u) / (self.survival(u) ** 2 * self.wc(u))

    def event_subdist(self, t):
        raise NotImplementedError

    def residual_event_subdist(self, t):
        """P(uncensored residual time <= t)."""
        raise NotImplementedError

    def exit_cdf(self, t):
        raise NotImplementedError

    def exit_density(self, u):
        return self.wc(u) * (
            self.density(u)
            + (0.0 if self.censor_rate is None else self.censor_rate) * self.survival(u)
        ) / self.mu

    def event_fraction(self) -> float:
        raise NotImplementedError

    def mean_exit_time(self) -> float:
        """E[entry delay + observed residual time]."""
        val, _ = integrate.quad(
            lambda u: self.entry_survival(u) * (1.0 + self.censor_survival(u)),
            0.0,
            np.inf,
            limit=200,
        )
        return float(val)

    def h_quantile(self, q: float) -> float:
        """Quantile of the total observed time distribution."""
        if not 0 < q < 1:
            raise ConfigError(f"quantile level must be in (0, 1), got {q}")
        hi = float(self.lb_quantile(q)) + 1.0
        return float(optimize.brentq(lambda t: self.exit_cdf(t) - q, 0.0, hi, xtol=1e-12))

    def default_grid(self, count: int = 25, lo: float = 0.10, hi: float = 0.90) -> EvalGrid:
        """Equispaced lifetime-CDF quantiles; stays inside the usable window."""
        pts = self.quantile(np.linspace(lo, hi, count))
        return EvalGrid(pts, float(pts[-1]))

    def key(self) -> tuple:
        raise NotImplementedError


@dataclass(frozen=True)
class ExponentialModel(TruthModel):
    """Exponential lifetimes; every population function is closed-form."""

    rate: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not math.isfinite(self.rate) or self.rate <= 0:
            raise ConfigError(f"rate must be finite and > 0, got {self.rate}")

    @property
    def mu(self) -> float:
        return 1.0 / self.rate

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(-self.rate * t)
        return out if out.ndim else float(out)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        out = self.rate * np.exp(-self.rate * t)
        return out if out.ndim else float(out)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        out = -np.expm1(-self.rate * t)
        return out if out.ndim else float(out)

    def cumhaz(self, t):
        t = np.asarray(t, dtype=float)
        out = self.rate * t
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        out = -np.log1p(-p) / self.rate
        return out if out.ndim else float(out)

    def lb_quantile(self, p):
        p = np.asarray(p, dtype=float)
        out = special.gammaincinv(2.0, p) / self.rate
        return out if out.ndim else float(out)

    # the entry delay of an exponential lifetime is again exponential
    def entry_survival(self, t):
        return self.survival(t)

    def entry_cdf(self, t):
        return self.cdf(t)

    def entry_cumhaz(self, t):
        return self.cumhaz(t)

    def event_subdist(self, t):
        t = np.asarray(t, dtype=float)
        lam = self.rate
        lc = self.censor_rate
        if lc is None:
            out = -np.expm1(-lam * t) - lam * t * np.exp(-lam * t)
        else:
            out = (lam**2 / lc) * (
                -np.expm1(-lam * t) / lam + np.expm1(-(lam + lc) * t) / (lam + lc)
            )
        return out if out.ndim else float(out)

    def residual_event_subdist(self, t):
        t = np.asarray(t, dtype=float)
        lam = self.rate
        lc = 0.0 if self.censor_rate is None else self.censor_rate
        out = -lam * np.expm1(-(lam + lc) * t) / (lam + lc)
        return out if out.ndim else float(out)

    def exit_cdf(self, t):
        lc = 0.0 if self.censor_rate is None else self.censor_rate
        return (1.0 + lc / self.rate) * self.event_subdist(t)

    def event_fraction(self) -> float:
        lc = 0.0 if self.censor_rate is None else self.censor_rate
        return self.rate / (self.rate + lc)

    def mean_exit_time(self) -> float:
        lc = 0.0 if self.censor_rate is None else self.censor_rate
        return 1.0 / self.rate + 1.0 / (self.rate + lc)

    def key(self) -> tuple:
        return ("exponential", self.rate, self.censor_rate)


# cached cumulative integrals for the Weibull family, keyed by model + span
_WEIBULL_TABLES: dict[tuple, dict[str, SmoothCumulative]] = {}


@dataclass(frozen=True)
class WeibullModel(TruthModel):
    """Weibull lifetimes; censored subdistributions use cached quadrature."""

    shape: float = 1.5
    scale: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not math.isfinite(self.shape) or self.shape <= 0:
            raise ConfigError(f"shape must be finite and > 0, got {self.shape}")
        if not math.isfinite(self.scale) or self.scale <= 0:
            raise ConfigError(f"scale must be finite and > 0, got {self.scale}")

    @property
    def mu(self) -> float:
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    def _z(self, t):
        return (np.asarray(t, dtype=float) / self.scale) ** self.shape

    def survival(self, t):
        out = np.exp(-self._z(t))
        return out if out.ndim else float(out)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        k, th = self.shape, self.scale
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(
                t > 0, (k / th) * (t / th) ** (k - 1.0) * np.exp(-self._z(t)), 0.0
            )
        return out if out.ndim else float(out)

    def cdf(self, t):
        out = -np.expm1(-self._z(t))
        return out if out.ndim else float(out)

    def cumhaz(self, t):
        out = self._z(t)
        return out if out.ndim else float(out)

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        out = self.scale * (-np.log1p(-p)) ** (1.0 / self.shape)
        return out if out.ndim else float(out)

    def lb_quantile(self, p):
        p = np.asarray(p, dtype=float)
        out = self.scale * special.gammaincinv(1.0 + 1.0 / self.shape, p) ** (1.0 / self.shape)
        return out if out.ndim else float(out)

    def entry_survival(self, t):
        out = special.gammaincc(1.0 / self.shape, self._z(t))
        return out if out.ndim else float(out)

    def _tables(self) -> dict[str, SmoothCumulative]:
        span = float(self.lb_quantile(1.0 - 1e-12)) * 1.5
        key = self.key() + (span,)
        if key not in _WEIBULL_TABLES:
            edges = uniform_edges(0.0, span, 4000)
            _WEIBULL_TABLES[key] = {
                "event_subdist": SmoothCumulative(self.event_subdist_density, edges),
                "residual_event": SmoothCumulative(
                    lambda u: self.survival(u) * self.censor_survival(u) / self.mu, edges
                ),
                "exit_cdf": SmoothCumulative(self.exit_density, edges),
            }
        return _WEIBULL_TABLES[key]

    def event_subdist(self, t):
        if self.censor_rate is None:
            # uncensored: the exit time is the length-biased lifetime itself
            out = special.gammainc(1.0 + 1.0 / self.shape, self._z(t))
            return out if out.ndim else float(out)
        return self._tables()["event_subdist"].query(t)

    def residual_event_subdist(self, t):
        if self.censor_rate is None:
            out = 1.0 - self.entry_survival(t)
            return out if np.ndim(out) else float(out)
        return self._tables()["residual_event"].query(t)

    def exit_cdf(self, t):
        if self.censor_rate is None:
            return self.event_subdist(t)
        return self._tables()["exit_cdf"].query(t)

    def event_fraction(self) -> float:
        if self.censor_rate is None:
            return 1.0
        val, _ = integrate.quad(self.event_subdist_density, 0.0, np.inf, limit=200)
        return float(val)

    def key(self) -> tuple:
        return ("weibull", self.shape, self.scale, self.censor_rate)


def make_model(family: str, censor_rate=None, **params) -> TruthModel:
    """Build a truth model from config-style arguments."""
    family = str(family).strip().lower()
    if family == "exponential":
        allowed = {"rate"}
        extra = set(params) - allowed
        if extra:
            raise ConfigError(f"unknown exponential parameter(s): {sorted(extra)}")
        return ExponentialModel(censor_rate=censor_rate, rate=float(params.get("rate", 1.0)))
    if family == "weibull":
        allowed = {"shape", "scale"}
        extra = set(params) - allowed
        if extra:
            raise ConfigError(f"unknown weibull parameter(s): {sorted(extra)}")
        return WeibullModel(
            censor_rate=censor_rate,
            shape=float(params.get("shape", 1.5)),
            scale=float(params.get("scale", 1.0)),
        )
    raise ConfigError(f"unknown family: {family!r} (expected exponential or weibull)")
