"""Raw empirical processes of an LBRC sample.

Two families of counting processes drive every estimator here:

* classic processes over total observed times: the event-fraction curve
  (fraction of subjects with an observed event by ``t``) and the
  closed-interval at-risk proportion (fraction with entry delay <= t <= exit);
* pooled processes over the *combined* sample of entry delays and residual
  times, which share a marginal distribution under stationary length-biased
  sampling and can therefore be stacked into one 2n-point sample.

"At risk" curves use ">= t" (closed) semantics: the subject leaving at ``t``
still counts at ``t``.  They are stored as step functions whose at-jump value
is the left limit of the strictly-greater count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .stepfun import StepFunction

__all__ = [
    "EmpiricalProcesses",
    "build_empirical",
    "event_cdf",
    "classic_at_risk",
    "exit_survival",
]


def _cdf_step(points: np.ndarray, n: int) -> StepFunction:
    """Cadlag empirical CDF: fraction of ``points`` <= t, out of ``n``."""
    if points.size == 0:
        return StepFunction.constant(0.0)
    uniq, counts = np.unique(points, return_counts=True)
    return StepFunction(uniq, np.cumsum(counts) / n, 0.0)


def _geq_count_step(points: np.ndarray, n: int) -> StepFunction:
    """Fraction of ``points`` >= t, with the closed value kept at each jump."""
    if points.size == 0:
        return StepFunction.constant(0.0)
    uniq, counts = np.unique(points, return_counts=True)
    cum = np.cumsum(counts)
    below = np.concatenate(([0], cum[:-1]))
    right = (points.size - cum) / n
    ats = (points.size - below) / n
    return StepFunction(uniq, right, points.size / n, ats)


@dataclass(frozen=True)
class EmpiricalProcesses:
    """All raw counting processes of one dataset, plus integer count tables.

    The step-function fields are the user-facing curves; the integer arrays
    (`pooled_times`, `pooled_jumps`, `pooled_at_risk_counts`, `event_times`,
    `event_counts`) carry exact counts for product-limit factors.
    """

    n: int
    event_cdf: StepFunction
    at_risk: StepFunction
    exit_survival: StepFunction
    entry_cdf: StepFunction
    residual_event_cdf: StepFunction
    pooled_cdf: StepFunction
    entry_at_risk: StepFunction
    residual_at_risk: StepFunction
    pooled_at_risk: StepFunction
    pooled_times: np.ndarray
    pooled_jumps: np.ndarray
    pooled_at_risk_counts: np.ndarray
    event_times: np.ndarray
    event_counts: np.ndarray

    def pooled_at_risk_at(self, t):
        """Pooled at-risk count fraction with ">= t" semantics."""
        return self.pooled_at_risk.at(t)


def event_cdf(d: Dataset) -> StepFunction:
    """Fraction of subjects with an observed event by time t."""
    return _cdf_step(d.y[d.delta == 1], d.n)


def exit_survival(d: Dataset) -> StepFunction:
    """Fraction of subjects with total observed time >= t (closed)."""
    return _geq_count_step(d.y, d.n)


def classic_at_risk(d: Dataset) -> StepFunction:
    """Closed-interval at-risk proportion: fraction with a <= t <= y.

    Implemented as (#{a <= t} - #{y < t}) / n via two half-open counting
    processes, so the subject exiting at t is still at risk at t.
    """
    return _cdf_step(d.a, d.n).combine(exit_survival(d), np.add) - 1.0


def build_empirical(d: Dataset) -> EmpiricalProcesses:
    """Construct every empirical process of the sample in one pass."""
    n = d.n
    a_sorted = np.sort(d.a)
    v_sorted = np.sort(d.v)
    uncensored_v = d.v[d.delta == 1]

    # pooled sample: entry delays always contribute mass; residual times
    # contribute mass only when uncensored, but enter the risk count always
    pooled_mass_pts = np.concatenate([d.a, uncensored_v])
    pooled_times = np.unique(np.concatenate([d.a, d.v]))
    mass_sorted = np.sort(pooled_mass_pts)
    below_mass = np.searchsorted(mass_sorted, pooled_times, side="left")
    upto_mass = np.searchsorted(mass_sorted, pooled_times, side="right")
    pooled_jumps = upto_mass - below_mass
    geq_a = n - np.searchsorted(a_sorted, pooled_times, side="left")
    geq_v = n - np.searchsorted(v_sorted, pooled_times, side="left")
    pooled_at_risk_counts = geq_a + geq_v

    mass_times = pooled_times[pooled_jumps > 0]

    y_events = d.y[d.delta == 1]
    event_times, event_counts = (
        np.unique(y_events, return_counts=True) if y_events.size else (np.empty(0), np.empty(0, dtype=int))
    )

    entry = _cdf_step(d.a, n)
    residual_event = _cdf_step(uncensored_v, n)
    entry_risk = _geq_count_step(d.a, n)
    residual_risk = _geq_count_step(d.v, n)

    return EmpiricalProcesses(
        n=n,
        event_cdf=event_cdf(d),
        at_risk=classic_at_risk(d),
        exit_survival=exit_survival(d),
        entry_cdf=entry,
        residual_event_cdf=residual_event,
        pooled_cdf=entry.combine(residual_event, np.add),
        entry_at_risk=entry_risk,
        residual_at_risk=residual_risk,
        pooled_at_risk=entry_risk.combine(residual_risk, np.add),
        pooled_times=mass_times,
        pooled_jumps=pooled_jumps[pooled_jumps > 0],
        pooled_at_risk_counts=pooled_at_risk_counts[pooled_jumps > 0],
        event_times=event_times,
        event_counts=event_counts,
    )
