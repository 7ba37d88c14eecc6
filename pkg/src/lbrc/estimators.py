"""Product-limit and cumulative-hazard estimators for LBRC samples.

The pooled-risk (Huang-Qin) estimator family replaces the classic at-risk
proportion by ``exit_survival(t) - entry_survival(t)``, where the entry-delay
survival curve is itself a Kaplan-Meier fit on the pooled 2n-point sample of
entry delays and residual times.  The classic truncation product-limit (TJW)
estimator and its hazard are kept as baselines; they reduce to Kaplan-Meier
when there is no truncation and to Lynden-Bell when there is no censoring.

Conventions baked in throughout (and mirrored by the brute-force test
oracles): 0/0 factors are skipped, the pooled-risk denominator inside the
hazard is floored at 1/n, and product factors are clamped into [0, 1] so
survival outputs stay monotone distribution functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .empirical import EmpiricalProcesses, build_empirical, exit_survival
from .stepfun import StepFunction

__all__ = [
    "FittedCurves",
    "fit",
    "estimate_entry_survival",
    "estimate_combined_risk",
    "classic_cumulative_hazard",
    "combined_cumulative_hazard",
    "pooled_entry_cumhaz",
    "product_limit_from_hazard",
    "tjw_product_limit",
    "huang_qin_cdf",
    "safeguarded_cdf",
]


def _grouped_last(times: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Collapse per-subject cumulative values to the last value per distinct time."""
    uniq, inverse = np.unique(times, return_inverse=True)
    last = np.zeros(uniq.size, dtype=int)
    last[inverse] = np.arange(times.size)
    return uniq, values[last]


def _drop_flat(times: np.ndarray, values: np.ndarray, initial: float) -> tuple[np.ndarray, np.ndarray]:
    """Remove zero-size jumps so jump_times enumerate actual jumps."""
    prev = np.concatenate(([initial], values[:-1]))
    keep = values != prev
    return times[keep], values[keep]


def estimate_entry_survival(emp: EmpiricalProcesses) -> StepFunction:
    """Kaplan-Meier survival of the entry delay, fitted on the pooled sample.

    At each pooled mass point the running product picks up the factor
    ``1 - (pooled jump count) / (pooled at-risk count)``; a zero at-risk
    count contributes no factor (0/0 convention).
    """
    k = emp.pooled_at_risk_counts.astype(float)
    dq = emp.pooled_jumps.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(k > 0, dq / np.where(k > 0, k, 1.0), 0.0)
    survival = np.cumprod(1.0 - ratio)
    times, vals = _drop_flat(emp.pooled_times, survival, 1.0)
    return StepFunction(times, vals, 1.0)


def estimate_combined_risk(d: Dataset, entry_survival: StepFunction) -> StepFunction:
    """Pooled-risk curve: exit survival minus entry-delay survival.

    Not guaranteed nonnegative in finite samples; consumers floor it.
    The exit-survival part keeps ">= t" semantics, so the value at an event
    time still includes the exiting subject.
    """
    return exit_survival(d).combine(entry_survival, np.subtract)


def _hazard_from_events(
    event_times: np.ndarray,
    event_counts: np.ndarray,
    n: int,
    risk: StepFunction,
) -> StepFunction:
    if event_times.size == 0:
        return StepFunction.constant(0.0)
    denom = np.maximum(risk.at(event_times), 1.0 / n)
    steps = (event_counts / n) / denom
    return StepFunction(event_times, np.cumsum(steps), 0.0)


def combined_cumulative_hazard(emp: EmpiricalProcesses, risk: StepFunction) -> StepFunction:
    """Cumulative hazard with the pooled-risk denominator, floored at 1/n."""
    return _hazard_from_events(emp.event_times, emp.event_counts, emp.n, risk)


def classic_cumulative_hazard(emp: EmpiricalProcesses) -> StepFunction:
    """Cumulative hazard with the classic at-risk denominator.

    Equals Nelson-Aalen when every entry delay is zero.
    """
    return _hazard_from_events(emp.event_times, emp.event_counts, emp.n, emp.at_risk)


def pooled_entry_cumhaz(emp: EmpiricalProcesses) -> StepFunction:
    """Cumulative hazard of the entry delay from the pooled sample."""
    if emp.pooled_times.size == 0:
        return StepFunction.constant(0.0)
    k = emp.pooled_at_risk_counts.astype(float)
    dq = emp.pooled_jumps.astype(float)
    ratio = np.where(k > 0, dq / np.where(k > 0, k, 1.0), 0.0)
    return StepFunction(emp.pooled_times, np.cumsum(ratio), 0.0)


def product_limit_from_hazard(hazard: StepFunction) -> StepFunction:
    """Distribution function from a cumulative hazard via the product-limit map.

    Survival is the running product of ``1 - (hazard jump)`` with each factor
    clamped into [0, 1]; the returned curve is ``1 - survival``.
    """
    if abs(hazard.initial_value) > 1e-12:
        raise ValueError("hazard must start at 0")
    inc = hazard.increments()
    if inc.size and inc.min() < -1e-12:
        raise ValueError("hazard must be nondecreasing")
    factors = np.clip(1.0 - inc, 0.0, 1.0)
    survival = np.cumprod(factors)
    times, vals = _drop_flat(hazard.jump_times, 1.0 - survival, 0.0)
    return StepFunction(times, vals, 0.0)


def _per_subject_product_limit(
    d: Dataset, factor_of_subject: np.ndarray, order: np.ndarray
) -> StepFunction:
    y_sorted = d.y[order]
    survival = np.cumprod(factor_of_subject[order])
    times, vals = _grouped_last(y_sorted, survival)
    times, vals = _drop_flat(times, 1.0 - vals, 0.0)
    return StepFunction(times, vals, 0.0)


def tjw_product_limit(d: Dataset) -> StepFunction:
    """Classic truncation product-limit estimate of the event-time CDF.

    One factor ``1 - 1/(at-risk count at y_i)`` per uncensored subject, taken
    in ascending order of exit time.  At-risk counts are exact integers.
    """
    a_sorted = np.sort(d.a)
    y_sorted_all = np.sort(d.y)
    entered = np.searchsorted(a_sorted, d.y, side="right")
    exited_before = np.searchsorted(y_sorted_all, d.y, side="left")
    at_risk = entered - exited_before
    factors = np.where(d.delta == 1, 1.0 - 1.0 / at_risk, 1.0)
    return _per_subject_product_limit(d, factors, np.argsort(d.y, kind="stable"))


def safeguarded_cdf(d: Dataset, risk: StepFunction) -> StepFunction:
    """Pooled-risk product-limit with the +1 safeguard in each denominator.

    Factors are ``1 - 1/(n * risk(y_i) + 1)`` for uncensored subjects,
    clamped into [0, 1] to guard against a negative finite-sample risk value.
    """
    denom = d.n * risk.at(d.y) + 1.0
    raw = np.where(d.delta == 1, 1.0 - 1.0 / denom, 1.0)
    factors = np.clip(raw, 0.0, 1.0)
    return _per_subject_product_limit(d, factors, np.argsort(d.y, kind="stable"))


def huang_qin_cdf(
    emp: EmpiricalProcesses, risk: StepFunction
) -> StepFunction:
    """Pooled-risk product-limit CDF: product of one-minus-hazard-increments.

    Built directly from merged event counts; coincides with
    ``product_limit_from_hazard(combined_cumulative_hazard(...))``.
    """
    if emp.event_times.size == 0:
        return StepFunction.constant(0.0)
    denom = np.maximum(risk.at(emp.event_times), 1.0 / emp.n)
    increments = (emp.event_counts / emp.n) / denom
    factors = np.clip(1.0 - increments, 0.0, 1.0)
    survival = np.cumprod(factors)
    times, vals = _drop_flat(emp.event_times, 1.0 - survival, 0.0)
    return StepFunction(times, vals, 0.0)


@dataclass(frozen=True)
class FittedCurves:
    """Every fitted curve for one dataset."""

    entry_survival: StepFunction
    combined_risk: StepFunction
    classic_cumhaz: StepFunction
    combined_cumhaz: StepFunction
    tjw_cdf: StepFunction
    cdf: StepFunction
    cdf_safeguarded: StepFunction
    entry_cumhaz: StepFunction


def fit(d: Dataset) -> FittedCurves:
    """Fit the full estimator family on one dataset."""
    emp = build_empirical(d)
    entry_surv = estimate_entry_survival(emp)
    risk = estimate_combined_risk(d, entry_surv)
    return FittedCurves(
        entry_survival=entry_surv,
        combined_risk=risk,
        classic_cumhaz=classic_cumulative_hazard(emp),
        combined_cumhaz=combined_cumulative_hazard(emp, risk),
        tjw_cdf=tjw_product_limit(d),
        cdf=huang_qin_cdf(emp, risk),
        cdf_safeguarded=safeguarded_cdf(d, risk),
        entry_cumhaz=pooled_entry_cumhaz(emp),
    )
