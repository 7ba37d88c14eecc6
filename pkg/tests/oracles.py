"""Independent literal-definition evaluators used as test oracles.

Everything here is written as plain double loops over the raw observations,
with no sorting, merging, or shared code with the package internals.  The
stated conventions (0/0 skips, the 1/n hazard-denominator floor, per-factor
clamping into [0, 1]) are applied exactly as documented so the comparisons
are exact.
"""

from __future__ import annotations


def n_bar_at(d, t):
    return sum(1 for i in range(d.n) if d.delta[i] == 1 and d.y[i] <= t) / d.n


def r_bar_at(d, t):
    return sum(1 for i in range(d.n) if d.a[i] <= t <= d.y[i]) / d.n


def q_tilde_at(d, t):
    total = 0
    for i in range(d.n):
        if d.a[i] <= t:
            total += 1
        if d.delta[i] == 1 and d.v[i] <= t:
            total += 1
    return total / d.n


def k_tilde_at(d, t):
    total = 0
    for i in range(d.n):
        if d.a[i] >= t:
            total += 1
        if d.v[i] >= t:
            total += 1
    return total / d.n


def _pooled_mass_points(d):
    pts = set()
    for i in range(d.n):
        pts.add(float(d.a[i]))
        if d.delta[i] == 1:
            pts.add(float(d.v[i]))
    return pts


def entry_survival_at(d, t):
    prod = 1.0
    for u in _pooled_mass_points(d):
        if u > t:
            continue
        jump = sum(1 for i in range(d.n) if d.a[i] == u) + sum(
            1 for i in range(d.n) if d.delta[i] == 1 and d.v[i] == u
        )
        at_risk = sum(1 for i in range(d.n) if d.a[i] >= u) + sum(
            1 for i in range(d.n) if d.v[i] >= u
        )
        if at_risk > 0:
            prod *= 1.0 - jump / at_risk
    return prod


def combined_risk_at(d, t):
    exit_surv = sum(1 for i in range(d.n) if d.y[i] >= t) / d.n
    return exit_surv - entry_survival_at(d, t)


def combined_cumhaz_at(d, t):
    total = 0.0
    for u in {float(d.y[i]) for i in range(d.n) if d.delta[i] == 1}:
        if u > t:
            continue
        dn = sum(1 for i in range(d.n) if d.delta[i] == 1 and d.y[i] == u) / d.n
        total += dn / max(combined_risk_at(d, u), 1.0 / d.n)
    return total


def classic_cumhaz_at(d, t):
    total = 0.0
    for u in {float(d.y[i]) for i in range(d.n) if d.delta[i] == 1}:
        if u > t:
            continue
        dn = sum(1 for i in range(d.n) if d.delta[i] == 1 and d.y[i] == u) / d.n
        total += dn / max(r_bar_at(d, u), 1.0 / d.n)
    return total


def entry_cumhaz_at(d, t):
    total = 0.0
    for u in _pooled_mass_points(d):
        if u > t:
            continue
        jump = sum(1 for i in range(d.n) if d.a[i] == u) + sum(
            1 for i in range(d.n) if d.delta[i] == 1 and d.v[i] == u
        )
        at_risk = sum(1 for i in range(d.n) if d.a[i] >= u) + sum(
            1 for i in range(d.n) if d.v[i] >= u
        )
        if at_risk > 0:
            total += jump / at_risk
    return total


def tjw_cdf_at(d, x):
    prod = 1.0
    order = sorted(range(d.n), key=lambda i: d.y[i])
    for i in order:
        if d.y[i] <= x and d.delta[i] == 1:
            at_risk = sum(1 for j in range(d.n) if d.a[j] <= d.y[i] <= d.y[j])
            prod *= 1.0 - 1.0 / at_risk
    return 1.0 - prod


def huang_qin_cdf_at(d, t):
    prod = 1.0
    for u in sorted({float(d.y[i]) for i in range(d.n) if d.delta[i] == 1}):
        if u > t:
            continue
        dn = sum(1 for i in range(d.n) if d.delta[i] == 1 and d.y[i] == u) / d.n
        inc = dn / max(combined_risk_at(d, u), 1.0 / d.n)
        prod *= min(max(1.0 - inc, 0.0), 1.0)
    return 1.0 - prod


def safeguarded_cdf_at(d, x):
    prod = 1.0
    order = sorted(range(d.n), key=lambda i: d.y[i])
    for i in order:
        if d.y[i] <= x and d.delta[i] == 1:
            denom = d.n * combined_risk_at(d, float(d.y[i])) + 1.0
            factor = 1.0 - 1.0 / denom
            prod *= min(max(factor, 0.0), 1.0)
    return 1.0 - prod


ALL_ESTIMATOR_ORACLES = {
    "entry_survival": entry_survival_at,
    "combined_risk": combined_risk_at,
    "classic_cumhaz": classic_cumhaz_at,
    "combined_cumhaz": combined_cumhaz_at,
    "tjw_cdf": tjw_cdf_at,
    "cdf": huang_qin_cdf_at,
    "cdf_safeguarded": safeguarded_cdf_at,
    "entry_cumhaz": entry_cumhaz_at,
}


def kaplan_meier_cdf_at(times, events, x):
    """Textbook event-table Kaplan-Meier for right-censored data."""
    prod = 1.0
    for u in sorted({t for t, e in zip(times, events) if e == 1}):
        if u > x:
            continue
        deaths = sum(1 for t, e in zip(times, events) if e == 1 and t == u)
        at_risk = sum(1 for t in times if t >= u)
        prod *= 1.0 - deaths / at_risk
    return 1.0 - prod


def nelson_aalen_at(times, events, x):
    """Textbook Nelson-Aalen cumulative hazard for right-censored data."""
    total = 0.0
    for u in {t for t, e in zip(times, events) if e == 1}:
        if u > x:
            continue
        deaths = sum(1 for t, e in zip(times, events) if e == 1 and t == u)
        at_risk = sum(1 for t in times if t >= u)
        total += (deaths / len(times)) / (at_risk / len(times))
    return total


def lynden_bell_cdf_at(entries, times, x):
    """Truncation-only product-limit estimate, straight from its definition."""
    prod = 1.0
    for i in sorted(range(len(times)), key=lambda j: times[j]):
        if times[i] <= x:
            at_risk = sum(
                1 for j in range(len(times)) if entries[j] <= times[i] <= times[j]
            )
            prod *= 1.0 - 1.0 / at_risk
    return 1.0 - prod


def pooled_kaplan_meier_at(points, x):
    """Standard Kaplan-Meier on a plain all-events sample (one jump per point)."""
    prod = 1.0
    for u in sorted(points):
        if u > x:
            continue
        deaths = sum(1 for p in points if p == u)
        at_risk = sum(1 for p in points if p >= u)
        prod *= 1.0 - deaths / at_risk
    return prod
