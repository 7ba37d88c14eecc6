"""Per-subject influence values, representation residuals, and variance.

The fitted cumulative hazard and CDF admit i.i.d. representations: estimator
minus truth equals a sample mean of per-subject influence values plus a
higher-order remainder.  This module evaluates the influence functions in two
modes:

* oracle mode computes against a known population (a truth model or raw
  population callables), with Stieltjes integrals done by panel
  Gauss-Legendre against the population densities;
* plugin mode substitutes the fitted curves for population quantities, so
  every integral is an exact finite sum over data points.  This is the basis
  of the pointwise variance estimate and normal-approximation intervals.

Numerical layout of the oracle integrals: the risk function vanishes at 0
under entry-delay sampling, so integrands like (event density)/(risk)^2 are
not integrable from 0.  Each influence value combines such pieces into a
finite total; the code therefore never anchors a divergent cumulative at 0,
but instead tabulates

* cumulatives that are finite from 0 (those whose integrand stays bounded),
* cumulatives of the divergent integrands anchored just below the smallest
  data point, used only through differences whose lower endpoint is a data
  point.

All per-subject evaluation is vectorized over subjects.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .data import Dataset, LbrcObservation
from .empirical import build_empirical
from .errors import ComputeError, WindowError
from .estimators import (
    FittedCurves,
    estimate_combined_risk,
    estimate_entry_survival,
    fit,
    huang_qin_cdf,
)
from .quadrature import SmoothCumulative, geometric_edges, panel_nodes, uniform_edges
from .stepfun import EvalGrid
from .truth import TruthModel

__all__ = [
    "DIVERGENCE_CAP",
    "InfluenceContext",
    "make_oracle_context",
    "make_function_context",
    "make_plugin_context",
    "subject_influence",
    "pooled_entry_influence",
    "hazard_influence_direct",
    "hazard_influence_riskpart",
    "influence_means",
    "RepresentationReport",
    "residual_hazard",
    "residual_cdf",
    "residual_entry_survival",
    "LilCurves",
    "lil_quantities",
    "plugin_variance",
    "assumption3_diagnostic",
]

DIVERGENCE_CAP = 1.0e4

_TABLE_PANELS = 1600


class InfluenceContext:
    """Population (oracle) or data-derived (plugin) evaluation context.

    Oracle contexts carry callables for the risk function, entry survival,
    pooled at-risk function, pooled cumulative and event subdistribution,
    plus their densities.  Plugin contexts carry the fitted counterparts and
    exact jump tables.  The evaluation window is the grid's [lower, b] span.
    """

    def __init__(self, mode: str, grid: EvalGrid):
        self.mode = mode
        self.grid = grid
        self.lower = grid.lower
        self.upper = grid.b
        self.r_fn = None
        self.s_a_fn = None
        self.k_fn = None
        self.q_fn = None
        self.f_u = None
        self.cdf_fn = None
        self.model: TruthModel | None = None
        self._cache: dict = {}


def make_oracle_context(model: TruthModel, grid: EvalGrid) -> InfluenceContext:
    ctx = InfluenceContext("oracle", grid)
    ctx.model = model
    ctx.r_fn = model.risk
    ctx.s_a_fn = model.entry_survival
    ctx.k_fn = model.pooled_at_risk
    ctx.q_fn = model.pooled_cdf
    ctx.f_u = model.event_subdist
    ctx.cdf_fn = model.cdf
    ctx.fu_density = model.event_subdist_density
    ctx.q_density = model.pooled_density
    ctx.entry_cdf_fn = model.entry_cdf
    ctx.rho = model.influence_weight
    return ctx


def make_function_context(
    grid: EvalGrid,
    r_fn,
    s_a_fn,
    k_fn,
    q_density,
    fu_density,
    q_fn=None,
    f_u=None,
    cdf_fn=None,
) -> InfluenceContext:
    """Oracle-style context from raw population callables (mainly for tests)."""
    ctx = InfluenceContext("oracle", grid)
    ctx.r_fn = r_fn
    ctx.s_a_fn = s_a_fn
    ctx.k_fn = k_fn
    ctx.q_fn = q_fn
    ctx.f_u = f_u
    ctx.cdf_fn = cdf_fn
    ctx.fu_density = fu_density
    ctx.q_density = q_density
    ctx.entry_cdf_fn = lambda u: 1.0 - np.asarray(s_a_fn(u), dtype=float)
    ctx.rho = (
        lambda u: np.asarray(fu_density(u), dtype=float)
        / np.asarray(r_fn(u), dtype=float) ** 2
    )
    return ctx


def make_plugin_context(d: Dataset, grid: EvalGrid) -> InfluenceContext:
    """Context with every population quantity replaced by its fitted curve."""
    ctx = InfluenceContext("plugin", grid)
    emp = build_empirical(d)
    entry_surv = estimate_entry_survival(emp)
    risk = estimate_combined_risk(d, entry_surv)
    n = d.n

    ctx.dataset = d
    ctx.emp = emp
    ctx.entry_surv = entry_surv
    ctx.risk = risk
    ctx.cdf = huang_qin_cdf(emp, risk)
    ctx.r_fn = risk.at
    ctx.s_a_fn = entry_surv.at
    ctx.k_fn = emp.pooled_at_risk.at
    ctx.q_fn = emp.pooled_cdf.at
    ctx.f_u = emp.event_cdf.at
    ctx.cdf_fn = ctx.cdf.at

    # exact jump tables over distinct event times
    u = emp.event_times
    dn = emp.event_counts / n
    r_floor = np.maximum(risk.at(u), 1.0 / n) if u.size else np.empty(0)
    ctx.event_times = u
    ctx.event_dn = dn
    ctx.event_risk = r_floor
    ctx.event_w = dn / r_floor**2 if u.size else np.empty(0)
    ctx.event_entry_surv = entry_surv.at(u) if u.size else np.empty(0)

    # pooled-sample prefix of (pooled jump)/(pooled at-risk)^2
    kq = emp.pooled_at_risk_counts.astype(float)
    dq = emp.pooled_jumps.astype(float)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(kq > 0, n * dq / np.where(kq > 0, kq, 1.0) ** 2, 0.0)
    ctx.pooled_times = emp.pooled_times
    ctx.pooled_m_prefix = np.concatenate(([0.0], np.cumsum(terms)))

    w = ctx.event_w
    sa = ctx.event_entry_surv
    ctx.pref_w = np.concatenate(([0.0], np.cumsum(w)))
    ctx.pref_ws = np.concatenate(([0.0], np.cumsum(w * sa)))
    m_at_events = _plugin_m(ctx, u) if u.size else np.empty(0)
    ctx.pref_wsm = np.concatenate(([0.0], np.cumsum(w * sa * m_at_events)))
    return ctx


def _plugin_m(ctx, x):
    """Plugin pooled-hazard second-moment prefix evaluated at x."""
    idx = np.searchsorted(ctx.pooled_times, np.asarray(x, dtype=float), side="right")
    return ctx.pooled_m_prefix[idx]


# ---------------------------------------------------------------------------
# oracle tables


def _oracle_tables(ctx) -> dict:
    if "tables" not in ctx._cache:
        hi = ctx.upper

        def kappa(u):
            return np.asarray(ctx.q_density(u), dtype=float) / np.asarray(
                ctx.k_fn(u), dtype=float
            ) ** 2

        edges = uniform_edges(0.0, hi, _TABLE_PANELS)
        m_table = SmoothCumulative(kappa, edges)
        p_table = SmoothCumulative(
            lambda u: np.asarray(ctx.rho(u), dtype=float)
            * np.asarray(ctx.entry_cdf_fn(u), dtype=float),
            edges,
        )
        w_table = SmoothCumulative(
            lambda u: np.asarray(ctx.rho(u), dtype=float)
            * np.asarray(ctx.s_a_fn(u), dtype=float)
            * m_table.query(u),
            edges,
        )
        ctx._cache["tables"] = {"kappa": kappa, "m": m_table, "p": p_table, "w": w_table}
    return ctx._cache["tables"]


def _anchored_tables(ctx, anchor: float) -> dict:
    hi = ctx.upper
    anchor = min(anchor, 0.5 * hi)
    edges = geometric_edges(anchor, hi, ratio=1.12)
    g_table = SmoothCumulative(lambda u: np.asarray(ctx.rho(u), dtype=float), edges)
    v_table = SmoothCumulative(
        lambda u: np.asarray(ctx.rho(u), dtype=float)
        * np.asarray(ctx.s_a_fn(u), dtype=float),
        edges,
    )
    return {"g": g_table, "v": v_table, "anchor": anchor}


def _masked_query(table: SmoothCumulative, x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Query only where mask holds; other entries return 0 without evaluation."""
    safe = np.where(mask, np.clip(x, table.lo, table.hi), table.lo)
    vals = table.query(safe)
    return np.where(mask, vals, 0.0)


# ---------------------------------------------------------------------------
# per-subject evaluation


def subject_influence(ctx: InfluenceContext, a, v, delta, times):
    """Influence values for each subject at each time.

    Returns three arrays of shape ``(len(times), n)``: the pooled-entry
    influence, the direct hazard influence, and the estimated-risk hazard
    correction.
    """
    a = np.asarray(a, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    delta = np.asarray(delta).reshape(-1).astype(float)
    times = np.asarray(times, dtype=float).reshape(-1)
    if times.size and times.max() > ctx.upper + 1e-12:
        raise ValueError("evaluation time beyond the context window")
    if ctx.mode == "oracle":
        return _oracle_subject_influence(ctx, a, v, delta, times)
    return _plugin_subject_influence(ctx, a, v, delta, times)


def _oracle_subject_influence(ctx, a, v, delta, times):
    if np.any(a <= 0):
        raise ComputeError("oracle influence needs positive entry delays")
    if np.any((v == 0) & (delta == 1)):
        raise ComputeError(
            "residual time 0 with an observed event makes the risk correction diverge"
        )
    y = a + v
    hi = ctx.upper
    tables = _oracle_tables(ctx)
    m_t, p_t, w_t = tables["m"], tables["p"], tables["w"]

    pos_v = v > 0
    candidates = np.concatenate([a, v[pos_v]])
    anchor = 0.999 * candidates.min() if candidates.size else 0.5 * hi
    anch = _anchored_tables(ctx, anchor)
    g_t, v_tab = anch["g"], anch["v"]

    a_in = a <= hi
    v_in = pos_v & (v <= hi)
    y_in = y <= hi

    m_a = _masked_query(m_t, a, a_in)
    m_v = _masked_query(m_t, v, v <= hi)  # m(0) = 0, so zero residuals are fine
    w_a = _masked_query(w_t, a, a_in)
    w_v = _masked_query(w_t, v, v <= hi)
    g_a = _masked_query(g_t, a, a_in)
    g_y = _masked_query(g_t, y, y_in)
    v_a = _masked_query(v_tab, a, a_in)
    v_v = _masked_query(v_tab, v, v_in)

    k_a = np.asarray(ctx.k_fn(a), dtype=float)
    k_v = np.asarray(ctx.k_fn(v), dtype=float)
    r_y = np.asarray(ctx.r_fn(y), dtype=float)
    tmax = float(times.max()) if times.size else 0.0
    if np.any((a <= tmax) & (k_a <= 0)) or np.any(
        (v <= tmax) & (delta == 1) & (k_v <= 0)
    ):
        raise ComputeError("pooled at-risk function vanishes at an observed point")
    if np.any((y <= tmax) & (delta == 1) & (r_y <= 0)):
        raise ComputeError("risk function vanishes at an observed event time")
    k_a_safe = np.where(k_a > 0, k_a, 1.0)
    k_v_safe = np.where(k_v > 0, k_v, 1.0)
    r_y_safe = np.where(r_y > 0, r_y, 1.0)

    phi = np.empty((times.size, a.size))
    psi1 = np.empty_like(phi)
    psi2 = np.empty_like(phi)

    for j, t in enumerate(times):
        m_at_t = m_t.query(t)
        p_at_t = p_t.query(t)
        w_at_t = w_t.query(t)
        in_anchor = t >= anch["anchor"]
        g_at_t = g_t.query(t) if in_anchor else 0.0
        v_at_t = v_tab.query(t) if in_anchor else 0.0

        a_le = a <= t
        v_le = v <= t
        y_le = y <= t

        jump_a = np.where(a_le, 1.0 / k_a_safe, 0.0)
        jump_v = np.where(v_le & (delta == 1), 1.0 / k_v_safe, 0.0)
        phi[j] = (
            np.where(a_le, m_a, m_at_t) + np.where(v_le, m_v, m_at_t) - jump_a - jump_v
        )

        integral = np.where(a_le, np.where(y_le, g_y, g_at_t) - g_a, 0.0)
        psi1[j] = integral - np.where(y_le, delta / r_y_safe, 0.0)

        part_a = p_at_t - np.where(a_le, g_at_t - g_a, 0.0)
        vdiff_a = np.where(a_le, v_at_t - v_a, 0.0)
        vdiff_v = np.where(v_le & pos_v, v_at_t - v_v, 0.0)
        x_i = (
            np.where(a_le, w_a, w_at_t)
            + m_a * vdiff_a
            + np.where(v_le, w_v, w_at_t)
            + m_v * vdiff_v
            - jump_a * vdiff_a
            - jump_v * vdiff_v
        )
        psi2[j] = part_a - x_i
    return phi, psi1, psi2


def _plugin_subject_influence(ctx, a, v, delta, times):
    phi = np.zeros((times.size, a.size))
    psi1 = np.zeros_like(phi)
    psi2 = np.zeros_like(phi)

    u = ctx.event_times
    y = a + v
    m_a = _plugin_m(ctx, a)
    m_v = _plugin_m(ctx, v)
    k_a = np.asarray(ctx.k_fn(a), dtype=float)
    k_v = np.asarray(ctx.k_fn(v), dtype=float)
    inv_k_a = np.where(k_a > 0, 1.0 / np.where(k_a > 0, k_a, 1.0), 0.0)
    inv_k_v = np.where(k_v > 0, 1.0 / np.where(k_v > 0, k_v, 1.0), 0.0)
    r_y = np.maximum(np.asarray(ctx.r_fn(y), dtype=float), 1.0 / ctx.dataset.n)

    idx_a_left = np.searchsorted(u, a, side="left")
    idx_a_right = np.searchsorted(u, a, side="right")
    idx_v_left = np.searchsorted(u, v, side="left")
    idx_v_right = np.searchsorted(u, v, side="right")
    idx_y_right = np.searchsorted(u, y, side="right")

    pref_w, pref_ws, pref_wsm = ctx.pref_w, ctx.pref_ws, ctx.pref_wsm

    for j, t in enumerate(times):
        kt = int(np.searchsorted(u, t, side="right"))
        a_le = a <= t
        v_le = v <= t
        y_le = y <= t

        jump_a = np.where(a_le, inv_k_a, 0.0)
        jump_v = np.where(v_le & (delta == 1), inv_k_v, 0.0)
        m_at_t = float(_plugin_m(ctx, t))
        phi[j] = (
            np.where(a_le, m_a, m_at_t) + np.where(v_le, m_v, m_at_t) - jump_a - jump_v
        )

        ky = np.minimum(idx_y_right, kt)
        ja = np.minimum(idx_a_left, ky)
        psi1[j] = pref_w[ky] - pref_w[ja] - np.where(y_le, delta / r_y, 0.0)

        ja_t = np.minimum(idx_a_left, kt)
        ia_t = np.minimum(idx_a_right, kt)
        iv_t = np.minimum(idx_v_right, kt)
        jv_t = np.minimum(idx_v_left, kt)
        t1 = pref_w[ja_t]
        t2 = -pref_ws[kt]
        t3 = pref_wsm[ia_t] + m_a * (pref_ws[kt] - pref_ws[ia_t])
        t4 = pref_wsm[iv_t] + m_v * (pref_ws[kt] - pref_ws[iv_t])
        t5 = inv_k_a * (pref_ws[kt] - pref_ws[ja_t])
        t6 = delta * inv_k_v * (pref_ws[kt] - pref_ws[jv_t])
        psi2[j] = t1 + t2 - (t3 + t4) + t5 + t6
    return phi, psi1, psi2


def pooled_entry_influence(obs: LbrcObservation, t: float, ctx: InfluenceContext) -> float:
    """Influence of one subject on the pooled entry-survival estimate."""
    phi, _, _ = subject_influence(ctx, [obs.a], [obs.v], [obs.delta], [t])
    return float(phi[0, 0])


def hazard_influence_direct(obs: LbrcObservation, t: float, ctx: InfluenceContext) -> float:
    """Direct hazard-estimation influence of one subject."""
    _, psi1, _ = subject_influence(ctx, [obs.a], [obs.v], [obs.delta], [t])
    return float(psi1[0, 0])


def hazard_influence_riskpart(obs: LbrcObservation, t: float, ctx: InfluenceContext) -> float:
    """Hazard influence correction from the estimated risk function."""
    _, _, psi2 = subject_influence(ctx, [obs.a], [obs.v], [obs.delta], [t])
    return float(psi2[0, 0])


# ---------------------------------------------------------------------------
# exact aggregated sample means (oracle mode)


def _refine_breaks(breaks: np.ndarray, rel: float = 0.4) -> np.ndarray:
    """Split panels that are wide relative to their distance from zero.

    The integrands behave like 1/u just above the smallest data points, so a
    panel [p, q] with q - p large compared to p defeats fixed-order
    quadrature; geometric subdivision restores spectral accuracy.
    """
    extra = []
    for p, q in zip(breaks[:-1], breaks[1:]):
        if p <= 0 or q <= p * (1.0 + rel):
            continue
        steps = int(np.ceil(np.log(q / p) / np.log1p(rel)))
        extra.append(p * (q / p) ** (np.arange(1, steps) / steps))
    if not extra:
        return breaks
    return np.unique(np.concatenate([breaks, *extra]))


def influence_means(
    ctx: InfluenceContext, d: Dataset, times, want: str = "both"
) -> dict[str, np.ndarray]:
    """Sample means of the influence functions at each time, in oracle mode.

    Uses the finite-sample algebraic identities that re-express the
    per-subject sums as Stieltjes integrals of step functions against
    population measures, so the cost is linear in the sample size.
    Agreement with the direct per-subject sums is part of the test suite.

    ``want`` selects components: "phi", "psi", or "both".
    """
    if ctx.mode != "oracle":
        raise ValueError("influence_means requires an oracle context")
    times = np.asarray(times, dtype=float).reshape(-1)
    tmax = float(times.max())
    n = d.n
    tables = _oracle_tables(ctx)
    m_table = tables["m"]

    a_sorted = np.sort(d.a)
    v_sorted = np.sort(d.v)
    y_sorted = np.sort(d.y)

    data_pts = np.concatenate([d.a, d.v, d.y])
    breaks = np.unique(
        np.concatenate(
            [[0.0, tmax], times, data_pts[(data_pts > 0) & (data_pts < tmax)]]
        )
    )
    breaks = _refine_breaks(breaks)
    t_idx = np.searchsorted(breaks, times)

    gt_a = n - np.searchsorted(a_sorted, breaks[:-1], side="right")
    gt_v = n - np.searchsorted(v_sorted, breaks[:-1], side="right")
    le_a = np.searchsorted(a_sorted, breaks[:-1], side="right")
    le_y = np.searchsorted(y_sorted, breaks[:-1], side="right")
    bar_a = gt_a / n
    k_panel = (gt_a + gt_v) / n
    r_bar_panel = (le_a - le_y) / n

    emp = build_empirical(d)
    out: dict[str, np.ndarray] = {}

    # entry influence mean: smooth part against the pooled measure minus the
    # exact pooled-sample jump sum
    in_range = emp.pooled_times <= tmax
    s_pool = emp.pooled_times[in_range]
    dq_pool = emp.pooled_jumps[in_range] / n
    k_pop_pool = np.asarray(ctx.k_fn(s_pool), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        jump_terms = np.where(k_pop_pool > 0, dq_pool / np.where(k_pop_pool > 0, k_pop_pool, 1.0), 0.0)
    jump_prefix = np.concatenate(([0.0], np.cumsum(jump_terms)))

    m_at_breaks = m_table.query(breaks)
    phi_smooth_prefix = np.concatenate(([0.0], np.cumsum(k_panel * np.diff(m_at_breaks))))
    phi_at_breaks = phi_smooth_prefix - jump_prefix[
        np.searchsorted(s_pool, breaks, side="right")
    ]
    if want in ("phi", "both"):
        out["mean_phi"] = phi_at_breaks[t_idx]
    if want == "phi":
        return out

    # direct hazard influence mean
    ev_in = emp.event_times <= tmax
    u_ev = emp.event_times[ev_in]
    dn_ev = emp.event_counts[ev_in] / n
    r_pop_ev = np.asarray(ctx.r_fn(u_ev), dtype=float)
    event_prefix = np.concatenate(([0.0], np.cumsum(dn_ev / r_pop_ev)))

    x, w = panel_nodes(breaks, nodes=10)
    flat = x.ravel()
    rho_x = np.asarray(ctx.rho(flat), dtype=float).reshape(x.shape)
    sa_x = np.asarray(ctx.s_a_fn(flat), dtype=float).reshape(x.shape)
    m_x = m_table.query(flat).reshape(x.shape)

    rho_int = (w * rho_x).sum(axis=1)
    psi1_prefix = np.concatenate(([0.0], np.cumsum(r_bar_panel * rho_int)))
    out["mean_psi1"] = psi1_prefix[t_idx] - event_prefix[
        np.searchsorted(u_ev, times, side="right")
    ]

    # risk-correction influence mean: the within-panel entry-influence mean
    # is its value at the panel edge plus the smooth pooled-measure increment
    phi_on_nodes = phi_at_breaks[:-1, None] + k_panel[:, None] * (
        m_x - m_at_breaks[:-1, None]
    )
    integrand = rho_x * (bar_a[:, None] - sa_x * (1.0 + phi_on_nodes))
    psi2_prefix = np.concatenate(([0.0], np.cumsum((w * integrand).sum(axis=1))))
    out["mean_psi2"] = psi2_prefix[t_idx]
    return out


# ---------------------------------------------------------------------------
# representation residuals


@dataclass(frozen=True)
class RepresentationReport:
    """Sup-norm summary of one i.i.d.-representation remainder."""

    which: str
    grid: EvalGrid
    influence_mean: np.ndarray
    residual: np.ndarray
    residual_sup: float
    convention: str | None = None
    alt_residual_sup: float | None = None


def _require_model(ctx: InfluenceContext):
    if ctx.mode != "oracle" or ctx.model is None:
        raise ValueError("representation residuals need a model-backed oracle context")


def residual_hazard(
    d: Dataset, ctx: InfluenceContext, grid: EvalGrid, curves: FittedCurves | None = None
) -> RepresentationReport:
    """Remainder of the hazard representation over the grid."""
    _require_model(ctx)
    curves = curves if curves is not None else fit(d)
    means = influence_means(ctx, d, grid.points, want="both")
    mean_psi = means["mean_psi1"] + means["mean_psi2"]
    gap = curves.combined_cumhaz.at(grid.points) - np.asarray(
        ctx.model.cumhaz(grid.points), dtype=float
    )
    residual = gap + mean_psi
    return RepresentationReport(
        "Rn1", grid, mean_psi, residual, float(np.abs(residual).max())
    )


def residual_cdf(
    d: Dataset, ctx: InfluenceContext, grid: EvalGrid, curves: FittedCurves | None = None
) -> RepresentationReport:
    """Remainder of the CDF representation, under both sign conventions.

    The stated representation carries a plus sign on the influence average,
    while the delta-method expansion of the product-limit map suggests a
    minus sign; both are computed and the smaller-remainder convention is
    reported, with the other kept alongside.
    """
    _require_model(ctx)
    curves = curves if curves is not None else fit(d)
    means = influence_means(ctx, d, grid.points, want="both")
    mean_psi = means["mean_psi1"] + means["mean_psi2"]
    f_true = np.asarray(ctx.model.cdf(grid.points), dtype=float)
    gap = curves.cdf.at(grid.points) - f_true
    res_minus = gap + (1.0 - f_true) * mean_psi
    res_plus = gap - (1.0 - f_true) * mean_psi
    sup_minus = float(np.abs(res_minus).max())
    sup_plus = float(np.abs(res_plus).max())
    if sup_minus <= sup_plus:
        return RepresentationReport(
            "Rn2", grid, mean_psi, res_minus, sup_minus, "minus", sup_plus
        )
    return RepresentationReport("Rn2", grid, mean_psi, res_plus, sup_plus, "plus", sup_minus)


def residual_entry_survival(
    d: Dataset, ctx: InfluenceContext, grid: EvalGrid, curves: FittedCurves | None = None
) -> RepresentationReport:
    """Remainder of the pooled entry-survival representation."""
    _require_model(ctx)
    curves = curves if curves is not None else fit(d)
    mean_phi = influence_means(ctx, d, grid.points, want="phi")["mean_phi"]
    s_a_true = np.asarray(ctx.model.entry_survival(grid.points), dtype=float)
    gap = curves.entry_survival.at(grid.points) - s_a_true
    residual = gap - s_a_true * mean_phi
    return RepresentationReport(
        "Rn3", grid, mean_phi, residual, float(np.abs(residual).max())
    )


# ---------------------------------------------------------------------------
# variance, iterated-logarithm curves, window diagnostic


@dataclass(frozen=True)
class LilCurves:
    """Pointwise fluctuation-scale curves for the CDF estimate.

    ``v`` follows the stated convention ``v^2 = (1 - F) d``; ``v_alt``
    carries the delta-method convention ``v = (1 - F) sqrt(d)``.  Both are
    reported because the first power is unusual for a variance-style
    quantity.
    """

    d: np.ndarray
    v: np.ndarray
    v_alt: np.ndarray


def lil_quantities(ctx: InfluenceContext, grid: EvalGrid) -> LilCurves:
    """Fluctuation curves, integrated from the window's lower edge."""
    pts = grid.points
    if ctx.mode == "oracle":
        if grid.lower < grid.b:
            table = SmoothCumulative(
                lambda u: np.asarray(ctx.rho(u), dtype=float),
                geometric_edges(grid.lower, grid.b, ratio=1.05),
            )
            d_vals = table.query(pts)
        else:
            d_vals = np.zeros(pts.size)
        if ctx.cdf_fn is not None:
            f_vals = np.asarray(ctx.cdf_fn(pts), dtype=float)
        else:
            f_vals = np.full(pts.size, np.nan)
    else:
        u = ctx.event_times
        pref = np.concatenate(([0.0], np.cumsum(ctx.event_w)))
        hi_idx = np.searchsorted(u, pts, side="right")
        lo_idx = np.searchsorted(u, grid.lower, side="right")
        d_vals = pref[hi_idx] - pref[lo_idx]
        f_vals = ctx.cdf.at(pts)
    surv = np.clip(1.0 - f_vals, 0.0, 1.0)
    return LilCurves(d=d_vals, v=np.sqrt(surv * d_vals), v_alt=surv * np.sqrt(d_vals))


def plugin_variance(d: Dataset, grid: EvalGrid) -> np.ndarray:
    """Pointwise variance of the fitted CDF via plugin influence values."""
    ctx = make_plugin_context(d, grid)
    _, psi1, psi2 = subject_influence(ctx, d.a, d.v, d.delta, grid.points)
    psi = psi1 + psi2
    scale = 1.0 - ctx.cdf.at(grid.points)
    summand = scale[:, None] * psi
    return summand.var(axis=1) / d.n


def assumption3_diagnostic(
    ctx: InfluenceContext, b: float, cap: float = DIVERGENCE_CAP
) -> float:
    """Window admissibility integral: event measure over cubed risk.

    Returns the integral over (window lower edge, b]; raises ``WindowError``
    when it exceeds ``cap``, which marks the window as too wide for stable
    rate measurement.
    """
    b = float(b)
    if b <= ctx.lower:
        raise ValueError("b must exceed the window's lower edge")
    if ctx.mode == "oracle":
        val, _ = integrate.quad(
            lambda u: float(
                np.asarray(ctx.fu_density(u), dtype=float)
                / np.asarray(ctx.r_fn(u), dtype=float) ** 3
            ),
            ctx.lower,
            b,
            limit=200,
        )
    else:
        u = ctx.event_times
        mask = (u > ctx.lower) & (u <= b)
        val = float(np.sum(ctx.event_dn[mask] / ctx.event_risk[mask] ** 3))
    val = float(val)
    if not np.isfinite(val) or val > cap:
        raise WindowError(
            f"window diagnostic {val:.6g} exceeds cap {cap:.6g}; "
            f"shrink b below the heavy tail"
        )
    return val
