"""Piecewise-constant curves on the real line.

Every empirical process and every fitted curve in this package is a step
function with finitely many jumps.  The canonical storage is right-continuous
(cadlag): ``values[i]`` is the value on ``[jump_times[i], jump_times[i+1])``
and ``initial_value`` is the value left of the first jump.  Some curves used
in risk-set arithmetic are *not* right-continuous at their jumps (an at-risk
proportion keeps a subject in the risk set at its own exit time), so a step
function may carry an optional ``at_values`` array giving the value exactly
at each jump time; it defaults to the right-hand value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["StepFunction", "EvalGrid", "sup_norm_diff", "sup_diff_vs_smooth"]


def _as_float_array(x) -> np.ndarray:
    out = np.asarray(x, dtype=float)
    if out.ndim != 1:
        raise ValueError("expected a one-dimensional array")
    return out


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function with optional explicit at-jump values.

    Parameters
    ----------
    jump_times : array
        Strictly increasing jump locations.
    values : array
        Value on ``[jump_times[i], jump_times[i+1])``.
    initial_value : float
        Value on ``(-inf, jump_times[0])``.
    at_values : array, optional
        Value exactly at ``jump_times[i]``.  When omitted the function is
        cadlag and ``at(jump_times[i]) == values[i]``.
    """

    jump_times: np.ndarray
    values: np.ndarray
    initial_value: float
    at_values: np.ndarray | None = None

    def __post_init__(self):
        times = _as_float_array(self.jump_times)
        vals = _as_float_array(self.values)
        if times.shape != vals.shape:
            raise ValueError("jump_times and values must have equal length")
        if times.size and not np.all(np.diff(times) > 0):
            raise ValueError("jump_times must be strictly increasing")
        ats = self.at_values
        if ats is not None:
            ats = _as_float_array(ats)
            if ats.shape != times.shape:
                raise ValueError("at_values must match jump_times in length")
            ats = ats.copy()
            ats.setflags(write=False)
        times = times.copy()
        vals = vals.copy()
        times.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "jump_times", times)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "at_values", ats)
        object.__setattr__(self, "initial_value", float(self.initial_value))

    @classmethod
    def from_jumps(cls, times, increments, initial_value=0.0) -> "StepFunction":
        """Cumulative cadlag function from (possibly tied, unsorted) jumps.

        Jumps at identical times accumulate into one.
        """
        times = _as_float_array(times)
        increments = _as_float_array(increments)
        if times.shape != increments.shape:
            raise ValueError("times and increments must have equal length")
        if times.size == 0:
            return cls(np.empty(0), np.empty(0), initial_value)
        order = np.argsort(times, kind="stable")
        times = times[order]
        increments = increments[order]
        uniq, start = np.unique(times, return_index=True)
        sums = np.add.reduceat(increments, start)
        vals = initial_value + np.cumsum(sums)
        return cls(uniq, vals, initial_value)

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls(np.empty(0), np.empty(0), value)

    @property
    def is_cadlag(self) -> bool:
        return self.at_values is None

    def at(self, t):
        """Value at ``t`` (vectorized).  Honors explicit at-jump values."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        if self.jump_times.size == 0:
            out = np.full(tq.shape, self.initial_value)
            return float(out[0]) if scalar else out
        idx = np.searchsorted(self.jump_times, tq, side="right") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], self.initial_value)
        if self.at_values is not None:
            pos = np.searchsorted(self.jump_times, tq, side="left")
            hit = (pos < self.jump_times.size) & (
                self.jump_times[np.minimum(pos, self.jump_times.size - 1)] == tq
            )
            out = np.where(hit, self.at_values[np.minimum(pos, self.jump_times.size - 1)], out)
        return float(out[0]) if scalar else out

    def left_at(self, t):
        """Left limit at ``t`` (vectorized)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tq = np.atleast_1d(t)
        if self.jump_times.size == 0:
            out = np.full(tq.shape, self.initial_value)
            return float(out[0]) if scalar else out
        idx = np.searchsorted(self.jump_times, tq, side="left") - 1
        out = np.where(idx >= 0, self.values[np.maximum(idx, 0)], self.initial_value)
        return float(out[0]) if scalar else out

    def __call__(self, t):
        return self.at(t)

    def combine(self, other: "StepFunction", op: Callable) -> "StepFunction":
        """Pointwise combination with another step function.

        ``op`` is applied to initial values, right-hand values and at-jump
        values on the merged jump set, so closed-interval and ">= t"
        semantics survive arithmetic.
        """
        times = np.union1d(self.jump_times, other.jump_times)
        right = op(self._right_on(times), other._right_on(times))
        initial = float(op(self.initial_value, other.initial_value))
        if self.at_values is None and other.at_values is None:
            ats = None
        else:
            ats = op(self.at(times), other.at(times))
        return StepFunction(times, right, initial, ats)

    def _right_on(self, times: np.ndarray) -> np.ndarray:
        if self.jump_times.size == 0:
            return np.full(times.shape, self.initial_value)
        idx = np.searchsorted(self.jump_times, times, side="right") - 1
        return np.where(idx >= 0, self.values[np.maximum(idx, 0)], self.initial_value)

    def __add__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, np.add)
        return self.affine(float(other), 1.0)

    def __sub__(self, other):
        if isinstance(other, StepFunction):
            return self.combine(other, np.subtract)
        return self.affine(-float(other), 1.0)

    def affine(self, shift: float, scale: float) -> "StepFunction":
        """Return ``shift + scale * f``."""
        ats = None if self.at_values is None else shift + scale * self.at_values
        return StepFunction(
            self.jump_times,
            shift + scale * self.values,
            shift + scale * self.initial_value,
            ats,
        )

    def increments(self) -> np.ndarray:
        """Right-value increments at each jump (ignores at-jump overrides)."""
        if self.jump_times.size == 0:
            return np.empty(0)
        prev = np.concatenate(([self.initial_value], self.values[:-1]))
        return self.values - prev


@dataclass(frozen=True)
class EvalGrid:
    """Evaluation window: sorted points in ``(0, b]`` with upper endpoint b.

    The first grid point doubles as the lower edge of the evaluation window
    for window-restricted integrals (risk sets vanish at 0 under entry-delay
    sampling, so integrals anchored at 0 would diverge).
    """

    points: np.ndarray
    b: float

    def __post_init__(self):
        pts = _as_float_array(self.points)
        if pts.size == 0:
            raise ValueError("grid must contain at least one point")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        if pts[0] <= 0:
            raise ValueError("grid points must be positive")
        b = float(self.b)
        if pts[-1] > b:
            raise ValueError("grid points must not exceed b")
        pts = pts.copy()
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "b", b)

    @property
    def lower(self) -> float:
        return float(self.points[0])

    @classmethod
    def of_points(cls, points) -> "EvalGrid":
        pts = _as_float_array(points)
        if pts.size == 0:
            raise ValueError("grid must contain at least one point")
        return cls(pts, float(pts[-1]))


def _candidate_points(f: StepFunction, g: StepFunction, grid: EvalGrid) -> np.ndarray:
    jumps = np.concatenate([f.jump_times, g.jump_times])
    jumps = jumps[(jumps > 0.0) & (jumps <= grid.b)]
    return np.union1d(grid.points, jumps)


def sup_norm_diff(f: StepFunction, g: StepFunction, grid: EvalGrid) -> float:
    """Largest absolute gap between two step functions over the grid closure.

    Evaluates at every grid point and, for each jump of either function inside
    ``(0, b]``, at the jump itself and its left limit, so the supremum over
    the continuous window is captured exactly for piecewise-constant inputs.
    """
    pts = _candidate_points(f, g, grid)
    gap = np.abs(f.at(pts) - g.at(pts))
    gap_left = np.abs(f.left_at(pts) - g.left_at(pts))
    return float(max(gap.max(), gap_left.max()))


def sup_diff_vs_smooth(
    f: StepFunction, fn: Callable, lo: float, hi: float, extra_points=None
) -> float:
    """Sup of ``|f - fn|`` over ``[lo, hi]`` for continuous monotone ``fn``.

    The supremum of a step-versus-monotone-continuous difference is attained
    at a jump (from either side) or at the window endpoints; all of those are
    checked, along with any extra points supplied.
    """
    jumps = f.jump_times
    jumps = jumps[(jumps >= lo) & (jumps <= hi)]
    cand = [jumps, np.asarray([lo, hi], dtype=float)]
    if extra_points is not None:
        extra = np.asarray(extra_points, dtype=float)
        cand.append(extra[(extra >= lo) & (extra <= hi)])
    pts = np.unique(np.concatenate(cand))
    smooth = np.asarray(fn(pts), dtype=float)
    gap = np.abs(f.at(pts) - smooth)
    gap_left = np.abs(f.left_at(pts) - smooth)
    return float(max(gap.max(), gap_left.max()))
