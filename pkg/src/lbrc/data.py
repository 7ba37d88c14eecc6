"""Observation containers for length-biased right-censored samples.

One subject record is ``(a, v, delta)``: the entry delay ``a`` (time from
onset to sampling), the observed residual time ``v`` (time from sampling to
event or censoring), and the event indicator ``delta``.  The total observed
time is ``y = a + v``.  Calendar onset times play no role in estimation and
are not stored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDataError

__all__ = ["LbrcObservation", "Dataset"]


@dataclass(frozen=True)
class LbrcObservation:
    """A single subject: entry delay, residual follow-up, event indicator."""

    a: float
    v: float
    delta: int

    def __post_init__(self):
        if not np.isfinite(self.a) or self.a < 0:
            raise InvalidDataError(f"entry delay must be finite and >= 0, got {self.a}")
        if not np.isfinite(self.v) or self.v < 0:
            raise InvalidDataError(f"residual time must be finite and >= 0, got {self.v}")
        if self.delta not in (0, 1):
            raise InvalidDataError(f"event indicator must be 0 or 1, got {self.delta}")

    @property
    def y(self) -> float:
        """Total observed time from onset."""
        return self.a + self.v


class Dataset:
    """Immutable column-wise sample of LBRC observations.

    Entry delays of exactly zero are accepted so that the no-truncation
    reductions (plain right-censored data) can be represented; the CSV
    ingestion layer is stricter and rejects them.
    """

    __slots__ = ("a", "v", "delta", "y", "n")

    def __init__(self, a, v, delta):
        a = np.asarray(a, dtype=float).reshape(-1)
        v = np.asarray(v, dtype=float).reshape(-1)
        delta = np.asarray(delta).reshape(-1)
        if not (a.size == v.size == delta.size):
            raise InvalidDataError("a, v and delta must have equal length")
        if a.size == 0:
            raise InvalidDataError("dataset must contain at least one observation")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise InvalidDataError("entry delays must be finite and >= 0")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidDataError("residual times must be finite and >= 0")
        if not np.all(np.isin(delta, (0, 1))):
            raise InvalidDataError("event indicators must be 0 or 1")
        delta = delta.astype(np.int8)
        y = a + v
        for arr in (a, v, delta, y):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "n", int(a.size))

    def __setattr__(self, name, value):
        raise AttributeError("Dataset is immutable")

    def __len__(self) -> int:
        return self.n

    def row(self, i: int) -> LbrcObservation:
        return LbrcObservation(float(self.a[i]), float(self.v[i]), int(self.delta[i]))

    @property
    def observations(self) -> list[LbrcObservation]:
        return [self.row(i) for i in range(self.n)]

    @classmethod
    def from_observations(cls, obs) -> "Dataset":
        obs = list(obs)
        return cls(
            [o.a for o in obs],
            [o.v for o in obs],
            [o.delta for o in obs],
        )

    @property
    def n_events(self) -> int:
        return int(self.delta.sum())

    def __repr__(self) -> str:
        return f"Dataset(n={self.n}, events={self.n_events})"
