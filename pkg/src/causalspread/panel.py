"""Aligned multivariate daily time-series panel."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np


@dataclass(frozen=True)
class TimeSeriesPanel:
    """Named real-valued daily series on a shared, gap-free date axis.

    Parameters
    ----------
    dates : tuple of datetime.date
        Calendar days, strictly increasing by exactly one day.
    series : dict of str -> ndarray
        One float vector per series name, all of length ``len(dates)``.

    The per-series date of the first nonzero observation is derived at
    construction and exposed as ``first_report`` (``None`` for an all-zero
    series).
    """

    dates: tuple[date, ...]
    series: dict[str, np.ndarray]
    first_report: dict[str, date | None] = field(init=False, repr=False)

    def __post_init__(self):
        if not self.dates:
            raise ValueError("panel needs at least one date")
        if not self.series:
            raise ValueError("panel needs at least one series")
        for a, b in zip(self.dates, self.dates[1:]):
            if b - a != timedelta(days=1):
                raise ValueError(f"date axis must advance by one day, got {a} -> {b}")
        n = len(self.dates)
        clean: dict[str, np.ndarray] = {}
        first: dict[str, date | None] = {}
        for name, values in self.series.items():
            v = np.asarray(values, dtype=float)
            if v.ndim != 1 or v.shape[0] != n:
                raise ValueError(f"series {name!r} has length {v.shape}, expected {n}")
            if not np.all(np.isfinite(v)):
                raise ValueError(f"series {name!r} contains non-finite values")
            v = v.copy()
            v.flags.writeable = False
            clean[name] = v
            nonzero = np.nonzero(v)[0]
            first[name] = self.dates[nonzero[0]] if nonzero.size else None
        object.__setattr__(self, "series", clean)
        object.__setattr__(self, "first_report", first)

    @property
    def n(self) -> int:
        return len(self.dates)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.series)

    def values(self, name: str) -> np.ndarray:
        try:
            return self.series[name]
        except KeyError:
            raise KeyError(f"unknown series {name!r}") from None

    def with_series(self, extra: dict[str, np.ndarray]) -> "TimeSeriesPanel":
        """New panel with additional series appended on the same date axis."""
        merged = dict(self.series)
        for name, values in extra.items():
            if name in merged:
                raise ValueError(f"series {name!r} already present")
            merged[name] = np.asarray(values, dtype=float)
        return TimeSeriesPanel(self.dates, merged)

    def subset(self, names) -> "TimeSeriesPanel":
        return TimeSeriesPanel(self.dates, {name: self.values(name) for name in names})

    def normalized_by_max(self) -> "TimeSeriesPanel":
        """Each series divided by its maximum absolute value (left as-is if flat)."""
        scaled = {}
        for name, v in self.series.items():
            peak = np.max(np.abs(v))
            scaled[name] = v / peak if peak > 0 else v.copy()
        return TimeSeriesPanel(self.dates, scaled)
