"""Time-series containers shared across the package.

A :class:`TimeSeries` is a gap-free run of scalar observations at a fixed
frequency (annual or monthly).  Rates are stored as fractions per year,
never percent; the ``unit`` field documents what the numbers mean but is
not interpreted beyond sanity checks at the ingest boundary.
"""

from __future__ import annotations

import calendar
import datetime as dt
import enum
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, EmptySeriesError


class Frequency(enum.Enum):
    ANNUAL = "annual"
    MONTHLY = "monthly"


class Maturity(enum.Enum):
    THREE_MONTH = "three_month"
    TEN_YEAR = "ten_year"

    @property
    def tau_years(self) -> float:
        return 0.25 if self is Maturity.THREE_MONTH else 10.0


def _month_end(year: int, month: int) -> dt.date:
    return dt.date(year, month, calendar.monthrange(year, month)[1])


@dataclass
class TimeSeries:
    """Ordered, gap-free observations starting at ``start_date``.

    ``values`` is coerced to a read-only float array so instances can be
    shared freely between threads.
    """

    start_date: dt.date
    frequency: Frequency
    values: np.ndarray
    unit: str = "fraction/year"

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise EmptySeriesError("a TimeSeries needs a non-empty 1-D value array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("TimeSeries values must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        self.values = arr

    def __len__(self) -> int:
        return self.values.size

    def date_at(self, i: int) -> dt.date:
        if not 0 <= i < len(self):
            raise IndexError(f"observation index {i} out of range 0..{len(self) - 1}")
        if self.frequency is Frequency.ANNUAL:
            year = self.start_date.year + i
            # Clamp the day for anniversaries that do not exist (Feb 29).
            day = min(self.start_date.day,
                      calendar.monthrange(year, self.start_date.month)[1])
            return dt.date(year, self.start_date.month, day)
        months = self.start_date.month - 1 + i
        year = self.start_date.year + months // 12
        month = months % 12 + 1
        day = min(self.start_date.day, calendar.monthrange(year, month)[1])
        return dt.date(year, month, day)

    @property
    def end_date(self) -> dt.date:
        return self.date_at(len(self) - 1)

    def years(self) -> np.ndarray:
        """Calendar year of every observation."""
        if self.frequency is Frequency.ANNUAL:
            return self.start_date.year + np.arange(len(self))
        months = self.start_date.month - 1 + np.arange(len(self))
        return self.start_date.year + months // 12

    @classmethod
    def annual(cls, start_year: int, values, unit: str = "fraction/year") -> "TimeSeries":
        """Annual series with the year-end (Dec 31) date convention."""
        return cls(dt.date(start_year, 12, 31), Frequency.ANNUAL, np.asarray(values, float), unit)


@dataclass
class RealRateSeries:
    """A real-rate series; values may be negative."""

    base: TimeSeries
    maturity_label: Maturity = Maturity.THREE_MONTH

    @property
    def values(self) -> np.ndarray:
        return self.base.values

    def __len__(self) -> int:
        return len(self.base)


def to_annual(ts: TimeSeries) -> TimeSeries:
    """Annual view of a series.

    Monthly series are sampled at the observation at (or latest before) each
    year-end, i.e. the last available observation of every calendar year;
    annual series pass through unchanged.
    """
    if ts.frequency is Frequency.ANNUAL:
        return ts
    years = ts.years()
    # Last index of every calendar year present (input is gap-free).
    last_idx = np.flatnonzero(np.diff(years, append=years[-1] + 1) != 0)
    sampled = ts.values[last_idx]
    return TimeSeries(dt.date(int(years[last_idx[0]]), 12, 31), Frequency.ANNUAL,
                      sampled, ts.unit)


def align_annual(a: TimeSeries, b: TimeSeries):
    """Annualize both series and restrict them to their common years.

    Returns ``(years, values_a, values_b)``; raises
    :class:`AlignmentError` when the overlap is empty.
    """
    aa, bb = to_annual(a), to_annual(b)
    ya, yb = aa.years(), bb.years()
    lo = max(ya[0], yb[0])
    hi = min(ya[-1], yb[-1])
    if hi < lo:
        raise AlignmentError(
            f"series do not overlap: {ya[0]}..{ya[-1]} vs {yb[0]}..{yb[-1]}")
    years = np.arange(lo, hi + 1)
    va = aa.values[np.searchsorted(ya, years)]
    vb = bb.values[np.searchsorted(yb, years)]
    return years, va, vb
