"""Real-rate construction primitives and empirical statistics.

Rates are fractions per year throughout; conversion to percent happens
only at the CLI boundary.  All functions are pure and thread-safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, DegenerateSeriesError, DomainError, EmptySeriesError
from .series import RealRateSeries, TimeSeries, align_annual

__all__ = [
    "InversionStats",
    "yield_from_annual_rate",
    "inflation_rate",
    "fisher_real_rate",
    "negative_fraction",
    "inversion_stats",
    "series_correlation",
]


@dataclass(frozen=True)
class InversionStats:
    """Yield-spread summary: how often the long rate sits below the short one.

    ``counts`` histogram the spread (long minus short); ties at zero count
    as non-inverted, so ``fraction_inverted`` uses a strict ``< 0``.
    The counts always sum to ``n_observations``.
    """

    fraction_inverted: float
    bin_edges: np.ndarray
    counts: np.ndarray
    n_observations: int


def yield_from_annual_rate(beta: float) -> float:
    """Continuously-compounded yield ``ln(1 + beta)`` of an annual rate."""
    if beta <= -1.0:
        raise DomainError(f"annual rate must exceed -1, got {beta}")
    return math.log1p(beta)


def inflation_rate(cpi_annual_growth: TimeSeries, t: int, tau_years: int) -> float:
    """Forward ``tau_years``-average log inflation starting at index ``t``.

    Averages ``ln(1 + C)`` over the window ``[t, t + tau_years - 1]`` of the
    annual CPI growth series.
    """
    if tau_years < 1:
        raise DomainError(f"tau_years must be >= 1, got {tau_years}")
    if t < 0 or t + tau_years > len(cpi_annual_growth):
        raise IndexError(
            f"window [{t}, {t + tau_years - 1}] outside series of length "
            f"{len(cpi_annual_growth)}")
    window = cpi_annual_growth.values[t:t + tau_years]
    if np.any(window <= -1.0):
        raise DomainError("CPI growth entries must exceed -1")
    return float(np.mean(np.log1p(window)))


def fisher_real_rate(nominal: float, inflation: float) -> float:
    """Real rate as nominal minus inflation; negative results are legal."""
    return nominal - inflation


def _rate_values(series) -> np.ndarray:
    values = getattr(series, "values", series)
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise EmptySeriesError("series has no observations")
    return values


def negative_fraction(series: RealRateSeries) -> float:
    """Share of strictly negative observations (zeros count as non-negative)."""
    values = _rate_values(series)
    return float(np.count_nonzero(values < 0.0) / values.size)


def inversion_stats(three_month: RealRateSeries, ten_year: RealRateSeries,
                    bin_width: float = 0.01,
                    bin_range: tuple[float, float] = (-0.15, 0.15)) -> InversionStats:
    """Spread statistics of (long - short) over the overlapping years.

    The histogram grid is anchored at multiples of ``bin_width`` and grows
    beyond ``bin_range`` when spreads fall outside it, so every
    observation lands in some bin.
    """
    if bin_width <= 0:
        raise DomainError("bin_width must be positive")
    _, v3, v10 = align_annual(three_month.base, ten_year.base)
    spread = v10 - v3
    lo = min(bin_range[0], math.floor(spread.min() / bin_width) * bin_width)
    hi = max(bin_range[1], math.ceil(spread.max() / bin_width) * bin_width)
    while lo > spread.min():
        lo -= bin_width
    while hi < spread.max():
        hi += bin_width
    n_bins = round((hi - lo) / bin_width)
    edges = lo + bin_width * np.arange(n_bins + 1)
    counts, _ = np.histogram(spread, bins=edges)
    return InversionStats(
        fraction_inverted=float(np.count_nonzero(spread < 0.0) / spread.size),
        bin_edges=edges,
        counts=counts,
        n_observations=spread.size,
    )


def series_correlation(a: TimeSeries, b: TimeSeries) -> float:
    """Pearson correlation over the annual overlap of two series."""
    _, va, vb = align_annual(a, b)
    if va.size < 3:
        raise AlignmentError(
            f"correlation needs an overlap of >= 3 points, got {va.size}")
    if np.ptp(va) == 0.0 or np.ptp(vb) == 0.0:
        raise DegenerateSeriesError("correlation undefined for a constant series")
    return float(np.corrcoef(va, vb)[0, 1])
