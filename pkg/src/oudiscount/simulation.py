"""Path simulation, the Monte Carlo discount oracle, and model statistics.

Paths use the exact one-step transition of the mean-reverting diffusion,
so the simulation is distribution-exact at any step size.  Replicated
computations draw their randomness from per-replicate streams keyed by
``(seed, replicate)``: results do not depend on execution order or
thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import kernels, oumodel, ratecore
from .errors import DomainError, DegenerateSeriesError, TooManyFailuresError
from .oumodel import OuParams, annualized_rate, risk_adjusted_mean, yield_affine_coeffs
from .ratecore import InversionStats
from .rng import stream
from .series import Maturity, RealRateSeries, TimeSeries

__all__ = [
    "SimConfig",
    "SimulatedPath",
    "DiscountCurve",
    "ModelStatistics",
    "simulate_ou_path",
    "mc_discount",
    "surrogate_yield_series",
    "add_matching_noise",
    "model_statistics",
    "discount_curve_with_bands",
]

# Purpose tags appended to seeds so distinct uses never share a stream.
_TAG_PATH = 0
_TAG_NOISE = 1


@dataclass(frozen=True)
class SimConfig:
    """Path-simulation settings.

    ``initial_rate=None`` starts each path with a stationary draw;
    a float pins the starting rate (e.g. the last observed real rate).
    """

    years: int
    steps_per_year: int = 252
    seed: int = 0
    initial_rate: float | None = None

    def __post_init__(self):
        if self.years < 1:
            raise DomainError(f"years must be >= 1, got {self.years}")
        if self.steps_per_year < 1:
            raise DomainError(f"steps_per_year must be >= 1, got {self.steps_per_year}")


@dataclass(frozen=True)
class SimulatedPath:
    """A simulated instantaneous-rate path on a regular sub-annual grid."""

    values: np.ndarray
    steps_per_year: int

    @property
    def years(self) -> int:
        return (self.values.size - 1) // self.steps_per_year

    def annual_rates(self) -> np.ndarray:
        """Rate at each year-end grid point (one value per simulated year)."""
        idx = self.steps_per_year * np.arange(1, self.years + 1)
        return self.values[idx]


@dataclass(frozen=True)
class DiscountCurve:
    """Annualized discount rates on a maturity grid with 5%/95% bands."""

    taus: np.ndarray
    log_discounts: np.ndarray
    rates: np.ndarray
    band_5: np.ndarray
    band_95: np.ndarray


@dataclass(frozen=True)
class ModelStatistics:
    """Replicate-averaged statistics of simulated short/long yield series."""

    neg_frac_3m: float
    neg_frac_10y: float
    inversion_frac: float
    corr_3m_10y: float
    spread_bin_edges: np.ndarray
    spread_counts: np.ndarray
    n_reps: int


def _step_coefficients(params: OuParams, dt: float) -> tuple[float, float]:
    # Exact transition over dt: coef = exp(-alpha dt),
    # shock std = sqrt(k^2 (1 - coef^2) / (2 alpha)).
    coef = math.exp(-params.alpha * dt)
    shock = params.stationary_std * math.sqrt(-math.expm1(-2.0 * params.alpha * dt))
    return coef, shock


def simulate_ou_path(params: OuParams, cfg: SimConfig,
                     rng: np.random.Generator | None = None) -> SimulatedPath:
    """Simulate the instantaneous rate with the exact one-step transition."""
    if rng is None:
        rng = stream(cfg.seed, _TAG_PATH)
    dt = 1.0 / cfg.steps_per_year
    coef, shock = _step_coefficients(params, dt)
    if cfg.initial_rate is None:
        r0 = params.m + params.stationary_std * rng.standard_normal()
    else:
        r0 = float(cfg.initial_rate)
    shocks = rng.standard_normal(cfg.years * cfg.steps_per_year)
    values = kernels.ar1_path(r0, params.m, coef, shock, shocks)
    return SimulatedPath(values=values, steps_per_year=cfg.steps_per_year)


def mc_discount(params: OuParams, q: float, r0: float, t: float,
                n_paths: int, seed, steps_per_year: int = 252) -> tuple[float, float]:
    """Monte Carlo estimate of the discount factor over ``t`` years.

    Simulates the risk-adjusted process (drift toward ``m*``), accumulates
    the rate integral per path by the trapezoidal rule and averages
    ``exp(-integral)``.  Returns ``(estimate, standard_error)``.
    """
    if n_paths < 100:
        raise DomainError(f"n_paths must be >= 100 for a stable error, got {n_paths}")
    if t < 0:
        raise DomainError(f"horizon t must be >= 0, got {t}")
    if t == 0:
        return 1.0, 0.0
    n_steps = max(1, math.ceil(t * steps_per_year))
    dt = t / n_steps
    m_star = risk_adjusted_mean(params, q).m_star
    coef, shock = _step_coefficients(params, dt)
    x = kernels.path_integrals(float(r0), m_star, coef, shock, dt,
                               n_steps, n_paths, stream(seed))
    d = np.exp(-x)
    estimate = float(np.mean(d))
    stderr = float(np.std(d, ddof=1) / math.sqrt(n_paths))
    return estimate, stderr


def surrogate_yield_series(path: SimulatedPath, params: OuParams, q: float,
                           tau: float, start_year: int = 1900) -> TimeSeries:
    """Model yields at annual sample dates of a simulated rate path.

    The yield of maturity ``tau`` is affine in the instantaneous rate, so
    the whole series is one affine map of the year-end path values.
    """
    intercept, slope = yield_affine_coeffs(params, q, tau)
    values = intercept + slope * path.annual_rates()
    return TimeSeries.annual(start_year, values)


def add_matching_noise(series: TimeSeries, target_std: float, seed) -> TimeSeries:
    """Add IID normal noise so the sample std rises toward ``target_std``.

    Additive noise can only inflate dispersion; a target below the current
    sample std is an error.
    """
    current = float(np.std(series.values, ddof=1))
    if target_std < current:
        raise DomainError(
            f"cannot deflate: target std {target_std} below sample std {current}")
    if target_std == current:
        return replace(series, values=series.values.copy())
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed)
    noise_std = math.sqrt(target_std ** 2 - current ** 2)
    return replace(series, values=series.values + rng.normal(0.0, noise_std, len(series)))


def _one_statistics_rep(params: OuParams, q: float, cfg: SimConfig, rep: int,
                        ten_year_target_std: float | None,
                        bin_width: float, bin_range: tuple[float, float]):
    rng = stream(cfg.seed, _TAG_PATH, rep)
    path = simulate_ou_path(params, cfg, rng)
    y3 = surrogate_yield_series(path, params, q, Maturity.THREE_MONTH.tau_years)
    y10 = surrogate_yield_series(path, params, q, Maturity.TEN_YEAR.tau_years)
    if ten_year_target_std is not None:
        y10 = add_matching_noise(y10, ten_year_target_std, stream(cfg.seed, _TAG_NOISE, rep))
    r3 = RealRateSeries(y3, Maturity.THREE_MONTH)
    r10 = RealRateSeries(y10, Maturity.TEN_YEAR)
    inv = ratecore.inversion_stats(r3, r10, bin_width=bin_width, bin_range=bin_range)
    try:
        corr = ratecore.series_correlation(y3, y10)
    except DegenerateSeriesError:
        corr = math.nan
    return (ratecore.negative_fraction(r3), ratecore.negative_fraction(r10),
            inv, corr)


def model_statistics(params: OuParams, q: float, cfg: SimConfig, n_reps: int,
                     ten_year_target_std: float | None = None,
                     bin_width: float = 0.01,
                     bin_range: tuple[float, float] = (-0.15, 0.15),
                     threads: int = 1) -> ModelStatistics:
    """Replicate-averaged negative-rate and inversion statistics.

    Each replicate simulates one instantaneous path, derives annual 3-month
    and 10-year yield series (optionally noise-matching the 10-year series
    to ``ten_year_target_std``, the dispersion observed in data) and runs
    the empirical statistics.  Fractions and correlations are averaged
    over replicates; spread histograms are accumulated on a common grid.
    """
    if n_reps < 1:
        raise DomainError(f"n_reps must be >= 1, got {n_reps}")
    args = [(params, q, cfg, rep, ten_year_target_std, bin_width, bin_range)
            for rep in range(n_reps)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda a: _one_statistics_rep(*a), args))
    else:
        results = [_one_statistics_rep(*a) for a in args]

    neg3 = float(np.mean([r[0] for r in results]))
    neg10 = float(np.mean([r[1] for r in results]))
    inv_frac = float(np.mean([r[2].fraction_inverted for r in results]))
    corrs = np.array([r[3] for r in results])
    corr = float(np.nanmean(corrs)) if np.any(np.isfinite(corrs)) else math.nan

    # Merge per-replicate histograms: bins are width-anchored, so grids
    # differ only by leading/trailing extensions.
    lo = min(r[2].bin_edges[0] for r in results)
    hi = max(r[2].bin_edges[-1] for r in results)
    n_bins = round((hi - lo) / bin_width)
    edges = lo + bin_width * np.arange(n_bins + 1)
    counts = np.zeros(n_bins, dtype=np.int64)
    for r in results:
        offset = round((r[2].bin_edges[0] - lo) / bin_width)
        counts[offset:offset + r[2].counts.size] += r[2].counts
    return ModelStatistics(neg_frac_3m=neg3, neg_frac_10y=neg10,
                           inversion_frac=inv_frac, corr_3m_10y=corr,
                           spread_bin_edges=edges, spread_counts=counts,
                           n_reps=n_reps)


def discount_curve_with_bands(params: OuParams, q: float, r0: float,
                              tau_grid, cfg: SimConfig, n_reps: int,
                              threads: int = 1) -> DiscountCurve:
    """Central discount curve plus pointwise 5%/95% estimation-uncertainty bands.

    The central curve evaluates the closed form at the point estimates.
    Bands re-estimate the parameters on ``n_reps`` simulated surrogate
    datasets (the confidence-quantile machinery) and take pointwise
    quantiles of the implied annualized rates, all at the same ``r0``.
    """
    taus = np.asarray(tau_grid, dtype=float)
    if taus.ndim != 1 or taus.size == 0:
        raise DomainError("tau_grid must be a non-empty 1-D array")
    if np.any(np.diff(taus) < 0):
        raise DomainError("tau_grid must be sorted ascending")
    from . import estimation  # deferred: estimation imports this module

    log_d = np.array([oumodel.log_discount(params, q, r0, t) for t in taus])
    rates = np.array([annualized_rate(params, q, r0, t) for t in taus])
    reps = estimation.replicate_estimates(params, q, years=cfg.years,
                                          steps_per_year=cfg.steps_per_year,
                                          n_reps=n_reps, seed=cfg.seed,
                                          threads=threads)
    rep_rates = np.empty((len(reps.params), taus.size))
    for i, (p, qi) in enumerate(zip(reps.params, reps.q)):
        rep_rates[i] = [annualized_rate(p, qi, r0, t) for t in taus]
    band_5, band_95 = np.quantile(rep_rates, [0.05, 0.95], axis=0)
    return DiscountCurve(taus=taus, log_discounts=log_d, rates=rates,
                         band_5=band_5, band_95=band_95)
