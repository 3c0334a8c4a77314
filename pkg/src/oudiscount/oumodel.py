"""Closed-form mathematics of the mean-reverting rate model.

The instantaneous real rate follows an Ornstein-Uhlenbeck diffusion
``dr = -alpha (r - m) dt + k dW``.  Risk aversion enters as a constant
market price of risk ``q`` that shifts the reversion level to
``m* = m + q k / alpha``; all pricing formulas below are expressed in
terms of that shifted mean.

Everything here is pure, stateless double-precision arithmetic.  The
exponential expressions degrade gracefully as ``alpha * tau -> 0``:
each appears through one of three helper ratios (``_G``, ``_H``,
``_B3``) that switch to Maclaurin series below a crossover chosen so
relative error stays near 1e-13 throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .special import erfc

__all__ = [
    "OuParams",
    "RiskSpec",
    "CharCoeffs",
    "risk_adjusted_mean",
    "log_discount",
    "annualized_rate",
    "long_run_rate",
    "yield_affine_coeffs",
    "char_coeffs",
    "transition_density",
    "prob_negative",
    "prob_negative_stationary",
    "prob_below_long_run",
]


@dataclass(frozen=True)
class OuParams:
    """Instantaneous process parameters, annualized.

    ``m`` is the stationary mean (any sign), ``k`` the noise intensity and
    ``alpha`` the mean-reversion rate.  ``k == 0`` is accepted as the
    deterministic limiting case; it is useful for exact small-scale checks
    even though the stationary distribution then collapses to a point.
    """

    m: float
    k: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.m) and math.isfinite(self.k) and math.isfinite(self.alpha)):
            raise DomainError("OU parameters must be finite")
        if self.k < 0:
            raise DomainError(f"noise intensity k must be >= 0, got {self.k}")
        if self.alpha <= 0:
            raise DomainError(f"reversion rate alpha must be > 0, got {self.alpha}")

    @property
    def stationary_std(self) -> float:
        return self.k / math.sqrt(2.0 * self.alpha)

    @property
    def stationary_var(self) -> float:
        return self.k * self.k / (2.0 * self.alpha)

    def shifted(self, new_mean: float) -> "OuParams":
        """Same dynamics around a different reversion level."""
        return OuParams(new_mean, self.k, self.alpha)


@dataclass(frozen=True)
class RiskSpec:
    """Market price of risk and the reversion level it implies."""

    q: float
    m_star: float


def risk_adjusted_mean(params: OuParams, q: float) -> RiskSpec:
    """Shift the reversion level by the risk premium: ``m* = m + q k / alpha``."""
    return RiskSpec(q=q, m_star=params.m + q * params.k / params.alpha)


# --- small-x safe exponential ratios -------------------------------------
#
# With x = alpha * tau:
#   _G(x)  = (1 - exp(-x)) / x                       -> 1    as x -> 0
#   _H(x)  = (x - (1 - exp(-x))) / x^2               -> 1/2
#   _B3(x) = (x - 2(1-exp(-x)) + (1-exp(-2x))/2)/x^3 -> 1/3
# The last two cancel catastrophically near zero, hence the series branches.

def _G(x: float) -> float:
    if x == 0.0:
        return 1.0
    return -math.expm1(-x) / x


def _H(x: float) -> float:
    if x < 0.01:
        # sum_n (-1)^n x^n / (n+2)!
        term, total = 0.5, 0.5
        for n in range(1, 20):
            term *= -x / (n + 2)
            total += term
            if abs(term) <= 1e-18 * abs(total):
                break
        return total
    return (x + math.expm1(-x)) / (x * x)


def _B3(x: float) -> float:
    if x < 0.05:
        # sum_{n>=3} (-1)^(n+1) (2^(n-1) - 2)/n! x^(n-3)
        total = 0.0
        sign, fact, pow2, xp = 1.0, 6.0, 4.0, 1.0
        for n in range(3, 30):
            term = sign * (pow2 - 2.0) / fact * xp
            total += term
            if abs(term) <= 1e-18 * abs(total):
                break
            sign = -sign
            fact *= n + 1
            pow2 *= 2.0
            xp *= x
        return total
    return (x + 2.0 * math.expm1(-x) - 0.5 * math.expm1(-2.0 * x)) / (x * x * x)


def log_discount(params: OuParams, q: float, r: float, tau: float) -> float:
    """Logarithm of the discount factor over a horizon of ``tau`` years.

    ``r`` is the current instantaneous rate.  The value is

        ln D = -r tau G - m* (tau - tau G) + (k^2 tau^3 / 2) B3,

    with G and B3 the exponential ratios above evaluated at
    ``alpha * tau``.  ``ln D(0) == 0`` exactly, and for ``k == 0``,
    ``q == 0``, ``r == m`` the value reduces to ``-m * tau``.
    """
    if tau < 0:
        raise DomainError(f"maturity tau must be >= 0, got {tau}")
    m_star = risk_adjusted_mean(params, q).m_star
    x = params.alpha * tau
    g = _G(x)
    return (-r * tau * g
            - m_star * tau * x * _H(x)
            + 0.5 * params.k * params.k * tau ** 3 * _B3(x))


def annualized_rate(params: OuParams, q: float, r: float, tau: float) -> float:
    """Constant-rate equivalent ``-ln D(tau) / tau``.

    At ``tau == 0`` the analytic limit ``r`` is returned so discount
    curves can be evaluated from zero maturity.
    """
    if tau < 0:
        raise DomainError(f"maturity tau must be >= 0, got {tau}")
    if tau == 0:
        return float(r)
    return -log_discount(params, q, r, tau) / tau


def long_run_rate(params: OuParams, q: float) -> float:
    """Asymptotic discount rate ``m + q k/alpha - k^2/(2 alpha^2)``.

    This is the ``tau -> infinity`` limit of :func:`annualized_rate`:
    the risk premium raises it, the noise-to-persistence ratio lowers it.
    """
    ka = params.k / params.alpha
    return params.m + ka * (q - 0.5 * ka)


def yield_affine_coeffs(params: OuParams, q: float, tau: float) -> tuple[float, float]:
    """Intercept and slope of the yield as a function of the current rate.

    For fixed maturity the model yield is affine in the instantaneous
    rate: ``y(tau; r) = intercept + slope * r``.  Used wherever whole
    series of yields are generated from a rate path.
    """
    if tau <= 0:
        raise DomainError(f"maturity tau must be > 0, got {tau}")
    m_star = risk_adjusted_mean(params, q).m_star
    x = params.alpha * tau
    slope = _G(x)
    intercept = m_star * x * _H(x) - 0.5 * params.k * params.k * tau * tau * _B3(x)
    return intercept, slope


@dataclass(frozen=True)
class CharCoeffs:
    """Coefficients of the joint characteristic function at one point.

    The Fourier transform of the (cumulated rate, rate) density is
    ``exp(-A w2^2 - B w2 - C)``; ``a_coef``, ``b_coef`` and ``c_coef``
    are A, B, C evaluated at the requested ``(omega1, t)``.
    """

    a_coef: complex
    b_coef: complex
    c_coef: complex
    omega1: complex
    t: float


def char_coeffs(params: OuParams, r0: float, omega1: complex, t: float) -> CharCoeffs:
    """Evaluate the characteristic-function coefficients A, B, C.

    Initial conditions: ``A(w1, 0) = 0``, ``B(w1, 0) = i r0``,
    ``C(w1, 0) = 0``.  The discount factor is recovered as
    ``exp(-C(-1j, t))`` (risk-neutral case handled by shifting ``m``
    before the call).  Only the imaginary axis of ``omega1`` is
    supported; that covers every point the library evaluates (0 and -i).
    """
    if t < 0:
        raise DomainError(f"time t must be >= 0, got {t}")
    w1 = complex(omega1)
    if w1.real != 0.0:
        raise DomainError("omega1 must lie on the imaginary axis")
    m, k, alpha = params.m, params.k, params.alpha
    x = alpha * t
    u = -math.expm1(-x)          # 1 - exp(-alpha t)
    decay = math.exp(-x)
    a = k * k / (4.0 * alpha) * -math.expm1(-2.0 * x)
    b = 1j * r0 * decay + k * k * w1 / (2.0 * alpha * alpha) * u * u + 1j * m * u
    c = (1j * w1 * r0 * t * _G(x)
         + 0.5 * k * k * w1 * w1 * t ** 3 * _B3(x)
         + 1j * m * w1 * t * x * _H(x))
    return CharCoeffs(a_coef=a, b_coef=b, c_coef=c, omega1=w1, t=t)


def _conditional_moments(params: OuParams, r0: float, t: float) -> tuple[float, float]:
    x = params.alpha * t
    mean = params.m + (r0 - params.m) * math.exp(-x)
    var = params.stationary_var * -math.expm1(-2.0 * x)
    return mean, var


def transition_density(params: OuParams, r0: float, t: float, r: float) -> float:
    """Density of the rate ``t`` years ahead given the current rate ``r0``.

    Gaussian with mean ``m + (r0 - m) exp(-alpha t)`` and variance
    ``k^2/(2 alpha) (1 - exp(-2 alpha t))``.
    """
    if t <= 0:
        raise DomainError(f"time t must be > 0, got {t}")
    if params.k == 0:
        raise DomainError("transition density degenerates to a point mass for k == 0")
    mean, var = _conditional_moments(params, r0, t)
    z = (r - mean) ** 2 / (2.0 * var)
    return math.exp(-z) / math.sqrt(2.0 * math.pi * var)


def prob_negative(params: OuParams, r0: float, t: float) -> float:
    """Probability that the rate is negative ``t`` years ahead."""
    if t <= 0:
        raise DomainError(f"time t must be > 0, got {t}")
    if params.k == 0:
        raise DomainError("probability degenerates for k == 0")
    x = params.alpha * t
    mean = params.m + (r0 - params.m) * math.exp(-x)
    scale = math.sqrt(-math.expm1(-2.0 * x))
    arg = math.sqrt(params.alpha) / params.k * mean / scale
    return 0.5 * erfc(arg)


def prob_negative_stationary(params: OuParams) -> float:
    """Stationary probability of a negative rate, ``erfc(mu/kappa)/2``.

    ``mu = m / alpha`` and ``kappa = k / alpha^(3/2)`` are the
    dimensionless level and volatility; their ratio equals
    ``m sqrt(alpha) / k``.
    """
    if params.k == 0:
        raise DomainError("probability degenerates for k == 0")
    return 0.5 * erfc(params.m * math.sqrt(params.alpha) / params.k)


def prob_below_long_run(params: OuParams, q: float) -> float:
    """Stationary probability that the rate sits below the long-run rate."""
    if params.k == 0:
        raise DomainError("probability degenerates for k == 0")
    gap = params.m - long_run_rate(params, q)
    return 0.5 * erfc(math.sqrt(params.alpha) / params.k * gap)
