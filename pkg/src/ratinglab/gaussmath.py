"""Shared Gaussian numerics: standard-normal functions and the moment-matching
corrections for truncated Gaussians used by the Bayesian skill updates.

All functions are pure and operate on the standard normal scale; callers
rescale by their own combined deviation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)

# Rational approximation coefficients for the inverse normal CDF
# (Acklam's algorithm; refined below with a Newton step).
_A = (
    -3.969683028665376e01,
    2.209460984245205e02,
    -2.759285104469687e02,
    1.383577518672690e02,
    -3.066479806614716e01,
    2.506628277459239e00,
)
_B = (
    -5.447609879822406e01,
    1.615858368580409e02,
    -1.556989798598866e02,
    6.680131188771972e01,
    -1.328068155288572e01,
)
_C = (
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e00,
    -2.549732539343734e00,
    4.374664141464968e00,
    2.938163982698783e00,
)
_D = (
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e00,
    3.754408661907416e00,
)


@dataclass(frozen=True)
class GaussianMoments:
    """Mean and variance of a (possibly truncated) Gaussian."""

    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.variance)):
            raise ValueError("Gaussian moments must be finite")
        if self.variance < 0.0:
            raise ValueError(f"variance must be >= 0, got {self.variance}")


def std_pdf(x: float) -> float:
    """Standard normal density: exp(-x^2/2) / sqrt(2*pi)."""
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def std_cdf(x: float) -> float:
    """Standard normal CDF via the complementary error function.

    cdf(x) = erfc(-x / sqrt(2)) / 2, accurate to machine precision and
    free of cancellation in the lower tail.
    """
    return 0.5 * math.erfc(-x / _SQRT2)


def _inv_cdf_lower_half(p: float) -> float:
    """Inverse CDF for p <= 0.5: rational first guess plus one Newton step.

    Restricting to the lower half keeps the Newton residual cdf(x) - p free
    of cancellation (both sides carry full relative precision there).
    """
    p_low = 0.02425
    if p < p_low:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
            (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        )
    else:
        q = p - 0.5
        r = q * q
        x = (
            (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5])
            * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)
        )
    u = std_pdf(x)
    if u > 0.0:
        x -= (std_cdf(x) - p) / u
    return x


def std_inv_cdf(p: float) -> float:
    """Inverse standard normal CDF.

    Solved in the lower tail and mirrored for p > 0.5 (1 - p is exact in
    floating point for p >= 0.5), so accuracy is a few ulps across the whole
    open interval.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"inverse cdf requires 0 < p < 1, got {p}")
    if p > 0.5:
        return -_inv_cdf_lower_half(1.0 - p)
    return _inv_cdf_lower_half(p)


def v_win(t: float, a: float) -> float:
    """Mean correction for a Gaussian truncated to a win (difference > margin).

    v = pdf(t - a) / cdf(t - a). For t - a deep in the lower tail the direct
    ratio underflows to 0/0; a Mills-ratio expansion takes over there.
    """
    x = t - a
    denom = std_cdf(x)
    if denom < 1e-300:
        inv_x2 = 1.0 / (x * x)
        return -x / (1.0 - inv_x2 * (1.0 - 3.0 * inv_x2))
    return std_pdf(x) / denom


def w_win(t: float, a: float) -> float:
    """Variance correction for the win-case truncation: w = v * (v + t - a).

    Always in (0, 1); the posterior variance shrinks by exactly this factor
    of its share of the joint variance.
    """
    v = v_win(t, a)
    w = v * (v + t - a)
    if w >= 1.0:
        return math.nextafter(1.0, 0.0)
    if w <= 0.0:
        return math.nextafter(0.0, 1.0)
    return w


def v_draw(t: float, a: float) -> float:
    """Mean correction for a Gaussian truncated to a draw (|difference| <= margin).

    Odd in t: pulls the mean toward the centre of the band (-a, a).
    """
    if a <= 0.0:
        raise ValueError(f"draw margin must be positive, got {a}")
    abs_t = abs(t)
    lo = -a - abs_t
    hi = a - abs_t
    z = std_cdf(hi) - std_cdf(lo)
    if z < 1e-300:
        v = hi
    else:
        v = (std_pdf(lo) - std_pdf(hi)) / z
    return -v if t < 0.0 else v


def w_draw(t: float, a: float) -> float:
    """Variance correction for the draw-case truncation.

    w = v^2 + (hi*pdf(hi) - lo*pdf(lo)) / Z over the band, with Z the
    truncated mass; in (0, 1), approaching 1 as the band pins the value.
    """
    if a <= 0.0:
        raise ValueError(f"draw margin must be positive, got {a}")
    abs_t = abs(t)
    lo = -a - abs_t
    hi = a - abs_t
    z = std_cdf(hi) - std_cdf(lo)
    if z < 1e-300:
        return math.nextafter(1.0, 0.0)
    v = (std_pdf(lo) - std_pdf(hi)) / z
    w = v * v + (hi * std_pdf(hi) - lo * std_pdf(lo)) / z
    if w >= 1.0:
        return math.nextafter(1.0, 0.0)
    if w <= 0.0:
        return math.nextafter(0.0, 1.0)
    return w
