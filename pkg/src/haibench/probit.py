"""Standard-normal CDF and its inverse (the probit / Z-transform).

The inverse is a rational approximation (Acklam's coefficients, absolute
error ~1.15e-9 on its own) refined by a single Newton step against an
erfc-based CDF, which brings the absolute error to well below 1e-9 across
p in (0, 1). Several judgment metrics depend on this accuracy contract,
so it is covered by a quadrature-plus-bisection oracle in the test suite.
"""

from __future__ import annotations

import math

__all__ = ["normal_cdf", "probit"]

_SQRT2 = math.sqrt(2.0)

# Rational approximation coefficients (central region).
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
# Tail region coefficients.
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

_P_LOW = 0.02425
_P_HIGH = 1.0 - _P_LOW


def normal_cdf(x: float) -> float:
    """Cumulative distribution function of the standard normal."""
    return 0.5 * math.erfc(-x / _SQRT2)


def _rational_guess(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return (
            ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p <= _P_HIGH:
        q = p - 0.5
        r = q * q
        return (
            ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        ) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    q = math.sqrt(-2.0 * math.log(1.0 - p))
    return -(
        ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    ) / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)


def probit(p: float) -> float:
    """Inverse standard-normal CDF.

    Raises ValueError outside the open interval (0, 1); the SDT layer is
    responsible for correcting degenerate rates before calling this.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"probit requires 0 < p < 1, got {p!r}")
    x = _rational_guess(p)
    # One Newton step: f(x) = Phi(x) - p, f'(x) = phi(x).
    err = normal_cdf(x) - p
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    if pdf > 0.0:
        x -= err / pdf
    return x
