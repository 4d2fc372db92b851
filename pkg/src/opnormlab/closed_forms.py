"""Closed-form antiderivative values used as quadrature-independent oracles.

Everything here is evaluated from explicit antiderivatives; no grids or
quadrature rules are involved, so these values can legitimately check the
quadrature code paths.  The `oracle` CLI subcommand exposes them.
"""
from __future__ import annotations

import math

from .errors import DivergenceError, DomainError
from .spaces import SpaceSpec, weight_exponent


def powerlaw_integral(a: float, R: float | None = None) -> float:
    """Integral of (1+|x|)^(-a) over [-R, R], or over the line when R is None."""
    if R is None:
        if a <= 1:
            raise DivergenceError(f"integral of (1+|x|)^(-a) diverges for a = {a!r} <= 1")
        return 2.0 / (a - 1.0)
    if R <= 0:
        raise DomainError("truncation radius must be positive")
    if a == 1.0:
        return 2.0 * math.log1p(R)
    return 2.0 * (1.0 - (1.0 + R) ** (1.0 - a)) / (a - 1.0)


def powerlaw_tail(a: float, R: float) -> float:
    """Integral of (1+|x|)^(-a) over |x| > R; requires a > 1."""
    if R <= 0:
        raise DomainError("truncation radius must be positive")
    if a <= 1:
        raise DivergenceError(f"tail of (1+|x|)^(-a) diverges for a = {a!r} <= 1")
    return 2.0 * (1.0 + R) ** (1.0 - a) / (a - 1.0)


def powerlaw_weighted_norm(t: float, space: SpaceSpec, R: float | None = None) -> float:
    """Weighted norm of x -> (1+|x|)^(-t), truncated to [-R, R] if R is given.

    |f|^p (1+|x|)^w collapses to (1+|x|)^(w - p*t), so the norm is a power
    of :func:`powerlaw_integral`.
    """
    a = space.p * t - weight_exponent(space)
    return powerlaw_integral(a, R) ** (1.0 / space.p)


def envelope_indicator_image(kappa: float, x: float, lo: float = 0.0,
                             hi: float = 1.0, c_upper: float = 1.0) -> float:
    """Image of the indicator of [lo, hi] (0 <= lo <= hi) under the envelope kernel.

    Integral of c*(1+|x|+y)^(-kappa) dy over [lo, hi]; for kappa = 2 and
    [0, 1] this is c*((1+|x|)^(-1) - (2+|x|)^(-1)).
    """
    if not (0 <= lo <= hi):
        raise DomainError("indicator endpoints must satisfy 0 <= lo <= hi")
    base = 1.0 + abs(x)
    if kappa == 1.0:
        return c_upper * math.log((base + hi) / (base + lo))
    return c_upper * ((base + lo) ** (1.0 - kappa) - (base + hi) ** (1.0 - kappa)) / (kappa - 1.0)
