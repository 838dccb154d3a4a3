"""The quartic double-well potential and its one-dimensional optimal profile.

All functions accept scalars or numpy arrays and are stateless, so they
are safe to call concurrently.
"""

import math
from dataclasses import dataclass

import numpy as np

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class WellParams:
    """Marker for the standard quartic well (1 - r^2)^2 / 4.

    Carries no data today; it exists so a second well shape can be added
    without changing call signatures downstream.
    """


def _checked(r):
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("potential argument must be finite")
    return arr


def well_value(r):
    """Energy density W(r) = (1 - r^2)^2 / 4."""
    arr = _checked(r)
    out = 0.25 * (1.0 - arr**2) ** 2
    return out if arr.ndim else float(out)


def well_derivative(r):
    """W'(r) = r^3 - r."""
    arr = _checked(r)
    out = arr**3 - arr
    return out if arr.ndim else float(out)


def well_second_derivative(r):
    """W''(r) = 3 r^2 - 1."""
    arr = _checked(r)
    out = 3.0 * arr**2 - 1.0
    return out if arr.ndim else float(out)


def surface_tension():
    """The interface energy constant: the integral of sqrt(2 W) over [-1, 1].

    For the quartic well the integrand is (1 - s^2)/sqrt(2), giving the
    closed form 2*sqrt(2)/3.
    """
    return 2.0 * _SQRT2 / 3.0


#: Single source of truth for the surface-tension constant.
SURFACE_TENSION = surface_tension()


def well_primitive(r):
    """G(r), the antiderivative of sqrt(2 W) with G(0) = 0.

    sqrt(2 W(s)) = |1 - s^2| / sqrt(2), so G is odd and monotone on the
    whole line:

        G(r) = (r - r^3/3) / sqrt(2)                       for |r| <= 1,
        G(r) = G(sign(r)) + (|r|^3/3 - |r| + 2/3)/sqrt(2)  outside.

    Keeping the |.| in the integrand (rather than extending the inner
    polynomial) keeps G monotone when fields overshoot the wells.
    """
    arr = _checked(r)
    a = np.abs(arr)
    inner = (a - a**3 / 3.0) / _SQRT2
    outer = (2.0 / 3.0 + a**3 / 3.0 - a) / _SQRT2 + 2.0 / (3.0 * _SQRT2)
    out = np.sign(arr) * np.where(a <= 1.0, inner, outer)
    return out if arr.ndim else float(out)


def optimal_profile(s):
    """The planar transition profile q(s) = tanh(s / sqrt(2)).

    Solves q'' = W'(q) with q(+-inf) = +-1 and equipartitioned energy
    (1/2) q'^2 = W(q).
    """
    arr = _checked(s)
    out = np.tanh(arr / _SQRT2)
    return out if arr.ndim else float(out)


def optimal_profile_curvature(s):
    """q''(s) = -q (1 - q^2), the closed form of the profile's second derivative."""
    q = optimal_profile(np.asarray(s, dtype=float))
    out = -q * (1.0 - q**2)
    return out if np.ndim(s) else float(out)
