"""Coefficient functions and finite-difference residual evaluators.

Four forms of the governing equation are supported:

* original:  alpha'' + (p*cot t - q*tan t) alpha' - Q sin(alpha) cos(alpha) = 0
* flux:      (f alpha')' - f Q sin(alpha) cos(alpha) = 0,  f = sin^p t cos^q t
* rescaled:  gamma(t) = alpha(s t), the same equation in the stretched variable
* limit:     phi'' + phi'/t - (lambda/t^2) sin(phi) cos(phi) = 0 on (0, inf)

plus the comparison equation
  psi'' + cot(t) psi' - lambda sin(psi) cos(psi) / (sin^2 t cos^2 t) = 0,
whose explicit solutions serve as supersolutions above the threshold angle.

All evaluators use 3-point stencils on arbitrary strictly increasing grids and
return NaN at the two boundary nodes (no full stencil) and at a junction node
whose one-sided derivatives differ (the curve has a corner there, so the
two-sided stencil does not apply).
"""

from __future__ import annotations

import numpy as np

from .core import (
    HALF_PI,
    DomainError,
    HopfParams,
    Profile,
    fd3_first_weights,
    fd3_second_weights,
    nodal_first_derivative,
)

__all__ = [
    "coeff_Q",
    "weight_f",
    "drift_coeff",
    "residual",
    "flux_residual",
    "limit_residual",
    "comparison_residual",
    "rescaled_residual",
    "write_profile_csv",
    "read_profile_csv",
]


def _maybe_scalar(out, like):
    return float(out) if np.ndim(like) == 0 else out


def coeff_Q(t, params: HopfParams):
    """Potential coefficient ``Q(t) = lambda/sin^2(t) + mu/cos^2(t)``.

    Defined (and positive) on the open interval (0, pi/2) only.
    """
    ta = np.asarray(t, dtype=float)
    if np.any(ta <= 0.0) or np.any(ta >= HALF_PI):
        raise DomainError("coeff_Q requires t in the open interval (0, pi/2)")
    out = params.lam / np.sin(ta) ** 2 + params.mu / np.cos(ta) ** 2
    return _maybe_scalar(out, t)


def weight_f(t, params: HopfParams):
    """Reduction weight ``f(t) = sin^p(t) * cos^q(t)``.

    Total on [0, pi/2]: zero at both endpoints, positive inside.
    """
    ta = np.asarray(t, dtype=float)
    out = np.sin(ta) ** params.p * np.cos(ta) ** params.q
    return _maybe_scalar(out, t)


def drift_coeff(t, params: HopfParams):
    """First-order coefficient ``p*cot(t) - q*tan(t)``."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta <= 0.0) or np.any(ta >= HALF_PI):
        raise DomainError("drift_coeff requires t in (0, pi/2)")
    out = params.p * np.cos(ta) / np.sin(ta) - params.q * np.tan(ta)
    return _maybe_scalar(out, t)


def _stencil_derivatives(t: np.ndarray, y: np.ndarray):
    """(d1, d2) at interior nodes t[1:-1] via 3-point nonuniform stencils."""
    tm, t0, tp = t[:-2], t[1:-1], t[2:]
    ym, y0, yp = y[:-2], y[1:-1], y[2:]
    w0, w1, w2 = fd3_first_weights(tm, t0, tp, t0)
    d1 = w0 * ym + w1 * y0 + w2 * yp
    v0, v1, v2 = fd3_second_weights(tm, t0, tp)
    d2 = v0 * ym + v1 * y0 + v2 * yp
    return d1, d2


def _mask_junction(res: np.ndarray, profile: Profile) -> np.ndarray:
    res[0] = np.nan
    res[-1] = np.nan
    j = profile.grid.junction_index
    if j is not None and profile.has_kink():
        res[j] = np.nan
    return res


def residual(profile: Profile, params: HopfParams) -> np.ndarray:
    """Pointwise residual of the original equation at interior grid nodes."""
    t, y = profile.t, profile.values
    if t.size < 3:
        raise ValueError("residual needs at least 3 nodes")
    if t[0] <= 0.0 or t[-1] >= HALF_PI:
        raise DomainError("profile nodes must lie in (0, pi/2)")
    d1, d2 = _stencil_derivatives(t, y)
    t0 = t[1:-1]
    res = np.empty_like(y)
    res[1:-1] = (
        d2
        + drift_coeff(t0, params) * d1
        - coeff_Q(t0, params) * np.sin(y[1:-1]) * np.cos(y[1:-1])
    )
    return _mask_junction(res, profile)


def flux_residual(profile: Profile, params: HopfParams) -> np.ndarray:
    """Residual of the conservation form ``(f alpha')' - f Q sin cos``.

    The product f*alpha' is formed from nodal finite-difference slopes and
    differentiated again, so this is a genuinely different discretization from
    ``weight_f * residual``; the two agree up to O(h^2).
    """
    t, y = profile.t, profile.values
    if t.size < 3:
        raise ValueError("flux_residual needs at least 3 nodes")
    if t[0] <= 0.0 or t[-1] >= HALF_PI:
        raise DomainError("profile nodes must lie in (0, pi/2)")
    w = weight_f(t, params) * nodal_first_derivative(t, y)
    dflux, _ = _stencil_derivatives(t, w)
    t0 = t[1:-1]
    res = np.empty_like(y)
    res[1:-1] = dflux - weight_f(t0, params) * coeff_Q(t0, params) * np.sin(
        y[1:-1]
    ) * np.cos(y[1:-1])
    return _mask_junction(res, profile)


def limit_residual(profile: Profile, lam: float) -> np.ndarray:
    """Residual of the small-t limit equation on a positive radial grid."""
    t, y = profile.t, profile.values
    if t.size < 3:
        raise ValueError("limit_residual needs at least 3 nodes")
    if t[0] <= 0.0:
        raise DomainError("limit grid nodes must be positive")
    d1, d2 = _stencil_derivatives(t, y)
    t0 = t[1:-1]
    res = np.empty_like(y)
    res[1:-1] = d2 + d1 / t0 - (lam / t0**2) * np.sin(y[1:-1]) * np.cos(y[1:-1])
    return _mask_junction(res, profile)


def comparison_residual(profile: Profile, lam: float) -> np.ndarray:
    """Residual of the comparison equation on (0, pi/2).

    The equation is ``psi'' + (cot t - tan t) psi' - lam sin(psi) cos(psi) /
    (sin^2 t cos^2 t) = 0``: in x = log(tan t) it is the autonomous pendulum
    ``psi_xx = lam sin(psi) cos(psi)``, whose heteroclinic orbits are the
    closed-form comparison family.  (With a bare ``cot t`` drift the family's
    slope identity psi' = sqrt(lam) sin(psi)/(sin t cos t) would leave a
    nonvanishing defect sqrt(lam) sin(psi)/cos^2 t.)
    """
    t, y = profile.t, profile.values
    if t.size < 3:
        raise ValueError("comparison_residual needs at least 3 nodes")
    if t[0] <= 0.0 or t[-1] >= HALF_PI:
        raise DomainError("profile nodes must lie in (0, pi/2)")
    d1, d2 = _stencil_derivatives(t, y)
    t0 = t[1:-1]
    sc = np.sin(t0) * np.cos(t0)
    res = np.empty_like(y)
    res[1:-1] = (
        d2
        + (np.cos(t0) / np.sin(t0) - np.tan(t0)) * d1
        - (lam / sc**2) * np.sin(y[1:-1]) * np.cos(y[1:-1])
    )
    return _mask_junction(res, profile)


def rescaled_residual(profile: Profile, s: float, params: HopfParams) -> np.ndarray:
    """Residual of the stretched equation for ``gamma(t) = alpha(s*t)``.

    The grid carries the stretched variable; every s*t must lie in (0, pi/2).
    """
    t, y = profile.t, profile.values
    if t.size < 3:
        raise ValueError("rescaled_residual needs at least 3 nodes")
    st = s * t
    if st[0] <= 0.0 or st[-1] >= HALF_PI:
        raise DomainError("rescaled nodes s*t must lie in (0, pi/2)")
    d1, d2 = _stencil_derivatives(t, y)
    st0 = st[1:-1]
    drift = s * (params.p * np.cos(st0) / np.sin(st0) - params.q * np.tan(st0))
    res = np.empty_like(y)
    res[1:-1] = (
        d2
        + drift * d1
        - s**2 * coeff_Q(st0, params) * np.sin(y[1:-1]) * np.cos(y[1:-1])
    )
    return _mask_junction(res, profile)


# --- profile serialization ----------------------------------------------------

_CSV_HEADER = "t,alpha,dalpha,residual"


def write_profile_csv(profile: Profile, params: HopfParams, path) -> None:
    """Write ``t,alpha,dalpha,residual`` rows with 17 significant digits.

    At a junction node with distinct one-sided slopes, dalpha records their
    mean and the residual column is NaN.  The residual column is also NaN
    where an adjacent grid spacing is below 1e-5: there the 3-point stencil
    amplifies value rounding (eps/h^2) past any meaningful residual level.
    """
    d = profile.derivative()
    j = profile.grid.junction_index
    if j is not None and profile.d_left is not None and profile.d_right is not None:
        d[j] = 0.5 * (profile.d_left + profile.d_right)
    res = residual(profile, params)
    h = np.diff(profile.t)
    noisy = np.zeros(profile.t.size, dtype=bool)
    noisy[1:-1] = np.minimum(h[:-1], h[1:]) < 1e-5
    res[noisy] = np.nan
    lines = [_CSV_HEADER]
    for ti, ai, di, ri in zip(profile.t, profile.values, d, res):
        lines.append(f"{ti:.17g},{ai:.17g},{di:.17g},{ri:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_profile_csv(path) -> Profile:
    """Read a profile written by :func:`write_profile_csv` (t, alpha columns)."""
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ValueError(f"{path} is not a profile CSV")
    from .core import Grid

    return Profile(Grid(data[:, 0]), data[:, 1])
