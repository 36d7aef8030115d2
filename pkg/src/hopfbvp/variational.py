"""One-sided energy minimizers, gluing, and the derivative jump at the junction.

For a junction angle s in (0, pi/2) the energy

    J(alpha) = integral (alpha'^2 + Q sin^2(alpha)) f dt

is minimized separately over (0, s] and [s, pi/2) subject to alpha(s) = pi/2,
with natural (free) boundary values at the near-singular ends.  The two
minimizers glue to a continuous curve alpha_s that solves the equation away
from s but whose slope may jump there; the jump

    l(s) = alpha_s'(s+0) - alpha_s'(s-0)

is the object scanned and driven to zero by the analysis layer.  An exact
integral identity provides an independent route to the same quantity:

    f(s)^2 * (alpha_s'(s+0)^2 - alpha_s'(s-0)^2)
        = integral_0^{pi/2} (f^2 Q)' sin^2(alpha_s) dt  =:  I_s,

so l = I_s / (f(s)^2 * (d_plus + d_minus)), and sign(l) = sign(I_s).

Discretization: piecewise-linear elements on a graded grid with 4-point
Gauss-Legendre quadrature per element (the discrete energy is then exact to
quadrature precision for profiles linear in t).  Minimization: damped Newton
on the tridiagonal system with a monotone line search and a Levenberg shift
fallback.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import LinAlgError, solveh_banded

from .core import (
    HALF_PI,
    ConstraintViolation,
    ConvergenceError,
    Grid,
    HopfParams,
    Profile,
    fd3_first_weights,
    graded_grid,
)
from .ode import coeff_Q, weight_f

__all__ = [
    "FunctionalSpec",
    "GluedSolution",
    "MinimizeResult",
    "DiscreteEnergy",
    "interior_grid",
    "exterior_grid",
    "eval_functional",
    "minimize_interior",
    "minimize_exterior",
    "glue",
    "jump_via_integral",
]

DEFAULT_N = 2000
DEFAULT_GRADING = 2.0
# distance of the free end nodes from the singular endpoints; the natural
# boundary there perturbs the solution by ~ c * offset**min(r0, r1), which
# must stay below the exact-recovery tolerances
DEFAULT_OFFSET = 1e-7
DEFAULT_GTOL = 1e-10
# gradient level still accepted when rounding stalls the line search
STALL_GTOL = 1e-8
DEFAULT_MAX_ITER = 200
ATTACH_TOL = 1e-2

_GL_X, _GL_W = np.polynomial.legendre.leggauss(4)
_GL_X01 = 0.5 * (_GL_X + 1.0)
_GL_W01 = 0.5 * _GL_W


def interior_grid(
    s: float,
    n: int = DEFAULT_N,
    grading: float = DEFAULT_GRADING,
    offset: float = DEFAULT_OFFSET,
) -> Grid:
    """Graded grid on [offset, s] with the junction as its last node."""
    if not (0.0 < offset < s < HALF_PI):
        raise ValueError(f"need 0 < offset < s < pi/2, got offset={offset}, s={s}")
    return Grid(graded_grid(offset, s, n, grading), grading, junction_index=n - 1)


def exterior_grid(
    s: float,
    n: int = DEFAULT_N,
    grading: float = DEFAULT_GRADING,
    offset: float = DEFAULT_OFFSET,
) -> Grid:
    """Graded grid on [s, pi/2 - offset] with the junction as its first node."""
    if not (0.0 < s < HALF_PI - offset):
        raise ValueError(f"need 0 < s < pi/2 - offset, got s={s}, offset={offset}")
    return Grid(graded_grid(s, HALF_PI - offset, n, grading), grading, junction_index=0)


@dataclass(frozen=True)
class FunctionalSpec:
    """One side of the split energy: which interval, junction angle, grid, data."""

    side: str  # "interior" or "exterior"
    s: float
    grid: Grid
    params: HopfParams

    def __post_init__(self) -> None:
        if self.side not in ("interior", "exterior"):
            raise ValueError(f"side must be 'interior' or 'exterior', got {self.side!r}")
        nodes = self.grid.nodes
        pin = nodes[-1] if self.side == "interior" else nodes[0]
        if abs(pin - self.s) > 1e-12 * (1.0 + abs(self.s)):
            raise ValueError(
                f"{self.side} grid must terminate at the junction s={self.s}, "
                f"found {pin}"
            )

    @property
    def junction_index(self) -> int:
        return self.grid.n - 1 if self.side == "interior" else 0


class DiscreteEnergy:
    """Piecewise-linear discretization of J on a fixed grid with one pinned node.

    Geometry-dependent factors (element quadrature points, f and Q there) are
    precomputed; energy/gradient/Hessian evaluations per iterate only touch
    trigonometric functions of the current values.
    """

    def __init__(self, grid: Grid, params: HopfParams, pinned_index: int,
                 pinned_value: float = HALF_PI):
        t = grid.nodes
        n = t.size
        if pinned_index not in (0, n - 1):
            raise ValueError("pinned node must be the first or last grid node")
        self.grid = grid
        self.t = t
        self.n = n
        self.h = np.diff(t)
        x = t[:-1, None] + np.outer(self.h, _GL_X01)  # (n_el, 4) quadrature points
        self.fw = weight_f(x, params) * (self.h[:, None] * _GL_W01)
        self.q = coeff_Q(x, params)
        self.qfw = self.q * self.fw
        self.f_el = self.fw.sum(axis=1)  # integral of f over each element
        self.pinned_index = pinned_index
        self.pinned_value = pinned_value
        # the pinned node is always an endpoint, so the free unknowns stay
        # contiguous and the reduced Hessian stays tridiagonal
        self.free = slice(0, n - 1) if pinned_index == n - 1 else slice(1, n)

    def _element_angles(self, v: np.ndarray) -> np.ndarray:
        return v[:-1, None] * (1.0 - _GL_X01) + v[1:, None] * _GL_X01

    def energy(self, v: np.ndarray) -> float:
        slope = np.diff(v) / self.h
        ag = self._element_angles(v)
        grad_term = float(np.dot(self.f_el, slope**2))
        pot_term = float(np.sum(self.qfw * np.sin(ag) ** 2))
        return grad_term + pot_term

    def gradient(self, v: np.ndarray) -> np.ndarray:
        """Full-length gradient of the discrete energy (pinned entry zeroed)."""
        slope = np.diff(v) / self.h
        ag = self._element_angles(v)
        pot = self.qfw * np.sin(2.0 * ag)  # (n_el, 4)
        gd = 2.0 * self.f_el * slope / self.h
        g = np.zeros(self.n)
        g[:-1] += -gd + pot @ (1.0 - _GL_X01)
        g[1:] += gd + pot @ _GL_X01
        g[self.pinned_index] = 0.0
        return g

    def _hessian_parts(self, v: np.ndarray):
        ag = self._element_angles(v)
        curv = 2.0 * self.qfw * np.cos(2.0 * ag)
        stiff = 2.0 * self.f_el / self.h**2
        d00 = stiff + curv @ (1.0 - _GL_X01) ** 2
        d11 = stiff + curv @ _GL_X01**2
        d01 = -stiff + curv @ (_GL_X01 * (1.0 - _GL_X01))
        diag = np.zeros(self.n)
        diag[:-1] += d00
        diag[1:] += d11
        return diag, d01  # d01[i] couples nodes i and i+1

    def newton_direction(self, v: np.ndarray, g: np.ndarray, shift: float) -> np.ndarray:
        """Solve (H + shift*diag(|H_ii|+1)) d = -g on the free nodes."""
        diag, off = self._hessian_parts(v)
        sl = self.free
        dr = diag[sl].copy()
        if shift > 0.0:
            dr += shift * (np.abs(dr) + 1.0)
        offr = off[sl][:-1] if sl.start == 0 else off[sl.start :]
        m = dr.size
        ab = np.zeros((2, m))
        ab[1] = dr
        ab[0, 1:] = offr
        sol = solveh_banded(ab, -g[sl], lower=False)
        d = np.zeros(self.n)
        d[sl] = sol
        return d


@dataclass
class MinimizeResult:
    """Outcome of one side's energy minimization."""

    profile: Profile
    energy: float
    grad_norm: float
    iterations: int
    converged: bool
    energy_history: np.ndarray
    attached: bool = True
    side: str = ""


def _minimize(disc: DiscreteEnergy, v0: np.ndarray, gtol: float,
              max_iter: int) -> tuple[np.ndarray, float, float, int, bool, np.ndarray]:
    v = np.asarray(v0, dtype=float).copy()
    v[disc.pinned_index] = disc.pinned_value
    e = disc.energy(v)
    history = [e]
    gnorm = math.inf
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        g = disc.gradient(v)
        gnorm = float(np.max(np.abs(g[disc.free]), initial=0.0))
        scale = 1.0 + abs(e)
        if gnorm <= gtol * scale:
            converged = True
            break
        stepped = False
        at_floor = False
        shift = 0.0
        for _ in range(30):
            try:
                d = disc.newton_direction(v, g, shift)
            except LinAlgError:
                shift = max(10.0 * shift, 1e-10)
                continue
            descent = float(np.dot(d[disc.free], g[disc.free]))
            if not np.all(np.isfinite(d)) or descent >= 0.0:
                shift = max(10.0 * shift, 1e-10)
                continue
            if shift == 0.0 and float(np.max(np.abs(d))) <= 1e-15 * (
                1.0 + float(np.max(np.abs(v)))
            ):
                # the Newton step is below the value resolution: the iterate
                # already represents the discrete minimizer to machine precision
                at_floor = True
                break
            step = 1.0
            for _ in range(60):
                vt = v + step * d
                et = disc.energy(vt)
                if np.isfinite(et) and et <= e:
                    v, e = vt, et
                    stepped = True
                    break
                step *= 0.5
            if stepped:
                break
            shift = max(10.0 * shift, 1e-10)
        if at_floor:
            converged = gnorm <= STALL_GTOL * scale
            break
        if not stepped:
            # last resort: steepest descent with backtracking
            d = -g
            step = 1.0 / (1.0 + gnorm)
            for _ in range(60):
                vt = v + step * d
                et = disc.energy(vt)
                if np.isfinite(et) and et < e:
                    v, e = vt, et
                    stepped = True
                    break
                step *= 0.5
        if not stepped:
            # no decrease representable: at the numerical floor of the energy
            converged = gnorm <= STALL_GTOL * scale
            break
        history.append(e)
    if not converged:
        gnorm = float(np.max(np.abs(disc.gradient(v)[disc.free]), initial=0.0))
        converged = gnorm <= gtol * (1.0 + abs(e))
    return v, e, gnorm, it, converged, np.asarray(history)


def minimize_interior(
    s: float,
    params: HopfParams,
    grid: Optional[Grid] = None,
    n: int = DEFAULT_N,
    grading: float = DEFAULT_GRADING,
    offset: float = DEFAULT_OFFSET,
    gtol: float = DEFAULT_GTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MinimizeResult:
    """Minimize the energy over (0, s] with alpha(s) = pi/2 pinned.

    The value at the innermost node is free (natural boundary); for p = 1 the
    minimizer attaches to 0 there on its own, since the constant pi/2 has
    divergent energy.  Raises :class:`ConvergenceError` if the gradient
    tolerance is not met.
    """
    if grid is None:
        grid = interior_grid(s, n, grading, offset)
    t = grid.nodes
    if abs(t[-1] - s) > 1e-12 * (1.0 + s):
        raise ValueError("interior grid must end exactly at the junction")
    v0 = HALF_PI * np.minimum(1.0, (t / s) ** params.r0)
    disc = DiscreteEnergy(grid, params, pinned_index=t.size - 1)
    v, e, gnorm, it, ok, hist = _minimize(disc, v0, gtol, max_iter)
    if not ok:
        raise ConvergenceError(
            f"interior minimization at s={s} stalled after {it} iterations "
            f"with gradient norm {gnorm:.3e}",
            grad_norm=gnorm,
        )
    return MinimizeResult(
        profile=Profile(grid, v),
        energy=e,
        grad_norm=gnorm,
        iterations=it,
        converged=ok,
        energy_history=hist,
        attached=bool(v[0] <= ATTACH_TOL),
        side="interior",
    )


def minimize_exterior(
    s: float,
    params: HopfParams,
    grid: Optional[Grid] = None,
    n: int = DEFAULT_N,
    grading: float = DEFAULT_GRADING,
    offset: float = DEFAULT_OFFSET,
    gtol: float = DEFAULT_GTOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> MinimizeResult:
    """Minimize the energy over [s, pi/2) with alpha(s) = pi/2 pinned.

    For small s the minimizer attaches to pi at the outer end; for larger s it
    may not, which is reported through ``attached=False`` rather than an error.
    """
    if grid is None:
        grid = exterior_grid(s, n, grading, offset)
    t = grid.nodes
    if abs(t[0] - s) > 1e-12 * (1.0 + s):
        raise ValueError("exterior grid must start exactly at the junction")
    v0 = np.clip(
        math.pi - HALF_PI * ((HALF_PI - t) / (HALF_PI - s)) ** params.r1,
        HALF_PI,
        math.pi,
    )
    disc = DiscreteEnergy(grid, params, pinned_index=0)
    v, e, gnorm, it, ok, hist = _minimize(disc, v0, gtol, max_iter)
    if not ok:
        raise ConvergenceError(
            f"exterior minimization at s={s} stalled after {it} iterations "
            f"with gradient norm {gnorm:.3e}",
            grad_norm=gnorm,
        )
    return MinimizeResult(
        profile=Profile(grid, v),
        energy=e,
        grad_norm=gnorm,
        iterations=it,
        converged=ok,
        energy_history=hist,
        attached=bool(v[-1] >= math.pi - ATTACH_TOL),
        side="exterior",
    )


def eval_functional(spec: FunctionalSpec, profile: Profile) -> float:
    """Value of the split energy for a profile on the spec's grid.

    Raises :class:`ConstraintViolation` unless the junction value is pi/2.
    """
    if profile.grid.n != spec.grid.n or not np.array_equal(
        profile.t, spec.grid.nodes
    ):
        raise ValueError("profile is not defined on the spec's grid")
    j = spec.junction_index
    if abs(profile.values[j] - HALF_PI) > 1e-9:
        raise ConstraintViolation(
            f"profile({spec.s}) = {profile.values[j]} != pi/2"
        )
    disc = DiscreteEnergy(spec.grid, spec.params, pinned_index=j)
    return disc.energy(profile.values)


@dataclass
class GluedSolution:
    """Two one-sided minimizers joined at s, with jump and integral data."""

    s: float
    beta: Profile
    beta_star: Profile
    l: float
    l_tilde: float
    d_minus: float
    d_plus: float
    J_interior: float
    J_exterior: float
    I_s: float
    I_s1: float
    I_s2: float
    converged_interior: bool = True
    converged_exterior: bool = True
    attached_zero: bool = True
    attached_pi: bool = True
    # observed node-to-node monotonicity of the converged minimizers; nothing
    # downstream assumes it, a False here flags an unexpected solution shape
    monotone_interior: bool = True
    monotone_exterior: bool = True
    _merged: Optional[Profile] = field(default=None, repr=False)

    def merged_profile(self) -> Profile:
        if self._merged is None:
            t = np.concatenate([self.beta.t, self.beta_star.t[1:]])
            v = np.concatenate([self.beta.values, self.beta_star.values[1:]])
            grid = Grid(
                t,
                self.beta.grid.grading_exponent,
                junction_index=self.beta.grid.n - 1,
            )
            self._merged = Profile(grid, v, d_left=self.d_minus, d_right=self.d_plus)
        return self._merged

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "l": self.l,
            "l_tilde": self.l_tilde,
            "d_minus": self.d_minus,
            "d_plus": self.d_plus,
            "I_s": self.I_s,
            "I_s1": self.I_s1,
            "I_s2": self.I_s2,
            "J_interior": self.J_interior,
            "J_exterior": self.J_exterior,
            "converged_interior": self.converged_interior,
            "converged_exterior": self.converged_exterior,
            "attached_zero": self.attached_zero,
            "attached_pi": self.attached_pi,
            "monotone_interior": self.monotone_interior,
            "monotone_exterior": self.monotone_exterior,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _one_sided_slope(t: np.ndarray, v: np.ndarray, x: float) -> float:
    """Second-order slope at x from the three nodes (t, v) nearest it."""
    w0, w1, w2 = fd3_first_weights(t[0], t[1], t[2], x)
    return float(w0 * v[0] + w1 * v[1] + w2 * v[2])


def jump_integrals(
    t: np.ndarray, alpha: np.ndarray, params: HopfParams
) -> tuple[float, float, float]:
    """(I_s, I_s1, I_s2): quadratures of (f^2 Q)' sin^2(alpha) and its two parts.

    I_s1 integrates sin(t) cos(t)^(2q-1) sin^2(alpha); I_s2 integrates
    sin(t)^3 cos(t)^(2q-3) sin^2(alpha).  For p = 1 the exact expansion
    (f^2 Q)' = 2(mu - lam*q) * g1 - 2*mu*(q-1) * g2 makes
    I_s = 2(mu - lam*q) I_s1 - 2 mu (q-1) I_s2 hold to rounding, since all
    three are computed by the same (linear) composite Simpson rule.

    The integrands vanish at both endpoints, so the grid is extended by the
    exact limits alpha(0) = 0, alpha(pi/2) = pi before integrating.
    """
    q = params.q
    ts = np.concatenate(([0.0], t, [HALF_PI]))
    av = np.concatenate(([0.0], alpha, [math.pi]))
    sn, cs = np.sin(ts), np.cos(ts)
    s2a = np.sin(av) ** 2
    g1 = sn * cs ** (2 * q - 1) * s2a
    g2 = sn**3 * cs ** (2 * q - 3) * s2a
    i1 = float(simpson(g1, x=ts))
    i2 = float(simpson(g2, x=ts))
    if params.p == 1:
        i_s = 2.0 * (params.mu - params.lam * q) * i1 - 2.0 * params.mu * (q - 1) * i2
    else:
        # general (f^2 Q)' has four monomial terms; include only those with a
        # nonzero coefficient so 0 * sin^negative never produces NaN at t = 0
        p = params.p
        terms = [
            (2.0 * (p - 1) * params.lam, 2 * p - 3, 2 * q + 1),
            (2.0 * (params.mu * p - params.lam * q), 2 * p - 1, 2 * q - 1),
            (-2.0 * params.mu * (q - 1), 2 * p + 1, 2 * q - 3),
        ]
        g = np.zeros_like(ts)
        for coef, sp, cp in terms:
            if coef != 0.0:
                g += coef * sn**sp * cs**cp
        i_s = float(simpson(g * s2a, x=ts))
    return i_s, i1, i2


def glue(
    s: float,
    params: HopfParams,
    n: int = DEFAULT_N,
    grading: float = DEFAULT_GRADING,
    offset: float = DEFAULT_OFFSET,
    gtol: float = DEFAULT_GTOL,
    max_iter: int = DEFAULT_MAX_ITER,
    grids: Optional[tuple[Grid, Grid]] = None,
) -> GluedSolution:
    """Solve both sides at junction s and assemble the glued curve.

    Minimizer failures propagate as :class:`ConvergenceError`.
    """
    gi, ge = grids if grids is not None else (
        interior_grid(s, n, grading, offset),
        exterior_grid(s, n, grading, offset),
    )
    res_i = minimize_interior(s, params, grid=gi, gtol=gtol, max_iter=max_iter)
    res_e = minimize_exterior(s, params, grid=ge, gtol=gtol, max_iter=max_iter)
    ti, vi = res_i.profile.t, res_i.profile.values
    te, ve = res_e.profile.t, res_e.profile.values
    d_minus = _one_sided_slope(ti[-3:], vi[-3:], s)
    d_plus = _one_sided_slope(te[:3], ve[:3], s)
    t_union = np.concatenate([ti, te[1:]])
    a_union = np.concatenate([vi, ve[1:]])
    i_s, i1, i2 = jump_integrals(t_union, a_union, params)
    l = d_plus - d_minus
    denom = weight_f(s, params) ** 2 * (d_plus + d_minus)
    l_tilde = i_s / denom if abs(denom) > 1e-300 else math.nan
    return GluedSolution(
        s=s,
        beta=res_i.profile,
        beta_star=res_e.profile,
        l=l,
        l_tilde=l_tilde,
        d_minus=d_minus,
        d_plus=d_plus,
        J_interior=res_i.energy,
        J_exterior=res_e.energy,
        I_s=i_s,
        I_s1=i1,
        I_s2=i2,
        converged_interior=res_i.converged,
        converged_exterior=res_e.converged,
        attached_zero=res_i.attached,
        attached_pi=res_e.attached,
        monotone_interior=bool(np.all(np.diff(vi) >= -1e-12)),
        monotone_exterior=bool(np.all(np.diff(ve) >= -1e-12)),
    )


def jump_via_integral(glued: GluedSolution, params: HopfParams) -> float:
    """Cross-check value of the jump from the integral identity.

    l_tilde = I_s / (f(s)^2 * (d_plus + d_minus)); the square on f(s) comes
    from multiplying the conservation form by f*alpha' and integrating by
    parts on each side of the junction.
    """
    denom_slopes = glued.d_plus + glued.d_minus
    if abs(denom_slopes) < 1e-12:
        raise ValueError(
            "degenerate junction: one-sided slopes sum to (nearly) zero"
        )
    return glued.I_s / (weight_f(glued.s, params) ** 2 * denom_slopes)
