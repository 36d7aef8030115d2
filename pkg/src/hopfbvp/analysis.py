"""Jump-function scans, root finding, asymptotic trend checks, solvability maps.

The glued curve alpha_s solves the full boundary problem exactly when its
derivative jump l(s) vanishes.  This module scans l over geometrically spaced
junction values, extracts sign-change brackets, bisects them to a root, and
turns the asymptotic statements about the small-s regime (convergence of the
stretched profiles to the limit profile, growth of s^-2 I_s^1, smallness of
I_s^2 relative to I_s^1, the comparison-family ordering) into finite
numerical trend checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import simpson

from .closed_forms import phi_limit, psi_comparison, theta_threshold
from .core import HALF_PI, ConvergenceError, HopfParams
from .ode import residual
from .variational import GluedSolution, glue

__all__ = [
    "ScanRow",
    "ScanResult",
    "SolveOutcome",
    "SolvabilityCell",
    "Is2Report",
    "ComparisonReport",
    "JunctionAsymptoticsReport",
    "scan_jump",
    "find_solution",
    "blowup_compare",
    "estimate_Is1_trend",
    "estimate_Is2",
    "comparison_check",
    "auto_comparison_config",
    "junction_asymptotics_check",
    "solvability_map",
    "write_scan_csv",
    "write_map_csv",
]

ROOT_TOL = 1e-6
RESIDUAL_MARGIN = 0.05  # "away from endpoints" band for residual certification


@dataclass
class ScanRow:
    s: float
    l: float
    l_tilde: float
    I_s: float
    I_s1: float
    I_s2: float
    converged: bool
    J_interior: float = math.nan
    J_exterior: float = math.nan


@dataclass
class ScanResult:
    """Table of jump values over junction angles plus sign-change brackets."""

    params: HopfParams
    rows: list[ScanRow]
    brackets: list[tuple[float, float]] = field(default_factory=list)
    s_star: Optional[float] = None

    def sign_changes(self) -> list[tuple[float, float]]:
        out = []
        good = [r for r in self.rows if r.converged and np.isfinite(r.l)]
        for lo, hi in zip(good[:-1], good[1:]):
            if lo.l * hi.l < 0.0:
                out.append((lo.s, hi.s))
        return out


@dataclass
class SolveOutcome:
    """Result of the scan-bracket-bisect pipeline for one parameter set."""

    verdict: str  # "solution_found", "no_sign_change", or "failed"
    s_star: Optional[float]
    glued: Optional[GluedSolution]
    scan: ScanResult
    max_residual_away: float = math.nan
    boundary_error_zero: float = math.nan
    boundary_error_pi: float = math.nan
    message: str = ""


@dataclass
class SolvabilityCell:
    lam: float
    mu: float
    verdict: str  # "solution_found", "no_sign_change", "inconclusive"
    s_star: Optional[float] = None


def _glue_row(s: float, params: HopfParams, opts: dict) -> ScanRow:
    try:
        g = glue(s, params, **opts)
        return ScanRow(
            s=s,
            l=g.l,
            l_tilde=g.l_tilde,
            I_s=g.I_s,
            I_s1=g.I_s1,
            I_s2=g.I_s2,
            converged=g.converged_interior and g.converged_exterior,
            J_interior=g.J_interior,
            J_exterior=g.J_exterior,
        )
    except ConvergenceError:
        return ScanRow(
            s=s,
            l=math.nan,
            l_tilde=math.nan,
            I_s=math.nan,
            I_s1=math.nan,
            I_s2=math.nan,
            converged=False,
        )


def _glue_row_star(args) -> ScanRow:
    return _glue_row(*args)


def scan_jump(
    params: HopfParams,
    s_min: float,
    s_max: float,
    n: int,
    grid_n: int = 2000,
    jobs: int = 1,
    **glue_opts,
) -> ScanResult:
    """Glued solves at n geometrically spaced junctions; brackets extracted.

    Per-row convergence failures are recorded in the table, not raised.
    """
    if not (0.0 < s_min < s_max < HALF_PI):
        raise ValueError("need 0 < s_min < s_max < pi/2")
    if n < 2:
        raise ValueError("need at least 2 scan points")
    opts = dict(glue_opts)
    opts.setdefault("n", grid_n)
    svals = np.geomspace(s_min, s_max, n)
    tasks = [(float(s), params, opts) for s in svals]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_glue_row_star, tasks))
    else:
        rows = [_glue_row_star(t) for t in tasks]
    result = ScanResult(params=params, rows=rows)
    result.brackets = result.sign_changes()
    return result


def _certify(
    glued: GluedSolution,
    params: HopfParams,
    margin: float = RESIDUAL_MARGIN,
    n_cert: int = 700,
    h_floor: float = 1e-5,
) -> tuple[float, float, float]:
    """Max equation residual away from the endpoints, plus boundary errors.

    The residual is evaluated on a strided subset of the union nodes (about
    n_cert per side), keeping the exact solver values but widening the
    stencils: the finest graded spacings (~1e-7 at the junction) would
    otherwise amplify value rounding by 1/h^2 and swamp the true residual.
    The junction node is kept and marked so its kinked stencil is skipped.
    """
    from .core import Grid, Profile

    prof = glued.merged_profile()
    t, v = prof.t, prof.values
    j = prof.grid.junction_index
    # stride each side separately so the thinned spacing varies as smoothly as
    # the grading itself (mixing the sides' nodes would alternate gap sizes
    # and second-difference the solver's nodal error field)
    ki = max(1, (j + 1) // n_cert)
    ke = max(1, (t.size - j) // n_cert)
    idx = np.union1d(np.arange(0, j + 1, ki), np.arange(j, t.size, ke))
    idx = np.union1d(idx, [j, t.size - 1])
    j_pos = int(np.nonzero(idx == j)[0][0])
    sub = Profile(
        Grid(t[idx], junction_index=j_pos),
        v[idx],
        d_left=glued.d_minus,
        d_right=glued.d_plus,
    )
    res = residual(sub, params)
    ts = t[idx]
    hs = np.diff(ts)
    # below h_floor the stencil amplifies value rounding (eps/h^2) past the
    # certification level, so those near-junction stencils are skipped
    noisy = np.zeros(ts.size, dtype=bool)
    noisy[1:-1] = np.minimum(hs[:-1], hs[1:]) < h_floor
    res[noisy] = np.nan
    band = (ts > margin) & (ts < HALF_PI - margin)
    vals = np.abs(res[band])
    max_res = float(np.nanmax(vals)) if vals.size else math.nan
    return max_res, float(abs(v[0])), float(abs(math.pi - v[-1]))


def find_solution(
    params: HopfParams,
    s_min: float = 0.02,
    s_max: float = 1.5,
    n_scan: int = 16,
    grid_n: int = 2000,
    root_tol: float = ROOT_TOL,
    max_bisect: int = 80,
    jobs: int = 1,
    **glue_opts,
) -> SolveOutcome:
    """Drive l(s) to zero by bisection over a sign-change bracket.

    Returns ``no_sign_change`` (numerical evidence of unsolvability, not a
    proof) when the scan shows a single-signed jump, ``failed`` on numerical
    breakdown, and ``solution_found`` with the residual-certified glued curve
    otherwise.
    """
    scan = scan_jump(params, s_min, s_max, n_scan, grid_n=grid_n, jobs=jobs, **glue_opts)
    opts = dict(glue_opts)
    opts.setdefault("n", grid_n)

    # a scanned junction may already satisfy the root tolerance (e.g. the
    # q = 1, lambda = mu family, where the jump vanishes identically)
    for row in scan.rows:
        if row.converged and abs(row.l) <= root_tol:
            glued = glue(row.s, params, **opts)
            scan.s_star = row.s
            max_res, b0, b1 = _certify(glued, params)
            return SolveOutcome(
                "solution_found", row.s, glued, scan, max_res, b0, b1,
                message="scan point already below the jump tolerance",
            )

    if not scan.brackets:
        return SolveOutcome(
            "no_sign_change", None, None, scan,
            message="jump kept a single sign over the scanned junctions",
        )

    lo, hi = scan.brackets[0]
    l_lo = next(r.l for r in scan.rows if r.s == lo)
    glued_mid: Optional[GluedSolution] = None
    for _ in range(max_bisect):
        mid = 0.5 * (lo + hi)
        try:
            glued_mid = glue(mid, params, **opts)
        except ConvergenceError as exc:
            return SolveOutcome(
                "failed", None, None, scan,
                message=f"glued solve failed at s={mid}: {exc}",
            )
        if abs(glued_mid.l) <= root_tol:
            scan.s_star = mid
            max_res, b0, b1 = _certify(glued_mid, params)
            return SolveOutcome(
                "solution_found", mid, glued_mid, scan, max_res, b0, b1
            )
        if l_lo * glued_mid.l < 0.0:
            hi = mid
        else:
            lo, l_lo = mid, glued_mid.l
        if hi - lo < 1e-13 * (1.0 + hi):
            break
    return SolveOutcome(
        "failed", None, None, scan,
        message=(
            "bisection exhausted its bracket without reaching the jump "
            f"tolerance (last |l| = {abs(glued_mid.l) if glued_mid else math.nan:.3e})"
        ),
    )


def blowup_compare(
    s: float,
    params: HopfParams,
    eps: float,
    grid_n: int = 2000,
    n_samples: int = 2001,
    **glue_opts,
) -> float:
    """Sup distance between the stretched glued profile and the limit profile.

    gamma_s(t) = alpha_s(s*t) is compared with the limit profile pinned at
    pi/2 at t = 1, over t in [eps, 1/eps].
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if s / eps >= HALF_PI:
        raise ValueError("s/eps must stay below pi/2")
    glued = glue(s, params, n=grid_n, **glue_opts)
    prof = glued.merged_profile()
    tt = np.geomspace(eps, 1.0 / eps, n_samples)
    gamma = prof.interpolate(s * tt)
    phi = phi_limit(tt, 1.0, params.lam)
    return float(np.max(np.abs(gamma - phi)))


def estimate_Is1_trend(
    params: HopfParams,
    s_sequence: Sequence[float],
    grid_n: int = 2000,
    **glue_opts,
) -> list[float]:
    """s^-2 * I_s^1 along a decreasing sequence of junction values.

    For lambda > 1 the values approach the finite limit A(lambda); for
    lambda = 1 they grow without bound as s -> 0.
    """
    out = []
    for s in s_sequence:
        g = glue(float(s), params, n=grid_n, **glue_opts)
        out.append(g.I_s1 / float(s) ** 2)
    return out


@dataclass
class Is2Report:
    s: float
    R: float
    d: float
    A_s: float
    B_s: float
    I_s1: float
    I_s2: float
    ratio: float  # I_s2 / I_s1
    bound_ok: bool  # B_s <= tan(R*s)^2 * I_s1


def estimate_Is2(
    params: HopfParams,
    s: float,
    R: float,
    d: float,
    grid_n: int = 2000,
    **glue_opts,
) -> Is2Report:
    """Split I_s^2 at t = R*s into inner (B_s) and outer (A_s) parts.

    The inner integrand equals tan(t)^2 times the I_s^1 integrand, so
    B_s <= tan(R*s)^2 * I_s^1 holds exactly; the ratio I_s^2/I_s^1 shrinks
    along s -> 0.
    """
    if not (d > 1.0):
        raise ValueError("d must exceed 1")
    if not (0.0 < R * s < math.pi / 4.0):
        raise ValueError("R*s must lie in (0, pi/4)")
    glued = glue(s, params, n=grid_n, **glue_opts)
    prof = glued.merged_profile()
    t, v = prof.t, prof.values
    q = params.q
    cut = R * s

    def chunk(ts: np.ndarray, vs: np.ndarray) -> float:
        g = np.sin(ts) ** 3 * np.cos(ts) ** (2 * q - 3) * np.sin(vs) ** 2
        return float(simpson(g, x=ts))

    v_cut = float(prof.interpolate(cut))
    inner_mask = t < cut
    t_in = np.concatenate(([0.0], t[inner_mask], [cut]))
    v_in = np.concatenate(([0.0], v[inner_mask], [v_cut]))
    t_out = np.concatenate(([cut], t[~inner_mask], [HALF_PI]))
    v_out = np.concatenate(([v_cut], v[~inner_mask], [math.pi]))
    b_s = chunk(t_in, v_in)
    a_s = chunk(t_out, v_out)
    bound = math.tan(cut) ** 2 * glued.I_s1
    return Is2Report(
        s=s,
        R=R,
        d=d,
        A_s=a_s,
        B_s=b_s,
        I_s1=glued.I_s1,
        I_s2=glued.I_s2,
        ratio=glued.I_s2 / glued.I_s1,
        bound_ok=bool(b_s <= bound * (1.0 + 1e-12) + 1e-300),
    )


@dataclass
class ComparisonReport:
    s: float
    d: float
    t0: float
    theta: float
    alpha_t0: float
    psi_t0: float
    hypothesis_met: bool
    min_gap: float = math.nan  # min over nodes in (t0, pi/2) of alpha - psi
    ordering_ok: bool = False
    supersolution_min: float = math.nan
    supersolution_ok: bool = False
    n_nodes_checked: int = 0


def comparison_check(
    s: float,
    d: float,
    t0: float,
    params: HopfParams,
    grid_n: int = 2000,
    ordering_tol: float = 1e-6,
    **glue_opts,
) -> ComparisonReport:
    """Ordering of the glued curve above the scaled comparison profile.

    Hypothesis: alpha_s(t0) > psi_{d*s}(t0) > max(theta, 3*pi/4).  When it is
    met, the glued curve must dominate psi_{d*s} (up to ordering_tol) on every
    node in (t0, pi/2), and the comparison profile's flux defect

        (f psi')' - f Q sin(psi) cos(psi)
            = sin(t) cos(t)^(q-2) * ((lam - mu) cos(psi) - sqrt(lam)(q-1)) * sin(psi)

    must be positive wherever psi exceeds the threshold angle.
    """
    theta = theta_threshold(params)
    glued = glue(s, params, n=grid_n, **glue_opts)
    prof = glued.merged_profile()
    ds = d * s
    alpha_t0 = float(prof.interpolate(t0))
    psi_t0 = float(psi_comparison(t0, ds, params.lam))
    hypothesis = alpha_t0 > psi_t0 > max(theta, 0.75 * math.pi)
    report = ComparisonReport(
        s=s, d=d, t0=t0, theta=theta,
        alpha_t0=alpha_t0, psi_t0=psi_t0, hypothesis_met=hypothesis,
    )
    if not hypothesis:
        return report
    t = prof.t
    mask = t > t0
    psi = psi_comparison(t[mask], ds, params.lam)
    gap = prof.values[mask] - psi
    factor = (
        np.sin(t[mask])
        * np.cos(t[mask]) ** (params.q - 2)
        * (
            (params.lam - params.mu) * np.cos(psi)
            - math.sqrt(params.lam) * (params.q - 1)
        )
        * np.sin(psi)
    )
    above = psi > theta
    report.min_gap = float(np.min(gap))
    report.ordering_ok = bool(report.min_gap >= -ordering_tol)
    report.supersolution_min = float(np.min(factor[above])) if np.any(above) else math.inf
    report.supersolution_ok = bool(report.supersolution_min > 0.0)
    report.n_nodes_checked = int(mask.sum())
    return report


def auto_comparison_config(
    s: float,
    params: HopfParams,
    R: float = 50.0,
    margin: float = 0.01,
    max_shrink: int = 2,
) -> tuple[float, float, float]:
    """Pick (s, d, t0) with psi_{d*s}(R*s) above max(theta, 3*pi/4) + margin.

    Searches d over (1, R); if no admissible d exists at the given s, s is
    halved and the search retried up to ``max_shrink`` times.
    """
    theta = theta_threshold(params)
    target = max(theta, 0.75 * math.pi) + margin
    for _ in range(max_shrink + 1):
        if R * s < HALF_PI:
            dd = np.geomspace(1.0 + 1e-6, R, 400)
            vals = np.array(
                [psi_comparison(R * s, float(d) * s, params.lam) for d in dd]
            )
            ok = np.nonzero(vals >= target)[0]
            if ok.size:
                # the largest admissible d leaves the most room under alpha_s
                return s, float(dd[ok[-1]]), R * s
        s *= 0.5
    raise ValueError(
        f"no comparison scale d in (1, {R}) reaches the threshold for s={s}"
    )


@dataclass
class JunctionAsymptoticsReport:
    s: float
    R: float
    d: float
    cos_alpha_at_sR: float
    alpha_limit: float  # -1 + 2/(1 + R^a)
    alpha_err: float
    cos_psi_at_sR: float
    psi_limit: float  # -1 + 2/(1 + (R/d)^a)
    psi_err: float


def junction_asymptotics_check(
    s: float,
    R: float,
    d: float,
    params: HopfParams,
    grid_n: int = 2000,
    **glue_opts,
) -> JunctionAsymptoticsReport:
    """Cosines of the glued and comparison profiles at t = R*s vs their limits.

    cos(alpha_s(R*s)) approaches -1 + 2/(1+R^a) as s -> 0, and
    cos(psi_{d*s}(R*s)) equals -1 + 2/(1+(R/d)^a) up to O(R^2 s^2).
    """
    if not (0.0 < R * s < math.pi / 4.0):
        raise ValueError("R*s must lie in (0, pi/4)")
    a = params.a
    glued = glue(s, params, n=grid_n, **glue_opts)
    cos_alpha = float(math.cos(glued.merged_profile().interpolate(R * s)))
    alpha_limit = -1.0 + 2.0 / (1.0 + R**a)
    cos_psi = float(math.cos(psi_comparison(R * s, d * s, params.lam)))
    psi_limit = -1.0 + 2.0 / (1.0 + (R / d) ** a)
    return JunctionAsymptoticsReport(
        s=s,
        R=R,
        d=d,
        cos_alpha_at_sR=cos_alpha,
        alpha_limit=alpha_limit,
        alpha_err=abs(cos_alpha - alpha_limit),
        cos_psi_at_sR=cos_psi,
        psi_limit=psi_limit,
        psi_err=abs(cos_psi - psi_limit),
    )


def _map_cell(args) -> SolvabilityCell:
    lam, mu, p, q, cell_opts = args
    try:
        params = HopfParams(p=p, q=q, lam=lam, mu=mu)
        outcome = find_solution(params, **cell_opts)
    except (ValueError, ConvergenceError, RuntimeError):
        return SolvabilityCell(lam=lam, mu=mu, verdict="inconclusive")
    if outcome.verdict == "solution_found":
        return SolvabilityCell(lam=lam, mu=mu, verdict="solution_found",
                               s_star=outcome.s_star)
    if outcome.verdict == "no_sign_change":
        return SolvabilityCell(lam=lam, mu=mu, verdict="no_sign_change")
    return SolvabilityCell(lam=lam, mu=mu, verdict="inconclusive")


def solvability_map(
    p: int,
    q: int,
    lambda_range: tuple[float, float],
    mu_range: tuple[float, float],
    n_lambda: int,
    n_mu: int,
    grid_n: int = 1000,
    n_scan: int = 14,
    jobs: int = 1,
    **find_opts,
) -> list[SolvabilityCell]:
    """Run the scan/bisect pipeline over a (lambda, mu) grid.

    Cells are laid out lambda-major in the returned list; per-cell failures
    are marked ``inconclusive`` rather than raised.
    """
    if lambda_range[0] <= 0 or mu_range[0] <= 0:
        raise ValueError("lambda and mu ranges must be positive")
    lams = np.linspace(lambda_range[0], lambda_range[1], n_lambda)
    mus = np.linspace(mu_range[0], mu_range[1], n_mu)
    cell_opts = dict(find_opts)
    cell_opts.setdefault("grid_n", grid_n)
    cell_opts.setdefault("n_scan", n_scan)
    tasks = [
        (float(lam), float(mu), p, q, cell_opts) for lam in lams for mu in mus
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(_map_cell, tasks))
    else:
        cells = [_map_cell(t) for t in tasks]
    return cells


# --- CSV writers ---------------------------------------------------------------


def write_scan_csv(scan: ScanResult, path) -> None:
    lines = ["s,l,l_tilde,I_s,I_s1,I_s2,converged"]
    for r in scan.rows:
        lines.append(
            f"{r.s:.17g},{r.l:.17g},{r.l_tilde:.17g},"
            f"{r.I_s:.17g},{r.I_s1:.17g},{r.I_s2:.17g},{int(r.converged)}"
        )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_map_csv(cells: list[SolvabilityCell], path) -> None:
    lines = ["lambda,mu,verdict,s_star"]
    for c in cells:
        s_star = f"{c.s_star:.17g}" if c.s_star is not None else ""
        lines.append(f"{c.lam:.17g},{c.mu:.17g},{c.verdict},{s_star}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
