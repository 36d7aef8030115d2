"""Command-line front end.

Subcommands
-----------
solve       scan the jump function, bisect a sign change, write the profile
scan-jump   tabulate (s, l, l_tilde, I_s, I_s1, I_s2) over junction values
map         solvability verdicts over a (lambda, mu) grid
blowup      sup distance of stretched profiles from the limit profile
compare     supersolution ordering check for one (s, d, t0) configuration
verify      closed-form oracle table; exit 0 only if every row passes
hopf-eval   sample a join map built from a profile CSV; report norm errors

Exit codes: 0 success, 2 no sign change of the jump (solve), 1 failure or bad
usage.  Every run writes ``summary.json`` into the output directory (env
``HOPF_OUT_DIR`` or ``--out-dir``), even on failure.  A flat ``key=value``
config file supplies defaults; command-line flags override it.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import analysis, oracles
from .core import HopfParams
from .ode import read_profile_csv, write_profile_csv
from .hopf import alpha_hopf_eval, multiplication_by_name
from .shooting import match_shooting, write_mismatch_csv

@dataclass(frozen=True)
class RunConfig:
    """Resolved solver settings: defaults, then config file, then flags."""

    n: int = 2000
    grading: float = 2.0
    offset: float = 1e-7
    gradient_tol: float = 1e-10
    root_tol: float = 1e-6
    s_min: float = 0.02
    s_max: float = 1.5
    n_scan: int = 16
    jobs: int = 1

    def __post_init__(self) -> None:
        if self.n < 16:
            raise ValueError(f"grid size n must be >= 16, got {self.n}")
        for name in ("gradient_tol", "root_tol", "offset"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be > 0")
        if not (0.0 < self.s_min < self.s_max < math.pi / 2):
            raise ValueError("scan range needs 0 < s_min < s_max < pi/2")
        if self.grading < 1.0:
            raise ValueError("grading exponent must be >= 1")
        if self.jobs < 1 or self.n_scan < 2:
            raise ValueError("jobs must be >= 1 and n_scan >= 2")

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULTS = {f: getattr(RunConfig, f) for f in RunConfig.__dataclass_fields__}

_CASTS = {"n": int, "n_scan": int, "jobs": int}


def _read_config(path: str | None) -> dict:
    if not path:
        return {}
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        out[key] = _CASTS.get(key, float)(value) if key in DEFAULTS else value
    return out


def _settings(ns: argparse.Namespace) -> RunConfig:
    cfg = dict(DEFAULTS)
    cfg.update(_read_config(getattr(ns, "config", None)))
    for key in DEFAULTS:
        val = getattr(ns, key, None)
        if val is not None:
            cfg[key] = val
    return RunConfig(**cfg)


def _out_dir(ns: argparse.Namespace) -> Path:
    out = getattr(ns, "out_dir", None) or os.environ.get("HOPF_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _params(ns: argparse.Namespace) -> HopfParams:
    return HopfParams(p=ns.p, q=ns.q, lam=ns.lam, mu=ns.mu)


def _parse_range(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"range flag must be min:max:count, got {text!r}")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ValueError("range count must be >= 1")
    return lo, hi, count


def _write_summary(out_dir: Path, payload: dict, echo: bool) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
    (out_dir / "summary.json").write_text(text + "\n")
    if echo:
        print(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _add_param_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--mu", type=float, required=True)


def _add_common_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--n", type=int, help="grid nodes per side (default 2000)")
    sp.add_argument("--grading", type=float, help="mesh grading exponent")
    sp.add_argument("--offset", type=float, help="distance of end nodes from 0, pi/2")
    sp.add_argument("--gradient-tol", dest="gradient_tol", type=float)
    sp.add_argument("--root-tol", dest="root_tol", type=float)
    sp.add_argument("--s-min", dest="s_min", type=float)
    sp.add_argument("--s-max", dest="s_max", type=float)
    sp.add_argument("--n-scan", dest="n_scan", type=int)
    sp.add_argument("--jobs", type=int, help="parallel solves")
    sp.add_argument("--config", help="flat key=value config file")
    sp.add_argument("--out-dir", dest="out_dir")
    sp.add_argument("--json", action="store_true", help="echo summary.json to stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopfbvp",
        description="Singular BVP solver for join-type harmonic maps between spheres",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="find a junction with vanishing jump")
    _add_param_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--cross-check", action="store_true",
                    help="also run the shooting pipeline and record the distance")
    sp.add_argument("--mismatch-map", dest="mismatch_map",
                    help="write the shooting mismatch map CSV here")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("scan-jump", help="tabulate the jump over junction values")
    _add_param_flags(sp)
    _add_common_flags(sp)
    sp.set_defaults(func=cmd_scan_jump)

    sp = sub.add_parser("map", help="solvability verdicts over a (lambda, mu) grid")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--lambda", dest="lam", required=True, help="min:max:count")
    sp.add_argument("--mu", required=True, help="min:max:count")
    _add_common_flags(sp)
    sp.set_defaults(func=cmd_map)

    sp = sub.add_parser("blowup", help="stretched-profile distance from the limit")
    _add_param_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--s-list", dest="s_list", default="0.04,0.02,0.01")
    sp.add_argument("--eps", type=float, default=0.1)
    sp.set_defaults(func=cmd_blowup)

    sp = sub.add_parser("compare", help="supersolution ordering check")
    _add_param_flags(sp)
    _add_common_flags(sp)
    sp.add_argument("--s", type=float, required=True)
    sp.add_argument("--d", type=float)
    sp.add_argument("--t0", type=float)
    sp.add_argument("--R", type=float, default=50.0)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("verify", help="closed-form oracle table")
    sp.add_argument("--config", help="flat key=value config file")
    sp.add_argument("--out-dir", dest="out_dir")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("hopf-eval", help="sample a join map built from a profile")
    sp.add_argument("--profile", required=True, help="profile CSV path")
    sp.add_argument("--kind", required=True,
                    help="complex | quaternion | octonion | restricted3/5/9")
    sp.add_argument("--samples", type=int, default=10000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--config", help="flat key=value config file")
    sp.add_argument("--out-dir", dest="out_dir")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_hopf_eval)

    return parser


def _solve_settings(cfg: RunConfig) -> dict:
    return dict(
        s_min=cfg.s_min,
        s_max=cfg.s_max,
        n_scan=cfg.n_scan,
        grid_n=cfg.n,
        root_tol=cfg.root_tol,
        jobs=cfg.jobs,
        grading=cfg.grading,
        offset=cfg.offset,
        gtol=cfg.gradient_tol,
    )


def cmd_solve(ns: argparse.Namespace) -> int:
    out_dir = _out_dir(ns)
    cfg = _settings(ns)
    params = _params(ns)
    outcome = analysis.find_solution(params, **_solve_settings(cfg))
    files = []
    summary = {
        "command": "solve",
        "params": params.to_dict(),
        "outside_proven_regime": params.outside_proven_regime,
        "config": cfg.to_dict(),
        "verdict": outcome.verdict,
        "s_star": outcome.s_star,
        "max_residual": outcome.max_residual_away,
        "boundary_error_zero": outcome.boundary_error_zero,
        "boundary_error_pi": outcome.boundary_error_pi,
        "message": outcome.message,
        "files_written": files,
    }
    if outcome.glued is not None:
        profile_path = out_dir / "profile.csv"
        write_profile_csv(outcome.glued.merged_profile(), params, profile_path)
        glued_path = out_dir / "glued.json"
        outcome.glued.to_json(glued_path)
        files += ["profile.csv", "glued.json"]
        summary["glued"] = outcome.glued.to_dict()
    scan_path = out_dir / "scan.csv"
    analysis.write_scan_csv(outcome.scan, scan_path)
    files.append("scan.csv")
    if ns.cross_check:
        match = match_shooting(params)
        summary["shooting_verdict"] = match.verdict
        if match.verdict == "solution" and outcome.glued is not None:
            prof = outcome.glued.merged_profile()
            lo, hi = match.profile.t[0], match.profile.t[-1]
            mask = (prof.t >= lo) & (prof.t <= hi)
            diff = prof.values[mask] - match.profile.interpolate(prof.t[mask])
            summary["pipeline_sup_distance"] = float(np.max(np.abs(diff)))
            summary["shooting_c0"] = match.state.c0
            summary["shooting_c1"] = match.state.c1
        if ns.mismatch_map:
            write_mismatch_csv(match, out_dir / ns.mismatch_map)
            files.append(ns.mismatch_map)
    _write_summary(out_dir, summary, ns.json)
    if outcome.verdict == "solution_found":
        return 0
    if outcome.verdict == "no_sign_change":
        return 2
    return 1


def cmd_scan_jump(ns: argparse.Namespace) -> int:
    out_dir = _out_dir(ns)
    cfg = _settings(ns)
    params = _params(ns)
    scan = analysis.scan_jump(
        params,
        cfg.s_min,
        cfg.s_max,
        cfg.n_scan,
        grid_n=cfg.n,
        jobs=cfg.jobs,
        grading=cfg.grading,
        offset=cfg.offset,
        gtol=cfg.gradient_tol,
    )
    analysis.write_scan_csv(scan, out_dir / "scan.csv")
    summary = {
        "command": "scan-jump",
        "params": params.to_dict(),
        "outside_proven_regime": params.outside_proven_regime,
        "config": cfg.to_dict(),
        "verdict": "sign_change" if scan.brackets else "no_sign_change",
        "brackets": scan.brackets,
        "n_converged": sum(r.converged for r in scan.rows),
        "files_written": ["scan.csv"],
    }
    _write_summary(out_dir, summary, ns.json)
    return 0


def cmd_map(ns: argparse.Namespace) -> int:
    out_dir = _out_dir(ns)
    cfg = _settings(ns)
    lam_lo, lam_hi, n_lam = _parse_range(ns.lam)
    mu_lo, mu_hi, n_mu = _parse_range(ns.mu)
    cells = analysis.solvability_map(
        ns.p,
        ns.q,
        (lam_lo, lam_hi),
        (mu_lo, mu_hi),
        n_lam,
        n_mu,
        grid_n=min(cfg.n, 1000),
        jobs=cfg.jobs,
        s_min=cfg.s_min,
        s_max=cfg.s_max,
        root_tol=cfg.root_tol,
    )
    analysis.write_map_csv(cells, out_dir / "map.csv")
    verdicts = [c.verdict for c in cells]
    summary = {
        "command": "map",
        "params": {"p": ns.p, "q": ns.q, "lambda": ns.lam, "mu": ns.mu},
        "config": cfg.to_dict(),
        "verdict": "done",
        "n_solution_found": verdicts.count("solution_found"),
        "n_no_sign_change": verdicts.count("no_sign_change"),
        "n_inconclusive": verdicts.count("inconclusive"),
        "files_written": ["map.csv"],
    }
    _write_summary(out_dir, summary, ns.json)
    return 0


def cmd_blowup(ns: argparse.Namespace) -> int:
    out_dir = _out_dir(ns)
    cfg = _settings(ns)
    params = _params(ns)
    s_values = [float(tok) for tok in ns.s_list.split(",") if tok.strip()]
    rows = []
    for s in s_values:
        dist = analysis.blowup_compare(
            s, params, ns.eps, grid_n=cfg.n,
            grading=cfg.grading, offset=cfg.offset, gtol=cfg.gradient_tol,
        )
        rows.append((s, dist))
    lines = ["s,sup_distance"] + [f"{s:.17g},{d:.17g}" for s, d in rows]
    (out_dir / "blowup.csv").write_text("\n".join(lines) + "\n")
    summary = {
        "command": "blowup",
        "params": params.to_dict(),
        "config": cfg.to_dict(),
        "eps": ns.eps,
        "rows": [{"s": s, "sup_distance": d} for s, d in rows],
        "decreasing": all(b[1] < a[1] for a, b in zip(rows, rows[1:])),
        "files_written": ["blowup.csv"],
    }
    _write_summary(out_dir, summary, ns.json)
    return 0


def cmd_compare(ns: argparse.Namespace) -> int:
    out_dir = _out_dir(ns)
    cfg = _settings(ns)
    params = _params(ns)
    s, d, t0 = ns.s, ns.d, ns.t0
    if d is None or t0 is None:
        s, d_auto, t0_auto = analysis.auto_comparison_config(s, params, R=ns.R)
        d = d if d is not None else d_auto
        t0 = t0 if t0 is not None else t0_auto
    report = analysis.comparison_check(
        s, d, t0, params, grid_n=cfg.n,
        grading=cfg.grading, offset=cfg.offset, gtol=cfg.gradient_tol,
    )
    summary = {
        "command": "compare",
        "params": params.to_dict(),
        "config": cfg.to_dict(),
        "verdict": (
            "ordering_holds"
            if report.hypothesis_met and report.ordering_ok
            else ("hypothesis_not_met" if not report.hypothesis_met else "ordering_violated")
        ),
        "report": {
            "s": report.s,
            "d": report.d,
            "t0": report.t0,
            "theta": report.theta,
            "alpha_t0": report.alpha_t0,
            "psi_t0": report.psi_t0,
            "hypothesis_met": report.hypothesis_met,
            "min_gap": report.min_gap,
            "ordering_ok": report.ordering_ok,
            "supersolution_min": report.supersolution_min,
            "supersolution_ok": report.supersolution_ok,
            "n_nodes_checked": report.n_nodes_checked,
        },
        "files_written": [],
    }
    _write_summary(out_dir, summary, ns.json)
    return 0


def cmd_verify(ns: argparse.Namespace) -> int:
    out_dir = _out_dir(ns)
    rows = oracles.run_oracle_suite()
    width = max(len(r.name) for r in rows)
    print(f"{'oracle':<{width}}  {'max error':>12}  {'tolerance':>10}  status")
    for r in rows:
        status = "pass" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {r.value:12.3e}  {r.tol:10.0e}  {status}")
    all_pass = all(r.passed for r in rows)
    summary = {
        "command": "verify",
        "verdict": "pass" if all_pass else "fail",
        "rows": [
            {"name": r.name, "value": r.value, "tol": r.tol, "passed": r.passed}
            for r in rows
        ],
        "files_written": [],
    }
    _write_summary(out_dir, summary, ns.json)
    return 0 if all_pass else 1


def _unit_sample(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def cmd_hopf_eval(ns: argparse.Namespace) -> int:
    out_dir = _out_dir(ns)
    profile = read_profile_csv(ns.profile)
    mult = multiplication_by_name(ns.kind)
    rng = np.random.default_rng(ns.seed)
    t_lo, t_hi = profile.t[0], profile.t[-1]
    worst = 0.0
    for _ in range(ns.samples):
        t = rng.uniform(t_lo, t_hi)
        x = _unit_sample(rng, mult.k)
        y = _unit_sample(rng, mult.l)
        u = alpha_hopf_eval(profile, mult, t, x, y)
        worst = max(worst, abs(1.0 - float(np.linalg.norm(u))))
    north = np.zeros(mult.n_out + 1)
    north[-1] = 1.0
    south = -north
    u0 = alpha_hopf_eval(
        profile, mult, t_lo, _unit_sample(rng, mult.k), _unit_sample(rng, mult.l)
    )
    u1 = alpha_hopf_eval(
        profile, mult, t_hi, _unit_sample(rng, mult.k), _unit_sample(rng, mult.l)
    )
    summary = {
        "command": "hopf-eval",
        "kind": ns.kind,
        "samples": ns.samples,
        "seed": ns.seed,
        "max_norm_error": worst,
        "north_pole_error": float(np.linalg.norm(u0 - north)),
        "south_pole_error": float(np.linalg.norm(u1 - south)),
        "files_written": [],
    }
    _write_summary(out_dir, summary, ns.json)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except Exception as exc:  # usage or numerical failure: report, exit 1
        try:
            _write_summary(
                _out_dir(ns),
                {
                    "command": ns.command,
                    "verdict": "error",
                    "error": f"{type(exc).__name__}: {exc}",
                    "files_written": [],
                },
                getattr(ns, "json", False),
            )
        except Exception:
            pass
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
