"""Scenario orchestration: builds the pipeline objects, runs the requested
checks in dependency order, and assembles the deterministic report."""

from __future__ import annotations

import time
from datetime import datetime, timezone

import numpy as np

from . import charfol as cf
from . import cocycles, forms, splitting
from .fields import TrigField, wrap
from .report import Report
from .scenario import KNOWN_CHECKS, Scenario
from .torus import SkewProduct, ToralAutomorphism


class DependencyError(RuntimeError):
    """A check ran without its prerequisite results (guarded at parse time)."""


class _Context:
    def __init__(self, sc: Scenario, seed):
        self.sc = sc
        self.seed = sc.seed if seed is None else seed
        self.base = ToralAutomorphism(sc.matrix)
        self.gamma = None
        self.F = None
        if sc.gamma is not None:
            self.gamma = sc.gamma
        elif sc.transfer is not None:
            self.gamma = cocycles.coboundary_from_transfer(sc.transfer, self.base)
        if self.gamma is not None:
            self.F = SkewProduct(self.base, self.gamma)
        self.solution = None
        self.corrections = None
        self.alpha_joint = None
        self.alpha_literal = None
        if sc.alpha is not None:
            self.alpha_literal = forms.OneForm(
                a_x=sc.alpha.dx, a_y=sc.alpha.dy,
                v_t=sc.alpha.dt if not sc.alpha.dt.is_zero() else TrigField.zero(3),
            )

    def transfer_candidate(self):
        if self.solution is None:
            raise DependencyError("needs the 'solve' check")
        if self.solution.transfer is not None:
            return self.solution.transfer
        return self.solution.candidate

    def alpha(self):
        """Form under test: the joint-bundle form when splitting ran, else the literal."""
        if self.alpha_joint is not None:
            return self.alpha_joint
        if self.alpha_literal is not None:
            return self.alpha_literal
        raise DependencyError("no 1-form available (need [alpha.*] or the 'splitting' check)")


def _verdict_three_valued(value, zero_tol, nonvanishing_tol, low, high):
    if value < zero_tol:
        return low
    if value > nonvanishing_tol:
        return high
    return "inconclusive -- refine grid"


def _check_obstruction(ctx, grids):
    sc = ctx.sc
    tol = sc.tolerances["obstruction"]
    blocks = {}
    worst = 0.0
    for k in range(1, sc.blocks + 1):
        rep = cocycles.livsic_obstruction(ctx.gamma, ctx.base, sc.m_max, k=k, tol=tol)
        blocks[str(k)] = rep.to_dict()
        worst = max(worst, rep.worst)
    verdict = "all-zero" if worst < tol else "violated"
    return {"verdict": verdict, "worst": worst, "tolerance": tol, "blocks": blocks}


def _check_solve(ctx, grids):
    sol = cocycles.solve_cohomological(ctx.gamma, ctx.base)
    ctx.solution = sol
    result = {
        "verdict": "solved" if sol.ok else "unsolvable-in-class",
        "witnesses": [w.to_dict() for w in sol.witnesses],
        "candidate_terms": len(sol.candidate.coeffs),
    }
    if sol.ok:
        result["transfer_mean"] = sol.transfer.mean()
    return result


def _check_splitting(ctx, grids):
    sc = ctx.sc
    c_s = splitting.fiber_correction(ctx.F, "s", sc.order)
    c_u = splitting.fiber_correction(ctx.F, "u", sc.order)
    ctx.corrections = (c_s, c_u)
    ctx.alpha_joint = splitting.joint_bundle_form(c_s, c_u)
    rng = np.random.default_rng(ctx.seed)
    pts = rng.random((1000, 2))
    res = max(
        float(np.max(splitting.recurrence_residual(ctx.F, c_s, pts))),
        float(np.max(splitting.recurrence_residual(ctx.F, c_u, pts))),
    )
    zero = sc.tolerances["zero"]
    return {
        "verdict": "converged" if res < zero else "not-converged",
        "max_recurrence_residual": res,
        "tolerance": zero,
        "order": sc.order,
        "error_bound_s": c_s.error_bound,
        "error_bound_u": c_u.error_bound,
        "terms_s": len(c_s.field.coeffs),
        "terms_u": len(c_u.field.coeffs),
    }


def _tangency_grid(ctx, mu, shape2):
    pts = forms.grid_points(shape2)
    alpha = ctx.alpha_joint
    pts3 = np.concatenate([pts, wrap(mu(pts))[..., None]], axis=-1)
    vt = alpha.v_t(pts3)
    rx = alpha.a_x(pts3) + vt * mu.derivative(0)(pts)
    ry = alpha.a_y(pts3) + vt * mu.derivative(1)(pts)
    return pts, np.maximum(np.abs(rx), np.abs(ry))


def _check_tangency(ctx, grids):
    sc = ctx.sc
    mu = ctx.transfer_candidate()
    if ctx.alpha_joint is None:
        raise DependencyError("needs the 'splitting' check")
    res = splitting.graph_tangency_check(ctx.alpha_joint, mu, grid=sc.grids["base"][0])
    zero, nonv = sc.tolerances["zero"], sc.tolerances["nonvanishing"]
    pts, vals = _tangency_grid(ctx, mu, sc.grids["plot"][:2])
    grids.append(("residual", forms._grid_data(pts, vals)))
    return {
        "verdict": _verdict_three_valued(res, zero, nonv, "tangent", "not-tangent"),
        "max_residual": res,
        "tolerance": zero,
        "grid": list(sc.grids["base"]),
    }


def _check_foliation(ctx, grids):
    sc = ctx.sc
    mu = ctx.transfer_candidate()
    worst = 0.0
    for i, theta in enumerate(np.linspace(0.0, 1.0, sc.theta_grid, endpoint=False)):
        leaf = splitting.GraphLeaf(theta=float(theta), mu=mu)
        worst = max(worst, splitting.leaf_invariance_check(ctx.F, leaf, sc.samples, seed=ctx.seed + i))
    zero, nonv = sc.tolerances["zero"], sc.tolerances["nonvanishing"]
    return {
        "verdict": _verdict_three_valued(worst, zero, nonv, "invariant", "not-invariant"),
        "max_leaf_distance": worst,
        "theta_grid": sc.theta_grid,
        "samples": sc.samples,
        "tolerance": zero,
    }


def _check_invariant_form(ctx, grids):
    sc = ctx.sc
    mu = ctx.transfer_candidate()
    alpha = forms.graph_form(mu)
    zero = sc.tolerances["zero"]
    res = forms.invariant_form_residual(ctx.F, alpha, sc.grids["volume"])
    tid = forms.transport_identity_check(ctx.F, alpha, sc.grids["volume"], zero_tol=zero)
    pts = forms.grid_points(sc.grids["plot"])
    vals = np.max(np.abs(forms.pullback_covector(ctx.F, alpha, pts) - alpha.at(pts)), axis=-1)
    grids.append(("residual", forms._grid_data(pts, vals)))
    ok = res < zero and tid.max_residual < zero
    return {
        "verdict": "invariant" if ok else "not-invariant",
        "pullback_residual": res,
        "transport_identity_residual": tid.max_residual,
        "conformal": tid.conformal.to_dict(),
        "tolerance": zero,
        "grid": list(sc.grids["volume"]),
    }


def _check_frobenius(ctx, grids):
    sc = ctx.sc
    rep = forms.frobenius_test(
        ctx.alpha(), sc.grids["volume"],
        zero_tol=sc.tolerances["zero"], nonvanishing_tol=sc.tolerances["nonvanishing"],
    )
    coeff = forms.frobenius_form(ctx.alpha()).c
    pts = forms.grid_points(sc.grids["plot"])
    grids.append(("coefficient", forms._grid_data(pts, coeff(pts))))
    return rep.to_dict()


def _check_contact(ctx, grids):
    sc = ctx.sc
    rep = forms.contact_test(
        ctx.alpha(), sc.grids["volume"],
        zero_tol=sc.tolerances["zero"], nonvanishing_tol=sc.tolerances["nonvanishing"],
    )
    coeff = forms.frobenius_form(ctx.alpha()).c
    pts = forms.grid_points(sc.grids["plot"])
    grids.append(("coefficient", forms._grid_data(pts, coeff(pts))))
    return rep.to_dict()


def _check_reeb(ctx, grids):
    sc = ctx.sc
    if ctx.alpha_literal is None:
        raise DependencyError("needs [alpha.*] sections")
    alpha = ctx.alpha_literal
    zero = sc.tolerances["zero"]
    pts = forms.grid_points((3, 3, 8)).reshape(-1, 3)
    worst_norm, worst_contract = 0.0, 0.0
    for p in pts:
        try:
            r = forms.reeb_field(alpha, p)
        except ValueError as exc:
            return {"verdict": "failed", "reason": str(exc), "tolerance": zero}
        rn, rc = forms.reeb_residuals(alpha, p, r)
        worst_norm, worst_contract = max(worst_norm, rn), max(worst_contract, rc)
    ok = worst_norm < zero and worst_contract < zero
    return {
        "verdict": "verified" if ok else "failed",
        "normalization_residual": worst_norm,
        "contraction_residual": worst_contract,
        "tolerance": zero,
        "samples": int(pts.shape[0]),
    }


def _check_charfol(ctx, grids):
    sc = ctx.sc
    mu = ctx.transfer_candidate()
    alpha = forms.graph_form(mu)
    S = cf.SurfaceGraph(sc.surface)
    X = cf.characteristic_field(alpha, S)
    div = cf.divergence(X)
    records = cf.singular_points(X, seeds=sc.newton_seeds)
    verdict = cf.contact_verdict(records, X)
    pts = forms.grid_points(sc.grids["plot"][:2])
    grids.append(("divergence", forms._grid_data(pts, div(pts))))
    from .forms import GridData

    table = [
        (r.location[0], r.location[1], r.divergence, r.classification) for r in records
    ]
    grids.append(("singular-points", GridData(
        columns=("x", "y", "divergence", "classification"), data=table)))
    return {
        "verdict": verdict.verdict,
        "divergence_l1": div.l1(),
        "singular_points": [r.to_dict() for r in records],
        "violating": verdict.violating.to_dict() if verdict.violating else None,
        "vacuous": verdict.vacuous,
        "tolerance": verdict.tolerance,
    }


_CHECKS = {
    "obstruction": _check_obstruction,
    "solve": _check_solve,
    "splitting": _check_splitting,
    "tangency": _check_tangency,
    "foliation": _check_foliation,
    "invariant-form": _check_invariant_form,
    "frobenius": _check_frobenius,
    "contact": _check_contact,
    "reeb": _check_reeb,
    "charfol": _check_charfol,
}

_CHAIN = "coboundary -> invariant graph foliation -> integrable joint bundle -> not contact"


def run_scenario(sc: Scenario, seed=None) -> Report:
    ctx = _Context(sc, seed)
    report = Report(scenario=sc.to_dict())
    wall = {}
    ordered = [c for c in KNOWN_CHECKS if c in sc.checks]
    for name in ordered:
        t0 = time.perf_counter()
        grid_list = []
        result = _CHECKS[name](ctx, grid_list)
        wall[name] = round(time.perf_counter() - t0, 6)
        expected = sc.expect.get(name)
        result["expected"] = expected
        result["as_expected"] = None if expected is None else (result["verdict"] == expected)
        report.checks[name] = result
        if grid_list:
            report.grids[name] = grid_list

    violated = any(r["as_expected"] is False for r in report.checks.values())
    inconclusive = any("inconclusive" in r["verdict"] for r in report.checks.values())
    if violated:
        overall, status = "violated-expectation", 1
    elif inconclusive:
        overall, status = "inconclusive", 2
    else:
        overall, status = "as-expected", 0
    report.overall = {"verdict": overall, "exit_status": status, "chain": _CHAIN}
    report.meta = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "wall_times_s": wall,
        "seed": ctx.seed,
    }
    return report
