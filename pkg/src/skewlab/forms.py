"""Exterior calculus on T^2 x S^1 with trig-polynomial coefficients.

Conventions: coordinates (x, y, t); 1-forms are a_x dx + a_y dy + v_t dt;
2-forms use the basis {dx^dy, dx^dt, dy^dt}; 3-forms are reported in the
volume basis dt^dx^dy (this fixes the sign of the contact coefficient).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import TrigField, wrap
from .torus import SkewProduct


def _as_field(v, dim=3):
    if isinstance(v, TrigField):
        if v.dim != dim:
            raise ValueError(f"coefficient must live on T^{dim}")
        return v
    return TrigField.constant(dim, float(v))


@dataclass(frozen=True)
class OneForm:
    """alpha = v_t dt + beta_t with beta_t = a_x dx + a_y dy."""

    a_x: TrigField
    a_y: TrigField
    v_t: TrigField

    def __post_init__(self):
        object.__setattr__(self, "a_x", _as_field(self.a_x))
        object.__setattr__(self, "a_y", _as_field(self.a_y))
        object.__setattr__(self, "v_t", _as_field(self.v_t))

    def at(self, pts):
        """Covector components (a_x, a_y, v_t) at points; shape (..., 3)."""
        pts = np.asarray(pts, dtype=float)
        return np.stack([self.a_x(pts), self.a_y(pts), self.v_t(pts)], axis=-1)

    def t_independent(self):
        return not (
            self.a_x.depends_on(2) or self.a_y.depends_on(2) or self.v_t.depends_on(2)
        )


def graph_form(mu: TrigField):
    """The closed form dt - d(mu) for a base transfer map mu."""
    mu3 = mu.promote(3, (0, 1))
    return OneForm(a_x=-mu3.derivative(0), a_y=-mu3.derivative(1), v_t=TrigField.constant(3, 1.0))


@dataclass(frozen=True)
class TwoForm:
    c_xy: TrigField
    c_xt: TrigField
    c_yt: TrigField


@dataclass(frozen=True)
class ThreeForm:
    """coefficient of dt^dx^dy."""

    c: TrigField


def exterior_derivative(alpha: OneForm) -> TwoForm:
    """Exact coefficientwise d of a 1-form."""
    return TwoForm(
        c_xy=alpha.a_y.derivative(0) - alpha.a_x.derivative(1),
        c_xt=alpha.v_t.derivative(0) - alpha.a_x.derivative(2),
        c_yt=alpha.v_t.derivative(1) - alpha.a_y.derivative(2),
    )


def exterior_derivative_two(omega: TwoForm) -> ThreeForm:
    # d(P dx^dy + Q dx^dt + R dy^dt) = (dP/dt - dQ/dy + dR/dx) dt^dx^dy
    return ThreeForm(
        c=omega.c_xy.derivative(2) - omega.c_xt.derivative(1) + omega.c_yt.derivative(0)
    )


def wedge(alpha: OneForm, omega: TwoForm) -> ThreeForm:
    """alpha ^ omega in the volume basis dt^dx^dy."""
    return ThreeForm(
        c=alpha.v_t * omega.c_xy + alpha.a_x * omega.c_yt - alpha.a_y * omega.c_xt
    )


def frobenius_form(alpha: OneForm) -> ThreeForm:
    """The obstruction alpha ^ d(alpha), exact in the trig class."""
    return wedge(alpha, exterior_derivative(alpha))


# ----------------------------------------------------------------------
# grid evaluation


def grid_points(shape):
    """Uniform grid on the torus with the given per-axis resolutions."""
    axes = [np.linspace(0.0, 1.0, n, endpoint=False) for n in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1)


def _collapsed_grid(shape, fields):
    """Grid for evaluating fields, collapsing axes none of them depend on.

    Collapsing is exact: a field constant along an axis attains the same
    extrema on a single slice.
    """
    shape = tuple(int(n) for n in shape)
    eff = tuple(
        n if any(f.depends_on(i) for f in fields) else 1 for i, n in enumerate(shape)
    )
    return grid_points(eff), eff


@dataclass
class GridData:
    """Grid-valued scalar for CSV/plot export: columns then an (N, c) array."""

    columns: tuple
    data: np.ndarray


def _grid_data(pts, values):
    names = ("x", "y", "t")[: pts.shape[-1]]
    flat = np.column_stack([pts[..., i].ravel() for i in range(pts.shape[-1])] + [values.ravel()])
    return GridData(columns=names + ("value",), data=flat)


@dataclass
class FrobeniusReport:
    max_abs: float
    argmax: tuple
    verdict: str
    tolerance: float
    grid: GridData

    def to_dict(self):
        return {
            "max_abs": self.max_abs,
            "argmax": list(self.argmax),
            "verdict": self.verdict,
            "tolerance": self.tolerance,
        }


def frobenius_test(alpha: OneForm, shape=(128, 128, 64), zero_tol=1e-10, nonvanishing_tol=1e-6):
    """Three-valued integrability verdict from the size of alpha ^ d(alpha)."""
    coeff = frobenius_form(alpha).c
    pts, _ = _collapsed_grid(shape, [coeff])
    vals = coeff(pts)
    vals = np.atleast_1d(vals)
    imax = np.unravel_index(np.argmax(np.abs(vals)), vals.shape)
    max_abs = float(np.abs(vals)[imax])
    if max_abs < zero_tol:
        verdict = "integrable"
    elif max_abs > nonvanishing_tol:
        verdict = "not-integrable"
    else:
        verdict = "inconclusive"
    return FrobeniusReport(
        max_abs=max_abs,
        argmax=tuple(float(c) for c in pts[imax]),
        verdict=verdict,
        tolerance=zero_tol,
        grid=_grid_data(pts, vals),
    )


@dataclass
class ContactReport:
    min_abs: float
    max_abs: float
    argmin: tuple
    sign_change: bool
    verdict: str
    tolerance: float
    grid: GridData

    def to_dict(self):
        return {
            "min_abs": self.min_abs,
            "max_abs": self.max_abs,
            "argmin": list(self.argmin),
            "sign_change": self.sign_change,
            "verdict": self.verdict,
            "tolerance": self.tolerance,
        }


def contact_test(alpha: OneForm, shape=(128, 128, 64), zero_tol=1e-10, nonvanishing_tol=1e-6):
    """Contact verdict: the Frobenius coefficient must be bounded away from
    zero with a single sign over the grid."""
    coeff = frobenius_form(alpha).c
    pts, _ = _collapsed_grid(shape, [coeff])
    vals = np.atleast_1d(coeff(pts))
    imin = np.unravel_index(np.argmin(np.abs(vals)), vals.shape)
    min_abs = float(np.abs(vals)[imin])
    max_abs = float(np.max(np.abs(vals)))
    sign_change = bool(np.min(vals) < 0.0 < np.max(vals))
    if min_abs > nonvanishing_tol and not sign_change:
        verdict = "contact"
    elif min_abs < zero_tol or sign_change:
        verdict = "not-contact"
    else:
        verdict = "inconclusive"
    return ContactReport(
        min_abs=min_abs,
        max_abs=max_abs,
        argmin=tuple(float(c) for c in pts[imin]),
        sign_change=sign_change,
        verdict=verdict,
        tolerance=nonvanishing_tol,
        grid=_grid_data(pts, vals),
    )


# ----------------------------------------------------------------------
# pointwise operations


def two_form_matrix(omega: TwoForm, p):
    """d(alpha) at a point as an antisymmetric matrix in the (x, y, t) basis."""
    p = np.asarray(p, dtype=float)
    P, Q, R = float(omega.c_xy(p)), float(omega.c_xt(p)), float(omega.c_yt(p))
    return np.array([[0.0, P, Q], [-P, 0.0, R], [-Q, -R, 0.0]])


def reeb_field(alpha: OneForm, p, tol=1e-8):
    """The Reeb vector at p: alpha(R) = 1 and d(alpha)(R, .) = 0.

    Solves the 3x3 system built from alpha_p and a basis pair of ker(alpha_p);
    raises if the form is not contact at p.
    """
    p = np.asarray(p, dtype=float)
    a = alpha.at(p)
    da = two_form_matrix(exterior_derivative(alpha), p)
    # orthogonal basis of ker(alpha_p)
    basis = np.eye(3)
    e1 = basis[int(np.argmin(np.abs(a)))]
    e1 = e1 - (e1 @ a) / (a @ a) * a
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(a, e1)
    e2 /= np.linalg.norm(e2)
    system = np.vstack([a, e1 @ da, e2 @ da])
    rhs = np.array([1.0, 0.0, 0.0])
    if abs(np.linalg.det(system)) < tol:
        raise ValueError(f"form is not contact at {tuple(p)}")
    return np.linalg.solve(system, rhs)


def reeb_residuals(alpha: OneForm, p, r):
    """(|alpha(R) - 1|, max |d(alpha)(R, e_i)|) at p for a candidate Reeb R."""
    p = np.asarray(p, dtype=float)
    a = alpha.at(p)
    da = two_form_matrix(exterior_derivative(alpha), p)
    return abs(float(a @ r) - 1.0), float(np.max(np.abs(r @ da)))


def pullback_covector(F: SkewProduct, alpha: OneForm, pts):
    """(F* alpha) at points, using the exact DF = [[A, 0], [dgamma, 1]]."""
    pts = np.asarray(pts, dtype=float)
    base = pts[..., :2]
    fp = F.apply(pts)
    ax, ay, vt = alpha.a_x(fp), alpha.a_y(fp), alpha.v_t(fp)
    dg = F.dgamma(base)
    A = F.base.matrix
    out_x = ax * A[0, 0] + ay * A[1, 0] + vt * dg[..., 0]
    out_y = ax * A[0, 1] + ay * A[1, 1] + vt * dg[..., 1]
    return np.stack([out_x, out_y, vt], axis=-1)


def invariant_form_residual(F: SkewProduct, alpha: OneForm, shape=(128, 128, 64)):
    """Max pointwise component of F* alpha - alpha over the grid."""
    fields = [alpha.a_x, alpha.a_y, alpha.v_t]
    pts, _ = _collapsed_grid(shape, fields)
    res = pullback_covector(F, alpha, pts) - alpha.at(pts)
    return float(np.max(np.abs(res)))


@dataclass
class ConformalResidual:
    """Fitted multiplier in F* alpha = lambda alpha and its residual."""

    lam_min: float
    lam_max: float
    positive: bool
    max_residual: float

    def to_dict(self):
        return {
            "lam_min": self.lam_min,
            "lam_max": self.lam_max,
            "positive": self.positive,
            "max_residual": self.max_residual,
        }


@dataclass
class TransportIdentityReport:
    max_residual: float
    conformal: ConformalResidual
    tolerance: float
    verdict: str

    def to_dict(self):
        return {
            "max_residual": self.max_residual,
            "conformal": self.conformal.to_dict(),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


def transport_identity_check(F: SkewProduct, alpha: OneForm, shape=(128, 128, 64),
                  zero_tol=1e-10, transversality_tol=1e-8):
    """Residual of the invariance identity for the normalized base part.

    For phi_t = t + gamma the identity reads
    F*(beta_t / v_t) - beta_t / v_t = -d(gamma); the multiplier is fitted
    pointwise from lam v_t = v_t o F and checked for positivity.
    """
    fields = [alpha.a_x, alpha.a_y, alpha.v_t] + [g for g in F._dgamma]
    pts, _ = _collapsed_grid(shape, [f if f.dim == 3 else f.promote(3, (0, 1)) for f in fields])
    base = pts[..., :2]
    fp = F.apply(pts)
    vt = alpha.v_t(pts)
    if np.min(np.abs(vt)) < transversality_tol:
        raise ValueError("form is not transversal to the fibers on the grid")
    vt_f = alpha.v_t(fp)
    bx, by = alpha.a_x(pts) / vt, alpha.a_y(pts) / vt
    bxf, byf = alpha.a_x(fp) / vt_f, alpha.a_y(fp) / vt_f
    dg = F.dgamma(base)
    A = F.base.matrix
    # F* of the base covector (b_x, b_y, 0)
    pb_x = bxf * A[0, 0] + byf * A[1, 0]
    pb_y = bxf * A[0, 1] + byf * A[1, 1]
    res_x = pb_x - bx + dg[..., 0]
    res_y = pb_y - by + dg[..., 1]
    max_res = float(max(np.max(np.abs(res_x)), np.max(np.abs(res_y))))

    lam = vt_f / vt
    pb = pullback_covector(F, alpha, pts)
    conf_res = pb - lam[..., None] * alpha.at(pts)
    conformal = ConformalResidual(
        lam_min=float(np.min(lam)),
        lam_max=float(np.max(lam)),
        positive=bool(np.min(lam) > 0.0),
        max_residual=float(np.max(np.abs(conf_res))),
    )
    verdict = "invariant" if max_res < zero_tol else "not-invariant"
    return TransportIdentityReport(
        max_residual=max_res, conformal=conformal, tolerance=zero_tol, verdict=verdict
    )
