"""Characteristic foliations on graph surfaces S = graph(h) in T^2 x S^1.

The characteristic vector field of a plane field ker(alpha) on S is the
solution of iota_X omega = i_S* alpha with the chart area form
omega = dx^dy; its divergence at the singular points decides the contact
verdict (nonvanishing divergence at every zero is necessary for a contact
structure inducing the foliation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import TrigField, circle_dist, wrap
from .forms import OneForm


@dataclass(frozen=True)
class SurfaceGraph:
    """Surface {(x, y, h(x, y))}, transversal to the fibers by construction."""

    h: TrigField

    def __post_init__(self):
        if self.h.dim != 2:
            raise ValueError("surface height must be a field on the base torus")


@dataclass(frozen=True)
class PlanarVectorField:
    """Chart representative (X1, X2) of a line field, up to positive rescaling."""

    X1: TrigField
    X2: TrigField

    def at(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.stack([self.X1(pts), self.X2(pts)], axis=-1)


def pullback_to_surface(alpha: OneForm, S: SurfaceGraph):
    """i_S* alpha as a pair of base-torus coefficient fields (dx, dy).

    Exact only for t-independent coefficients (the invariant-form pipeline
    always lands there); substituting t = h(x, y) into a t-dependent
    coefficient would leave the trig-polynomial class.
    """
    if not alpha.t_independent():
        raise ValueError("surface restriction requires t-independent coefficients")

    def demote(f):
        return TrigField(2, {k[:2]: c for k, c in f.coeffs.items()})

    ax, ay, vt = demote(alpha.a_x), demote(alpha.a_y), demote(alpha.v_t)
    return ax + vt * S.h.derivative(0), ay + vt * S.h.derivative(1)


def characteristic_field(alpha: OneForm, S: SurfaceGraph) -> PlanarVectorField:
    """Solve iota_X (dx^dy) = i_S* alpha for the characteristic field.

    iota_X(dx^dy) = X1 dy - X2 dx, so X1 is the dy-coefficient and X2 the
    negated dx-coefficient of the restricted form.  For alpha = dt - d(mu)
    this gives X = (d(h-mu)/dy, -d(h-mu)/dx), a Hamiltonian field.
    """
    cx, cy = pullback_to_surface(alpha, S)
    return PlanarVectorField(X1=cy, X2=-cx)


def hamiltonian_form_check(X: PlanarVectorField, H: TrigField):
    """Sup-norm bound of X + J0 grad(H); zero certifies X = -J0 grad(H).

    J0 is the rotation by +pi/2 of the standard compatible triple
    (dx^dy, euclidean metric, J0).
    """
    r1 = X.X1 - H.derivative(1)   # (J0 grad H)_1 = -dH/dy
    r2 = X.X2 + H.derivative(0)   # (J0 grad H)_2 =  dH/dx
    return max(r1.l1(), r2.l1())


def divergence(X: PlanarVectorField) -> TrigField:
    """d/dx X1 + d/dy X2, the omega-divergence for omega = dx^dy."""
    return X.X1.derivative(0) + X.X2.derivative(1)


@dataclass
class SingularPointRecord:
    location: tuple
    divergence: float
    classification: str  # sign of det(DX): elliptic / hyperbolic / degenerate

    def to_dict(self):
        return {
            "location": list(self.location),
            "divergence": self.divergence,
            "classification": self.classification,
        }


def singular_points(X: PlanarVectorField, seeds=64, newton_steps=40,
                    zero_tol=1e-11, dedup_tol=1e-6, degenerate_tol=1e-8):
    """Zeros of X from Newton iteration on a grid of seeds.

    Non-converging seeds are dropped; zeros are deduplicated by circle
    distance and returned in lexicographic order, each carrying the local
    divergence and a det(DX)-based classification.
    """
    J = [[X.X1.derivative(0), X.X1.derivative(1)],
         [X.X2.derivative(0), X.X2.derivative(1)]]
    div = divergence(X)

    axes = np.linspace(0.0, 1.0, seeds, endpoint=False)
    gx, gy = np.meshgrid(axes, axes, indexing="ij")
    p = np.stack([gx.ravel(), gy.ravel()], axis=-1)

    for _ in range(newton_steps):
        v = X.at(p)
        j11, j12 = J[0][0](p), J[0][1](p)
        j21, j22 = J[1][0](p), J[1][1](p)
        det = j11 * j22 - j12 * j21
        safe = np.abs(det) > 1e-14
        det = np.where(safe, det, 1.0)
        dx = (j22 * v[..., 0] - j12 * v[..., 1]) / det
        dy = (-j21 * v[..., 0] + j11 * v[..., 1]) / det
        step = np.stack([dx, dy], axis=-1)
        # damp wild steps so seeds stay in their own basin
        norm = np.linalg.norm(step, axis=-1, keepdims=True)
        step = np.where(norm > 0.25, step * (0.25 / np.maximum(norm, 1e-300)), step)
        p = wrap(p - np.where(safe[..., None], step, 0.0))

    v = X.at(p)
    ok = np.max(np.abs(v), axis=-1) < zero_tol
    zeros = p[ok]

    records = []
    taken = []
    for z in sorted(map(tuple, zeros)):
        if any(np.max(circle_dist(z, w)) < dedup_tol for w in taken):
            continue
        taken.append(z)
        za = np.asarray(z)
        jac = np.array([[float(J[0][0](za)), float(J[0][1](za))],
                        [float(J[1][0](za)), float(J[1][1](za))]])
        d = float(np.linalg.det(jac))
        if abs(d) <= degenerate_tol:
            cls = "degenerate"
        else:
            cls = "elliptic" if d > 0 else "hyperbolic"
        records.append(
            SingularPointRecord(
                location=(float(z[0]), float(z[1])),
                divergence=float(div(za)),
                classification=cls,
            )
        )
    return records


@dataclass
class CharFolVerdict:
    verdict: str
    violating: SingularPointRecord | None
    vacuous: bool
    tolerance: float

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "violating": self.violating.to_dict() if self.violating else None,
            "vacuous": self.vacuous,
            "tolerance": self.tolerance,
        }


def contact_verdict(records, X: PlanarVectorField | None = None, tol=1e-8):
    """Divergence criterion at the singular points.

    Compatible with a contact structure iff every singular point carries
    nonvanishing divergence; an empty record list is conclusive only for a
    nowhere-zero constant field (flagged as vacuous).
    """
    if not records:
        if X is not None and X.X1.is_constant() and X.X2.is_constant() and not (
            X.X1.is_zero() and X.X2.is_zero()
        ):
            return CharFolVerdict(
                verdict="compatible-with-contact", violating=None, vacuous=True, tolerance=tol
            )
        return CharFolVerdict(
            verdict="inconclusive -- refine seeds", violating=None, vacuous=False, tolerance=tol
        )
    for rec in records:
        if abs(rec.divergence) <= tol:
            return CharFolVerdict(verdict="not-contact", violating=rec, vacuous=False, tolerance=tol)
    return CharFolVerdict(
        verdict="compatible-with-contact", violating=None, vacuous=False, tolerance=tol
    )
