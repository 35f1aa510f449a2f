"""Invariant splitting of the skew-product and the joint-bundle 1-form.

The fiber slopes of E^s and E^u over the base eigendirections are computed
as explicit geometric series of exact trig-polynomial terms; a pointwise
tangent-vector iteration is kept as an independent cross-oracle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import TrigField, circle_dist, wrap
from .torus import SkewProduct


@dataclass
class FiberCorrection:
    """Slope field c_delta of E^delta over the base eigendirection e_delta."""

    direction: str
    order: int
    field: TrigField
    error_bound: float
    eigenvalue: float
    eigenvector: np.ndarray


def fiber_correction(F: SkewProduct, direction, order, max_coeffs=1_000_000):
    """Truncated series solution of the slope invariance recurrence.

    The derivative DF(x,t)(v,s) = (Av, dgamma_x(v) + s) forces
    lam * c(f x) = dgamma_x(e) + c(x); solving toward the attracting side
    gives c_u(x) = sum_{j>=1} lam_u^-j dgamma_{f^-j x}(e_u) and
    c_s(x) = -sum_{j>=0} lam_s^j dgamma_{f^j x}(e_s).  Every term is a trig
    polynomial, so the truncation at `order` is exact.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    lam_s, e_s, lam_u, e_u = F.base.splitting()
    if direction == "u":
        lam, e = lam_u, e_u
        mat = F.base.power_matrix(-1)
        weights = [lam ** (-j) for j in range(1, order + 1)]
    elif direction == "s":
        lam, e = lam_s, e_s
        mat = F.base.power_matrix(1)
        weights = [-(lam ** j) for j in range(order)]
    else:
        raise ValueError(f"unknown direction {direction!r}")

    dge = F.gamma.directional(e)
    total = TrigField.zero(F.base.dim)
    term = dge if direction == "s" else dge.compose_linear(mat)
    ncoeff = 0
    for j, w in enumerate(weights):
        total = total + term * w
        ncoeff += len(term.coeffs)
        if ncoeff > max_coeffs:
            raise OverflowError(
                f"frequency support exceeded {max_coeffs} coefficients at term {j}"
            )
        term = term.compose_linear(mat)

    # Coefficients below the double-precision noise floor cannot influence
    # any evaluation but sit at enormous frequencies, where differentiation
    # would amplify them into spurious O(1) terms.  Drop them and charge the
    # removed mass (plus a roundoff allowance) to the certified bound.
    raw_l1 = total.l1()
    total, dropped = total.prune(1e-14 * max(raw_l1, 1.0))

    growth = abs(lam_u)  # = 1/|lam_s| since |det A| = 1
    bound = (
        dge.l1() * growth / (growth - 1.0) * growth ** (-order)
        + dropped
        + 128.0 * np.finfo(float).eps * max(raw_l1, dge.l1())
    )
    return FiberCorrection(
        direction=direction,
        order=order,
        field=total,
        error_bound=bound,
        eigenvalue=lam,
        eigenvector=np.asarray(e, dtype=float),
    )


def recurrence_residual(F: SkewProduct, corr: FiberCorrection, pts):
    """Pointwise residual |lam c(f x) - dgamma_x(e) - c(x)| of the recurrence."""
    pts = np.asarray(pts, dtype=float)
    dge = F.gamma.directional(corr.eigenvector)
    res = corr.eigenvalue * corr.field(F.base.apply(pts)) - dge(pts) - corr.field(pts)
    return np.abs(res)


def slope_by_iteration(F: SkewProduct, direction, x, order):
    """Cross-oracle: fiber slope from pushing tangent vectors along the orbit.

    Independent of the series route: iterates DF (resp. DF^-1) on an actual
    tangent pair and reads the slope off the normalized result.
    """
    x = np.asarray(x, dtype=float)
    lam_s, e_s, lam_u, e_u = F.base.splitting()
    if direction == "u":
        # push (e_u, 0) forward from f^-order(x) up to x
        orbit = [x]
        finv = F.base.inverse()
        for _ in range(order):
            orbit.append(finv.apply(orbit[-1]))
        orbit.reverse()  # f^-order(x), ..., x
        v = np.array(e_u, dtype=float)
        s = 0.0
        for p in orbit[:-1]:
            s = float(F.dgamma(p) @ v) + s
            v = F.base.matrix @ v
            rho = np.linalg.norm(v)
            v /= rho
            s /= rho
        return s / float(v @ e_u)
    if direction == "s":
        # pull (e_s, 0) back from f^order(x) down to x
        orbit = [x]
        for _ in range(order):
            orbit.append(F.base.apply(orbit[-1]))
        v = np.array(e_s, dtype=float)
        s = 0.0
        inv = np.linalg.inv(F.base.matrix)
        for p in reversed(orbit[:-1]):
            v = inv @ v
            s = s - float(F.dgamma(p) @ v)
            rho = np.linalg.norm(v)
            v /= rho
            s /= rho
        return s / float(v @ e_s)
    raise ValueError(f"unknown direction {direction!r}")


def joint_bundle_form(c_s: FiberCorrection, c_u: FiberCorrection):
    """Defining 1-form of E^s + E^u: alpha = dt - a dx - b dy.

    (a, b) is the unique covector with (a, b) . e_delta = c_delta, so
    ker(alpha) contains both slope frames and alpha(d/dt) = 1.
    """
    from .forms import OneForm  # local import to avoid a cycle

    if {c_s.direction, c_u.direction} != {"s", "u"}:
        raise ValueError("need one stable and one unstable correction")
    if c_s.direction == "u":
        c_s, c_u = c_u, c_s
    E = np.array([c_s.eigenvector, c_u.eigenvector], dtype=float)
    if abs(np.linalg.det(E)) < 1e-12:
        raise ValueError("eigenvectors are numerically collinear")
    M = np.linalg.inv(E)
    a = c_s.field * M[0, 0] + c_u.field * M[0, 1]
    b = c_s.field * M[1, 0] + c_u.field * M[1, 1]
    dim = c_s.field.dim + 1
    axes = tuple(range(c_s.field.dim))
    return OneForm(
        a_x=(-a).promote(dim, axes),
        a_y=(-b).promote(dim, axes),
        v_t=TrigField.constant(dim, 1.0),
    )


@dataclass
class GraphLeaf:
    """Leaf A_theta = {(x, theta + mu(x))} of the invariant graph foliation."""

    theta: float
    mu: TrigField


def leaf_invariance_check(F: SkewProduct, leaf: GraphLeaf, samples, seed=0):
    """Max circle distance between F(leaf) and the leaf over random samples."""
    rng = np.random.default_rng(seed)
    x = rng.random((samples, F.base.dim))
    t_image = wrap(leaf.theta + leaf.mu(x) + F.gamma(x))
    t_leaf = wrap(leaf.theta + leaf.mu(F.base.apply(x)))
    return float(np.max(circle_dist(t_image, t_leaf)))


def graph_tangency_check(alpha, mu: TrigField, grid=256, transversality_tol=1e-8):
    """Max of alpha on the tangent frame of graph(mu) over a grid.

    The frame is {(d/dx, dmu/dx), (d/dy, dmu/dy)} at (x, mu(x)); a zero
    maximum certifies that ker(alpha) is tangent to the graph.
    """
    axes = [np.linspace(0.0, 1.0, grid, endpoint=False)] * 2
    xg, yg = np.meshgrid(*axes, indexing="ij")
    base = np.stack([xg, yg], axis=-1)
    pts = np.concatenate([base, wrap(mu(base))[..., None]], axis=-1)
    vt = alpha.v_t(pts)
    if np.min(np.abs(vt)) < transversality_tol:
        raise ValueError("form is not transversal to the fibers on the grid")
    res_x = alpha.a_x(pts) + vt * mu.derivative(0)(base)
    res_y = alpha.a_y(pts) + vt * mu.derivative(1)(base)
    return float(max(np.max(np.abs(res_x)), np.max(np.abs(res_y))))
