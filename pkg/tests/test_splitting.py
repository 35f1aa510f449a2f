"""Fiber corrections, joint-bundle form, graph tangency, leaf invariance."""

import numpy as np
import pytest

from skewlab.cocycles import coboundary_from_transfer, solve_cohomological
from skewlab.fields import TrigField
from skewlab.forms import OneForm, graph_form, grid_points
from skewlab.splitting import (
    GraphLeaf,
    fiber_correction,
    graph_tangency_check,
    joint_bundle_form,
    leaf_invariance_check,
    recurrence_residual,
    slope_by_iteration,
)
from skewlab.torus import SkewProduct, cat_map

from conftest import random_field


def test_zero_cocycle_gives_horizontal_splitting(cat):
    F = SkewProduct(cat, TrigField.zero(2))
    for d in ("s", "u"):
        corr = fiber_correction(F, d, 20)
        assert corr.field.is_zero()
        assert corr.error_bound < 1e-12


def test_coboundary_corrections_equal_graph_slopes(coboundary_skew, mu_example):
    pts = grid_points((256, 256))
    for d in ("s", "u"):
        corr = fiber_correction(coboundary_skew, d, 50)
        ref = mu_example.directional(corr.eigenvector)
        sup = float(np.max(np.abs(corr.field(pts) - ref(pts))))
        assert sup < 1e-10
        assert corr.error_bound > sup


def test_recurrence_residual_decays_geometrically(cat, rng):
    gamma = random_field(rng)
    F = SkewProduct(cat, gamma)
    pts = rng.random((200, 2))
    prev = None
    for order in (6, 8, 10, 12):
        res = float(np.max(recurrence_residual(F, fiber_correction(F, "u", order), pts)))
        if prev is not None:
            ratio = res / prev
            # two extra terms should gain about lam_u^-2 = 0.146
            assert ratio < 0.4
        prev = res


def test_recurrence_residual_small_at_order_50(coboundary_skew, rng):
    pts = rng.random((1000, 2))
    for d in ("s", "u"):
        corr = fiber_correction(coboundary_skew, d, 50)
        assert float(np.max(recurrence_residual(coboundary_skew, corr, pts))) < 1e-10


def test_series_matches_iteration_oracle(cat, rng):
    gamma = random_field(rng)
    F = SkewProduct(cat, gamma)
    cs = fiber_correction(F, "s", 30)
    cu = fiber_correction(F, "u", 30)
    pts = rng.random((100, 2))
    for p in pts:
        assert abs(slope_by_iteration(F, "u", p, 30) - float(cu.field(p))) < 1e-8
        assert abs(slope_by_iteration(F, "s", p, 30) - float(cs.field(p))) < 1e-8


def test_cone_contraction_rate(cat, rng):
    """DF contracts the cone around the unstable frame by at least lam_u / 2.

    In slope coordinates over e_u the contraction factor is exactly lam_u;
    the Euclidean angle ratio approximates it when the slopes are small.
    """
    gamma = random_field(rng, nterms=2, kmax=1, amp=0.02)
    F = SkewProduct(cat, gamma)
    cu = fiber_correction(F, "u", 40)
    e_u = cat.e_u
    for p in rng.random((100, 2)):
        fp = cat.apply(p)

        def push(v):
            return np.array([
                *(cat.matrix @ v[:2]),
                float(F.dgamma(p) @ v[:2]) + v[2],
            ])

        # exact frame maps to the exact frame at f(p)
        exact = np.array([e_u[0], e_u[1], float(cu.field(p))])
        exact_f = np.array([e_u[0], e_u[1], float(cu.field(fp))])
        pushed = push(exact)
        assert np.abs(pushed / cat.lam_u - exact_f).max() < 1e-9

        # slope deviation contracts exactly by lam_u: the base parts of
        # tilted and exact coincide and grow by lam_u, while the fiber gap
        # is carried over unchanged
        tilted = exact + np.array([0.0, 0.0, 0.05])
        dev_before = tilted[2] - exact[2]
        pushed_t = push(tilted)
        slope_after = (pushed_t[2] - pushed[2]) / np.linalg.norm(pushed[:2])
        assert abs(slope_after * cat.lam_u - dev_before) < 1e-9

        # Euclidean angle ratio exceeds lam_u / 2 in the small-slope regime
        def angle(v, w):
            c = v @ w / (np.linalg.norm(v) * np.linalg.norm(w))
            return np.arccos(np.clip(c, -1.0, 1.0))

        before = angle(tilted, exact)
        after = angle(pushed_t, pushed)
        assert before / max(after, 1e-300) > cat.lam_u / 2


def test_joint_form_matches_graph_form(coboundary_skew, mu_example):
    cs = fiber_correction(coboundary_skew, "s", 50)
    cu = fiber_correction(coboundary_skew, "u", 50)
    alpha = joint_bundle_form(cs, cu)
    ref = graph_form(mu_example)
    assert (alpha.a_x - ref.a_x).l1() < 1e-12
    assert (alpha.a_y - ref.a_y).l1() < 1e-12
    assert (alpha.v_t - ref.v_t).l1() == 0.0


def test_joint_form_annihilates_both_frames(cat, rng):
    gamma = random_field(rng)
    F = SkewProduct(cat, gamma)
    cs = fiber_correction(F, "s", 40)
    cu = fiber_correction(F, "u", 40)
    alpha = joint_bundle_form(cs, cu)
    pts = rng.random((100, 2))
    pts3 = np.concatenate([pts, rng.random((100, 1))], axis=-1)
    a = alpha.at(pts3)
    for corr in (cs, cu):
        frame = np.concatenate(
            [np.broadcast_to(corr.eigenvector, (100, 2)), corr.field(pts)[:, None]], axis=-1
        )
        assert np.max(np.abs(np.sum(a * frame, axis=-1))) < 1e-12
    assert np.max(np.abs(a[:, 2] - 1.0)) == 0.0  # alpha(d/dt) = 1


def test_joint_form_requires_both_directions(coboundary_skew):
    cu = fiber_correction(coboundary_skew, "u", 10)
    with pytest.raises(ValueError):
        joint_bundle_form(cu, cu)


def test_graph_tangency_defining_identity(mu_example):
    alpha = graph_form(mu_example)
    assert graph_tangency_check(alpha, mu_example, grid=128) < 1e-14


def test_graph_tangency_joint_form(coboundary_skew, cat):
    gamma = coboundary_skew.gamma
    sol = solve_cohomological(gamma, cat)
    cs = fiber_correction(coboundary_skew, "s", 50)
    cu = fiber_correction(coboundary_skew, "u", 50)
    alpha = joint_bundle_form(cs, cu)
    assert graph_tangency_check(alpha, sol.transfer, grid=256) < 1e-9


def test_graph_tangency_dt_against_sloped_graph(mu_example):
    alpha = OneForm(a_x=TrigField.zero(3), a_y=TrigField.zero(3), v_t=1.0)
    res = graph_tangency_check(alpha, mu_example, grid=256)
    assert res == pytest.approx(0.2 * np.pi, abs=1e-10)


def test_graph_tangency_reports_transversality_failure(mu_example):
    vanishing = OneForm(
        a_x=TrigField.zero(3), a_y=TrigField.zero(3),
        v_t=TrigField.harmonic(3, (0, 0, 1), sin=1.0),  # vanishes on the graph at x = 0
    )
    with pytest.raises(ValueError):
        graph_tangency_check(vanishing, mu_example, grid=16)


def test_leaves_invariant_for_coboundary(coboundary_skew, mu_example):
    worst = 0.0
    for i, theta in enumerate(np.linspace(0.0, 1.0, 16, endpoint=False)):
        leaf = GraphLeaf(theta=float(theta), mu=mu_example)
        worst = max(worst, leaf_invariance_check(coboundary_skew, leaf, 2000, seed=i))
    assert worst < 1e-12


def test_leaves_move_for_obstructed_cocycle(cat):
    gamma = TrigField.constant(2, 0.25) + TrigField.harmonic(2, (1, 0), cos=0.1)
    F = SkewProduct(cat, gamma)
    for theta in np.linspace(0.0, 1.0, 8, endpoint=False):
        leaf = GraphLeaf(theta=float(theta), mu=TrigField.zero(2))
        assert leaf_invariance_check(F, leaf, 2000) > 0.05
