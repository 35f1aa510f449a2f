"""Characteristic foliations on graph surfaces and the divergence criterion."""

import numpy as np
import pytest

from skewlab.charfol import (
    PlanarVectorField,
    SurfaceGraph,
    characteristic_field,
    contact_verdict,
    divergence,
    hamiltonian_form_check,
    pullback_to_surface,
    singular_points,
)
from skewlab.fields import TrigField
from skewlab.forms import OneForm, graph_form

from conftest import random_field


def pipeline_field(mu, h):
    return characteristic_field(graph_form(mu), SurfaceGraph(h))


def test_characteristic_field_single_harmonic():
    # H = h - mu = 0.1 sin(2 pi x): X = (dH/dy, -dH/dx) = (0, -0.2 pi cos(2 pi x))
    mu = TrigField.zero(2)
    h = TrigField.harmonic(2, (1, 0), sin=0.1)
    X = pipeline_field(mu, h)
    assert X.X1.is_zero()
    assert (X.X2 - TrigField.harmonic(2, (1, 0), cos=-0.2 * np.pi)).l1() < 1e-14


def test_restriction_solves_area_form_equation(rng):
    """iota_X (dx^dy) = i_S* alpha coefficientwise: X1 = dy part, X2 = -dx part."""
    mu, h = random_field(rng), random_field(rng)
    alpha = graph_form(mu)
    S = SurfaceGraph(h)
    cx, cy = pullback_to_surface(alpha, S)
    X = characteristic_field(alpha, S)
    assert (X.X1 - cy).l1() == 0.0
    assert (X.X2 + cx).l1() == 0.0


def test_restriction_requires_t_independent_coefficients():
    alpha = OneForm(
        a_x=TrigField.harmonic(3, (0, 0, 1), cos=1.0),
        a_y=TrigField.zero(3),
        v_t=TrigField.constant(3, 1.0),
    )
    with pytest.raises(ValueError):
        pullback_to_surface(alpha, SurfaceGraph(TrigField.zero(2)))


def test_hamiltonian_form_check_zero_on_pipeline(rng):
    # exact zero for disjoint supports; last-ulp residue when mu and h share
    # frequencies and the mixed partials are formed in different orders
    mu0 = TrigField.harmonic(2, (1, 0), sin=0.1)
    h0 = TrigField.harmonic(2, (0, 1), cos=0.2)
    assert hamiltonian_form_check(pipeline_field(mu0, h0), h0 - mu0) == 0.0
    for _ in range(20):
        mu, h = random_field(rng), random_field(rng)
        X = pipeline_field(mu, h)
        assert hamiltonian_form_check(X, h - mu) < 1e-13


def test_divergence_exactly_zero_on_pipeline(rng):
    mu0 = TrigField.harmonic(2, (1, 0), sin=0.1)
    h0 = TrigField.harmonic(2, (0, 1), cos=0.2)
    assert divergence(pipeline_field(mu0, h0)).is_zero()
    for _ in range(20):
        mu, h = random_field(rng), random_field(rng)
        assert divergence(pipeline_field(mu, h)).l1() < 1e-13


def test_divergence_of_non_hamiltonian_field():
    X = PlanarVectorField(
        X1=TrigField.harmonic(2, (1, 0), sin=1.0), X2=TrigField.zero(2)
    )
    assert (divergence(X) - TrigField.harmonic(2, (1, 0), cos=2 * np.pi)).l1() < 1e-13


def test_singular_points_of_product_hamiltonian(mu_example):
    # H = 0.2 cos(2 pi y) - 0.1 sin(2 pi x): zeros where both gradients vanish
    h = TrigField.harmonic(2, (0, 1), cos=0.2)
    X = pipeline_field(mu_example, h)
    recs = singular_points(X)
    locs = sorted(r.location for r in recs)
    expect = [(0.25, 0.0), (0.25, 0.5), (0.75, 0.0), (0.75, 0.5)]
    assert len(locs) == 4
    for got, ref in zip(locs, expect):
        assert np.max(np.abs(np.array(got) - ref)) < 1e-9
    kinds = sorted(r.classification for r in recs)
    assert kinds == ["elliptic", "elliptic", "hyperbolic", "hyperbolic"]
    for r in recs:
        assert abs(r.divergence) < 1e-10


def test_rescaling_leaves_line_field_zeros(mu_example):
    h = TrigField.harmonic(2, (0, 1), cos=0.2)
    X = pipeline_field(mu_example, h)
    c = 3.0
    Y = PlanarVectorField(X1=X.X1 * c, X2=X.X2 * c)
    assert sorted(r.location for r in singular_points(Y)) == sorted(
        r.location for r in singular_points(X)
    )


def test_contact_verdict_not_contact_on_pipeline(mu_example):
    h = TrigField.harmonic(2, (0, 1), cos=0.2)
    X = pipeline_field(mu_example, h)
    recs = singular_points(X)
    assert len(recs) >= 2
    v = contact_verdict(recs, X)
    assert v.verdict == "not-contact"
    assert v.violating is not None


def test_contact_verdict_vacuous_for_constant_field():
    X = PlanarVectorField(X1=TrigField.constant(2, 1.0), X2=TrigField.zero(2))
    v = contact_verdict([], X)
    assert v.verdict == "compatible-with-contact"
    assert v.vacuous


def test_contact_verdict_inconclusive_without_records():
    X = PlanarVectorField(
        X1=TrigField.harmonic(2, (1, 0), cos=1.0), X2=TrigField.zero(2)
    )
    v = contact_verdict([], X)
    assert "inconclusive" in v.verdict


def test_contact_verdict_compatible_when_divergence_nonzero():
    from skewlab.charfol import SingularPointRecord

    recs = [SingularPointRecord(location=(0.1, 0.2), divergence=0.5, classification="hyperbolic")]
    assert contact_verdict(recs).verdict == "compatible-with-contact"


def test_surface_graph_rejects_three_dim_height():
    with pytest.raises(ValueError):
        SurfaceGraph(TrigField.zero(3))
