"""Shared fixtures and small random-field helpers."""

import numpy as np
import pytest

from skewlab.fields import TrigField
from skewlab.torus import SkewProduct, cat_map


def random_field(rng, dim=2, nterms=4, kmax=3, amp=0.2):
    """Random real trig polynomial with a handful of low frequencies."""
    f = TrigField.zero(dim)
    for _ in range(nterms):
        k = tuple(int(v) for v in rng.integers(-kmax, kmax + 1, size=dim))
        if k == (0,) * dim:
            continue
        f = f + TrigField.harmonic(
            dim, k, cos=float(rng.uniform(-amp, amp)), sin=float(rng.uniform(-amp, amp))
        )
    return f


@pytest.fixture(scope="session")
def cat():
    return cat_map()


@pytest.fixture(scope="session")
def mu_example():
    """The transfer map mu = 0.1 sin(2 pi x)."""
    return TrigField.harmonic(2, (1, 0), sin=0.1)


@pytest.fixture(scope="session")
def coboundary_skew(cat, mu_example):
    """Skew-product whose cocycle is the coboundary of mu_example."""
    gamma = mu_example.compose_linear(cat.imatrix) - mu_example
    return SkewProduct(cat, gamma)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260824)
