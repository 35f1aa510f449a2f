"""Livsic machinery: Birkhoff sums, obstruction certificates, Fourier solver.

The cohomological equation mu o f - mu = gamma is solved exactly within the
trigonometric-polynomial class by telescoping along the A^T-orbits of the
frequency lattice.  When no finite-support solution exists the solver
returns explicit witnesses instead of truncating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .fields import TrigField
from .torus import ToralAutomorphism, imat_inv_unimodular


def _reduce_mod1(v):
    """Reduce a real number to the fundamental domain (-1/2, 1/2]."""
    return v - math.floor(v + 0.5)


def birkhoff_sum(gamma: TrigField, f: ToralAutomorphism, x, k):
    """Sum of gamma over the first k points of the orbit of x.

    Accepts either float coordinates or a tuple of Fractions; exact points
    are iterated exactly, which matters on long orbits of a hyperbolic map.
    """
    if k < 1:
        raise ValueError("need at least one step")
    exact = isinstance(x, tuple) and x and isinstance(x[0], Fraction)
    total = 0.0
    p = x
    for _ in range(k):
        total += float(gamma(np.asarray(p, dtype=float)))
        p = f.apply_exact(p) if exact else tuple(f.apply(np.asarray(p, dtype=float)))
    return total


@dataclass
class ObstructionEntry:
    period: int
    representative: tuple
    value: float  # Birkhoff sum reduced to (-1/2, 1/2]


@dataclass
class ObstructionReport:
    block: int
    tolerance: float
    entries: list
    verdict: str
    worst: float

    def to_dict(self):
        return {
            "block": self.block,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "worst": self.worst,
            "entries": [
                {
                    "period": e.period,
                    "representative": list(e.representative),
                    "value": e.value,
                }
                for e in self.entries
            ],
        }


def livsic_obstruction(gamma, f, m_max, k=1, tol=1e-10):
    """Periodic-orbit obstruction certificate for the block cocycle.

    For each f-orbit of period m <= m_max the entry is the Birkhoff sum of
    the block cocycle gamma_k over the f^k-orbit, i.e. the sum of gamma
    along the first m*k steps, reduced mod 1.  A coboundary yields all
    entries zero; any nonzero entry certifies unsolvability.
    """
    if m_max < 1 or k < 1:
        raise ValueError("m_max and k must be >= 1")
    entries = []
    for m, orbit in f.periodic_orbits(m_max):
        x = orbit[0]
        s = birkhoff_sum(gamma, f, x, m * k)
        entries.append(
            ObstructionEntry(
                period=m,
                representative=tuple(float(c) for c in x),
                value=_reduce_mod1(s),
            )
        )
    worst = max((abs(e.value) for e in entries), default=0.0)
    verdict = "all-zero" if worst < tol else "violated"
    return ObstructionReport(block=k, tolerance=tol, entries=entries, verdict=verdict, worst=worst)


def coboundary_from_transfer(mu: TrigField, f: ToralAutomorphism) -> TrigField:
    """The exact coboundary mu o f - mu at the coefficient level."""
    return mu.compose_linear(f.imatrix) - mu


@dataclass
class OrbitWitness:
    kind: str  # "mean" or "orbit"
    frequencies: list = field(default_factory=list)
    total: complex = 0j

    def to_dict(self):
        return {
            "kind": self.kind,
            "frequencies": [list(k) for k in self.frequencies],
            "total": [self.total.real, self.total.imag],
        }


@dataclass
class CohomologySolution:
    transfer: TrigField | None
    witnesses: list
    candidate: TrigField

    @property
    def ok(self):
        return self.transfer is not None


def _orbit_segments(support, at, at_inv, bound):
    """Partition frequency support into A^T-orbit segments.

    Walks each orbit through the ball |k|_inf <= bound; hyperbolicity makes
    the coordinate growth two-sidedly unbounded, so each segment is finite.
    """

    def step(mat, k):
        return tuple(sum(mat[i][j] * k[j] for j in range(len(k))) for i in range(len(k)))

    def norm(k):
        return max(abs(v) for v in k)

    segments = []
    visited = set()
    for k0 in sorted(support):
        if k0 in visited:
            continue
        back = []
        k = step(at_inv, k0)
        while norm(k) <= bound:
            back.append(k)
            k = step(at_inv, k)
        fwd = [k0]
        k = step(at, k0)
        while norm(k) <= bound:
            fwd.append(k)
            k = step(at, k)
        segment = list(reversed(back)) + fwd
        visited.update(segment)
        if any(q in support for q in segment):
            segments.append(segment)
    return segments


def solve_cohomological(gamma: TrigField, f: ToralAutomorphism, tol=1e-12):
    """Solve mu o f - mu = gamma exactly in the trig-polynomial class.

    On each A^T-orbit the coefficient equation mu_{A^T k} - mu_k = gamma_k
    telescopes; a finite-support solution exists iff the full orbit sum
    vanishes and the mean of gamma is an integer.  Returns the mean-zero
    transfer map or the violated witnesses, plus the best-effort candidate
    used by downstream leaf-invariance diagnostics.
    """
    coeffs = gamma.coeffs
    zero = (0,) * gamma.dim
    witnesses = []
    g0 = coeffs.pop(zero, 0j).real
    if abs(g0 - round(g0)) > tol:
        witnesses.append(OrbitWitness(kind="mean", total=complex(g0)))

    support = set(coeffs)
    at = [list(r) for r in zip(*f.imatrix)]  # A^T
    at_inv = imat_inv_unimodular(at)
    radius = max((max(abs(v) for v in k) for k in support), default=0)
    # growth bound: once the orbit leaves this ball it cannot re-enter the
    # support ball (two-exponential norm profile is unimodal)
    evecs = np.column_stack([f.e_s, f.e_u])
    kappa = np.linalg.cond(evecs)
    bound = int(math.ceil(radius * abs(f.lam_u) * kappa * kappa)) + radius + 2

    mu_coeffs = {}
    for segment in _orbit_segments(support, at, at_inv, bound):
        idx = [i for i, q in enumerate(segment) if q in support]
        lo, hi = idx[0], idx[-1]
        total = sum(coeffs.get(q, 0j) for q in segment)
        if abs(total) > tol:
            witnesses.append(
                OrbitWitness(kind="orbit", frequencies=segment[lo:hi + 1], total=total)
            )
        # (mu o f)^ at A^T k is mu^ at k, so the coefficient equation
        # gamma^_{k_j} = mu^_{k_{j-1}} - mu^_{k_j} telescopes downward:
        # mu^ at a position is the suffix sum of gamma^ strictly above it.
        suffix = 0j
        for i in range(hi, lo, -1):
            suffix += coeffs.get(segment[i], 0j)
            mu_coeffs[segment[i - 1]] = mu_coeffs.get(segment[i - 1], 0j) + suffix

    candidate = TrigField(gamma.dim, mu_coeffs)
    transfer = candidate if not witnesses else None
    return CohomologySolution(transfer=transfer, witnesses=witnesses, candidate=candidate)
