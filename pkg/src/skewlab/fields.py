"""Real trigonometric polynomials on the n-torus with exact calculus.

A field is a finite Fourier series sum_k c_k exp(2*pi*i k.x) with integer
frequency vectors k and the realness constraint c_{-k} = conj(c_k).
Derivatives, products and composition with integer-linear maps stay inside
the class, so the downstream form calculus never needs numerical
differentiation.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def wrap(x):
    """Reduce coordinates to the fundamental domain [0, 1)."""
    return np.asarray(x, dtype=float) % 1.0


def circle_dist(a, b):
    """Elementwise distance on the circle R/Z: min(|d|, 1-|d|)."""
    d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)) % 1.0
    return np.minimum(d, 1.0 - d)


def torus_dist(p, q):
    """Distance on the torus: max of the coordinatewise circle distances."""
    return np.max(circle_dist(p, q), axis=-1)


def _neg(k):
    return tuple(-c for c in k)


class TrigField:
    """Finite real trigonometric polynomial on T^dim."""

    __slots__ = ("dim", "_c")

    def __init__(self, dim, coeffs=None):
        self.dim = int(dim)
        sym = {}
        if coeffs:
            for k, c in coeffs.items():
                k = tuple(int(v) for v in k)
                if len(k) != self.dim:
                    raise ValueError(f"frequency {k} has wrong dimension")
                c = complex(c)
                # enforce realness by averaging with the mirrored coefficient
                half = 0.5 * (c + np.conj(complex(coeffs.get(_neg(k), np.conj(c)))))
                if half != 0:
                    sym[k] = half
        self._c = sym

    @classmethod
    def _raw(cls, dim, coeffs):
        """Internal constructor; assumes conjugate symmetry already holds."""
        f = cls.__new__(cls)
        f.dim = dim
        f._c = {k: c for k, c in coeffs.items() if c != 0}
        return f

    # ------------------------------------------------------------------
    # constructors

    @classmethod
    def zero(cls, dim):
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim, value):
        value = float(value)
        return cls._raw(dim, {(0,) * dim: complex(value)} if value else {})

    @classmethod
    def harmonic(cls, dim, k, cos=0.0, sin=0.0):
        """The field cos*cos(2*pi*k.x) + sin*sin(2*pi*k.x)."""
        k = tuple(int(v) for v in k)
        if len(k) != dim:
            raise ValueError(f"frequency {k} has wrong dimension for T^{dim}")
        if all(v == 0 for v in k):
            return cls.constant(dim, cos)
        c = 0.5 * (cos - 1j * sin)
        return cls._raw(dim, {k: c, _neg(k): np.conj(c)})

    # ------------------------------------------------------------------
    # coefficient access

    @property
    def coeffs(self):
        return dict(self._c)

    def coeff(self, k):
        return self._c.get(tuple(int(v) for v in k), 0j)

    def support(self):
        return set(self._c)

    def support_radius(self):
        if not self._c:
            return 0
        return max(max(abs(v) for v in k) for k in self._c)

    def mean(self):
        return float(np.real(self._c.get((0,) * self.dim, 0j)))

    def l1(self):
        """Sum of coefficient moduli; a certified bound on the sup norm."""
        return float(sum(abs(c) for c in self._c.values()))

    def is_zero(self):
        return not self._c

    def prune(self, tol):
        """Drop coefficients of modulus <= tol, keeping the realness pairing.

        Returns (field, dropped_l1) so callers can fold the removed mass
        into their error accounting.
        """
        kept = {}
        dropped = 0.0
        for k, c in self._c.items():
            if abs(c) > tol:
                kept[k] = c
            else:
                dropped += abs(c)
        return TrigField._raw(self.dim, kept), dropped

    def is_constant(self):
        return all(all(v == 0 for v in k) for k in self._c)

    def depends_on(self, axis):
        return any(k[axis] != 0 for k in self._c)

    # ------------------------------------------------------------------
    # algebra

    def __add__(self, other):
        if np.isscalar(other):
            other = TrigField.constant(self.dim, other)
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out = dict(self._c)
        for k, c in other._c.items():
            out[k] = out.get(k, 0j) + c
        return TrigField._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return TrigField._raw(self.dim, {k: -c for k, c in self._c.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = TrigField.constant(self.dim, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            s = float(other)
            return TrigField._raw(self.dim, {k: c * s for k, c in self._c.items()})
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        out = {}
        for k1, c1 in self._c.items():
            for k2, c2 in other._c.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0j) + c1 * c2
        return TrigField._raw(self.dim, out)

    __rmul__ = __mul__

    # ------------------------------------------------------------------
    # calculus

    def derivative(self, axis):
        """Exact partial derivative along the given coordinate axis."""
        out = {}
        for k, c in self._c.items():
            if k[axis]:
                out[k] = TWO_PI * 1j * k[axis] * c
        return TrigField._raw(self.dim, out)

    def directional(self, vec):
        """Directional derivative along a constant (real) vector field."""
        vec = np.asarray(vec, dtype=float)
        out = {}
        for k, c in self._c.items():
            kv = float(np.dot(np.asarray(k, dtype=float), vec))
            if kv:
                out[k] = TWO_PI * 1j * kv * c
        return TrigField._raw(self.dim, out)

    def compose_linear(self, matrix):
        """The field x -> f(M x) for an integer matrix M; k maps to M^T k."""
        rows = [tuple(int(v) for v in row) for row in matrix]
        out = {}
        for k, c in self._c.items():
            # (M^T k)_j = sum_i M_ij k_i
            kk = tuple(sum(rows[i][j] * k[i] for i in range(self.dim)) for j in range(self.dim))
            out[kk] = out.get(kk, 0j) + c
        return TrigField._raw(self.dim, out)

    def promote(self, dim, axes):
        """Embed into T^dim, placing the current axes at positions `axes`."""
        axes = tuple(int(a) for a in axes)
        if len(axes) != self.dim:
            raise ValueError("need one target axis per current axis")
        out = {}
        for k, c in self._c.items():
            kk = [0] * dim
            for a, v in zip(axes, k):
                kk[a] = v
            out[tuple(kk)] = c
        return TrigField._raw(dim, out)

    # ------------------------------------------------------------------
    # evaluation

    def __call__(self, pts):
        """Evaluate at points of shape (..., dim); returns a real array."""
        pts = np.asarray(pts, dtype=float)
        if pts.shape[-1] != self.dim:
            raise ValueError(f"points must have last dimension {self.dim}")
        out = np.zeros(pts.shape[:-1], dtype=float)
        done = set()
        for k, c in self._c.items():
            if k in done:
                continue
            done.add(k)
            phase = TWO_PI * (pts @ np.asarray(k, dtype=float))
            if all(v == 0 for v in k):
                out += c.real
                continue
            done.add(_neg(k))
            # pair k with -k: c e^{i t} + conj(c) e^{-i t} = 2 Re(c e^{i t})
            out += 2.0 * (c.real * np.cos(phase) - c.imag * np.sin(phase))
        return out if out.shape else float(out)

    # ------------------------------------------------------------------

    def isclose(self, other, tol=0.0):
        return (self - other).l1() <= tol

    def __repr__(self):
        return f"TrigField(dim={self.dim}, nterms={len(self._c)}, l1={self.l1():.3g})"
