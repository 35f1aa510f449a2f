"""Hyperbolic toral automorphisms, exact periodic points, skew-products."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .fields import TrigField, wrap


class NotHyperbolicError(ValueError):
    """Raised when a matrix has an eigenvalue of modulus one."""


# ----------------------------------------------------------------------
# exact integer matrix helpers (arbitrary precision; numpy would overflow
# on powers like A^50)

def imat_mul(a, b):
    n = len(a)
    return [
        [sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]


def imat_identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def imat_pow(a, m):
    if m < 0:
        raise ValueError("use imat_inv for negative powers")
    out = imat_identity(len(a))
    base = [list(r) for r in a]
    while m:
        if m & 1:
            out = imat_mul(out, base)
        base = imat_mul(base, base)
        m >>= 1
    return out


def imat_det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    det = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        det += (-1) ** j * a[0][j] * imat_det(minor)
    return det


def imat_inv_unimodular(a):
    """Exact inverse of an integer matrix with determinant +-1."""
    d = imat_det(a)
    if abs(d) != 1:
        raise ValueError("matrix is not unimodular")
    n = len(a)
    if n == 2:
        return [[a[1][1] * d, -a[0][1] * d], [-a[1][0] * d, a[0][0] * d]]
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [r[:i] + r[i + 1:] for k, r in enumerate(a) if k != j]
            row.append((-1) ** (i + j) * imat_det(minor) * d)
        inv.append(row)
    return inv


def smith_diagonal(b):
    """Diagonalize an integer matrix by unimodular row/column operations.

    Returns (d, V) where d are the diagonal entries of D = U B V for some
    unimodular U (not tracked) and V collects the column operations.
    """
    n = len(b)
    m = [list(r) for r in b]
    v = imat_identity(n)

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_col(dst, src, q):
        for row in m:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(n):
        while True:
            # bring a nonzero pivot of minimal modulus to (t, t)
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if m[i][j] and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            if j != t:
                swap_cols(t, j)
            if i != t:
                m[t], m[i] = m[i], m[t]
            piv = m[t][t]
            done = True
            for j in range(t + 1, n):
                q = -(m[t][j] // piv)
                if m[t][j] % piv:
                    done = False
                addmul_col(j, t, q)
            for i in range(t + 1, n):
                q = -(m[i][t] // piv)
                if m[i][t] % piv:
                    done = False
                for j in range(n):
                    m[i][j] += q * m[t][j]
            if done and all(m[t][j] == 0 for j in range(t + 1, n)) and all(
                m[i][t] == 0 for i in range(t + 1, n)
            ):
                break
    return [m[i][i] for i in range(n)], v


# ----------------------------------------------------------------------


class ToralAutomorphism:
    """Integer matrix acting on T^n; requires |det| = 1 and hyperbolicity."""

    def __init__(self, matrix):
        rows = [tuple(int(v) for v in row) for row in matrix]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.imatrix = rows
        self.matrix = np.array(rows, dtype=float)
        self.dim = n
        self.det = imat_det(rows)
        if abs(self.det) != 1:
            raise ValueError(f"|det| = {abs(self.det)} != 1: not a torus diffeomorphism")
        self.orientation_reversing = self.det == -1

        vals, vecs = np.linalg.eig(self.matrix)
        for lam in vals:
            if abs(abs(lam) - 1.0) < 1e-9:
                raise NotHyperbolicError(f"eigenvalue {lam} has modulus one")
        order = np.argsort(np.abs(vals))
        vals = np.real_if_close(vals[order])
        vecs = np.real_if_close(vecs[:, order])
        if np.iscomplexobj(vals):
            raise NotHyperbolicError("complex eigenvalues of modulus != 1 cannot occur for |det|=1")

        def unit(v):
            v = np.real(v) / np.linalg.norm(np.real(v))
            # sign convention: first nonzero coordinate positive
            for c in v:
                if abs(c) > 1e-12:
                    return v if c > 0 else -v
            return v

        self.lam_s = float(vals[0])
        self.lam_u = float(vals[-1])
        self.e_s = unit(vecs[:, 0])
        self.e_u = unit(vecs[:, -1])

    def splitting(self):
        """(lam_s, e_s, lam_u, e_u) with |lam_s| < 1 < |lam_u|."""
        return self.lam_s, self.e_s, self.lam_u, self.e_u

    # ------------------------------------------------------------------

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        return wrap(pts @ self.matrix.T)

    def apply_exact(self, point):
        """Apply to a tuple of Fractions, reducing mod 1 exactly."""
        return tuple(
            sum(Fraction(self.imatrix[i][j]) * point[j] for j in range(self.dim)) % 1
            for i in range(self.dim)
        )

    def inverse(self):
        return ToralAutomorphism(imat_inv_unimodular(self.imatrix))

    def power_matrix(self, m):
        """Exact integer matrix of f^m (m may be negative)."""
        if m >= 0:
            return imat_pow(self.imatrix, m)
        return imat_pow(imat_inv_unimodular(self.imatrix), -m)

    # ------------------------------------------------------------------

    def periodic_point_count(self, m):
        b = imat_pow(self.imatrix, m)
        for i in range(self.dim):
            b[i][i] -= 1
        return abs(imat_det(b))

    def periodic_points(self, m):
        """All x with f^m(x) = x, as tuples of Fractions in [0, 1).

        Solves (A^m - I) x in Z^n by Smith reduction; the count always
        equals |det(A^m - I)|.
        """
        if m < 1:
            raise ValueError("period must be >= 1")
        b = imat_pow(self.imatrix, m)
        for i in range(self.dim):
            b[i][i] -= 1
        if imat_det(b) == 0:
            raise NotHyperbolicError(f"A^{m} - I is singular")
        d, v = smith_diagonal(b)
        d = [abs(x) for x in d]
        pts = []

        def rec(i, y):
            if i == self.dim:
                x = tuple(
                    sum(Fraction(v[r][c]) * y[c] for c in range(self.dim)) % 1
                    for r in range(self.dim)
                )
                pts.append(x)
                return
            for a in range(d[i]):
                rec(i + 1, y + [Fraction(a, d[i])])

        rec(0, [])
        assert len(set(pts)) == abs(np.prod(d, dtype=object))
        return sorted(set(pts))

    def periodic_orbits(self, m_max):
        """Orbits of period <= m_max, each a list of exact points.

        Returns a sorted list of (least_period, orbit) pairs, one entry per
        orbit (not per point).
        """
        seen = set()
        orbits = []
        for m in range(1, m_max + 1):
            for p in self.periodic_points(m):
                if p in seen:
                    continue
                orbit = [p]
                seen.add(p)
                q = self.apply_exact(p)
                while q != p:
                    orbit.append(q)
                    seen.add(q)
                    q = self.apply_exact(q)
                orbits.append((len(orbit), orbit))
        orbits.sort(key=lambda t: (t[0], t[1][0]))
        return orbits


def cat_map():
    """Arnold's cat map [[2, 1], [1, 1]], the standard hyperbolic example."""
    return ToralAutomorphism([[2, 1], [1, 1]])


# ----------------------------------------------------------------------


class SkewProduct:
    """F(x, t) = (f(x), t + gamma(x) mod 1) on T^2 x S^1.

    gamma is the real lift of a null-homotopic circle map, kept as a
    trigonometric polynomial so every identity downstream is exact.
    """

    def __init__(self, base: ToralAutomorphism, gamma: TrigField):
        if gamma.dim != base.dim:
            raise ValueError("gamma must live on the base torus")
        self.base = base
        self.gamma = gamma
        self._dgamma = tuple(gamma.derivative(j) for j in range(base.dim))

    def apply(self, pts):
        pts = np.asarray(pts, dtype=float)
        base = self.base.apply(pts[..., :-1])
        t = wrap(pts[..., -1] + self.gamma(pts[..., :-1]))
        return np.concatenate([base, t[..., None]], axis=-1)

    def dgamma(self, base_pts):
        """Covector d(gamma) at base points; shape (..., base dim)."""
        base_pts = np.asarray(base_pts, dtype=float)
        return np.stack([g(base_pts) for g in self._dgamma], axis=-1)
