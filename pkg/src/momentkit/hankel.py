"""
Hankel and localized Hankel matrices of moment sequences.

``H(g s)[alpha, beta] = sum_gamma g_gamma s_{alpha + beta + gamma}`` with
rows and columns indexed by a :class:`MonomialBasis`.  The plain Hankel
matrix is the case ``g = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .moments import MomentSequence, evaluation_matrix
from .poly import ConstraintSet, Polynomial, glex_key, monomials

__all__ = [
    "MonomialBasis",
    "HankelMatrix",
    "KernelBasis",
    "build_hankel",
    "psd_check",
    "numeric_rank",
    "hankel_determinants",
    "kernel_polynomials",
    "positivity_profile",
    "localizing_order",
    "dump_matrix",
]

PSD_TOL = 1e-9
RANK_TOL = 1e-8


class MonomialBasis:
    """Ordered set of exponents, always kept in graded-lex order.

    Parameters
    ----------
    dim : int
    alphas : sequence of tuple
        Exponents; they are sorted and checked for duplicates.
    """

    __slots__ = ("dim", "alphas", "_index")

    def __init__(self, dim: int, alphas: Sequence):
        self.dim = int(dim)
        alphas = [tuple(int(a) for a in al) for al in alphas]
        if len(set(alphas)) != len(alphas):
            raise ValueError("duplicate monomials in basis")
        for a in alphas:
            if len(a) != self.dim or min(a, default=0) < 0:
                raise ValueError(f"bad exponent {a}")
        self.alphas = tuple(sorted(alphas, key=glex_key))
        self._index = {a: k for k, a in enumerate(self.alphas)}

    @classmethod
    def full(cls, dim, n):
        """All monomials of degree at most ``n``."""
        return cls(dim, monomials(dim, n))

    def __len__(self):
        return len(self.alphas)

    def __iter__(self):
        return iter(self.alphas)

    def __getitem__(self, k):
        return self.alphas[k]

    def index(self, alpha):
        return self._index[tuple(alpha)]

    def __contains__(self, alpha):
        return tuple(alpha) in self._index

    @property
    def maxdeg(self):
        return max((sum(a) for a in self.alphas), default=-1)

    def evaluate(self, x):
        """The vector ``(x^alpha)_alpha`` at a single point."""
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return evaluation_matrix(x, self.alphas)[0]

    def polynomial(self, coeffs):
        return Polynomial.from_coeffs(coeffs, self.alphas)

    def __eq__(self, other):
        return isinstance(other, MonomialBasis) and self.alphas == other.alphas

    def __hash__(self):
        return hash(self.alphas)

    def __repr__(self):
        return f"MonomialBasis(dim={self.dim}, size={len(self)})"


@dataclass(frozen=True, eq=False)
class HankelMatrix:
    """Symmetric matrix ``H[alpha, beta] = L(g x^{alpha+beta})``."""

    basis: MonomialBasis
    localizer: Polynomial
    data: np.ndarray

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    @property
    def shape(self):
        return self.data.shape

    def quadratic_form(self, p: Polynomial, q: Polynomial | None = None):
        """``p_vec^T H q_vec`` for polynomials in the basis span."""
        u = p.coeff_vector(self.basis.alphas)
        v = u if q is None else q.coeff_vector(self.basis.alphas)
        return float(u @ self.data @ v)


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal coefficient vectors spanning the kernel of a Hankel."""

    basis: MonomialBasis
    vectors: np.ndarray
    tol: float

    @property
    def polys(self):
        return [self.basis.polynomial(v) for v in self.vectors]

    def __len__(self):
        return self.vectors.shape[0]


def _as_basis(s, basis):
    if isinstance(basis, MonomialBasis):
        return basis
    if isinstance(basis, (int, np.integer)):
        return MonomialBasis.full(s.dim, int(basis))
    return MonomialBasis(s.dim, basis)


def build_hankel(s: MomentSequence, basis, g: Polynomial | None = None
                 ) -> HankelMatrix:
    """Hankel matrix of ``s`` localized at ``g`` over ``basis``.

    Parameters
    ----------
    s : MomentSequence
    basis : MonomialBasis or int
        An integer ``n`` stands for all monomials of degree at most ``n``.
    g : Polynomial, optional
        Localizing polynomial, default ``1``.

    Raises
    ------
    ValueError
        If ``s`` does not hold enough moments.
    """
    basis = _as_basis(s, basis)
    if g is None:
        g = Polynomial.constant(s.dim, 1.0)
    if g.dim != s.dim:
        raise ValueError("dimension mismatch")
    need = 2 * basis.maxdeg + int(max(g.degree, 0))
    if not s.available(need):
        raise ValueError(
            f"need moments up to degree {need}, sequence has {s.maxdeg}")
    alphas = np.array(basis.alphas, dtype=int).reshape(len(basis), s.dim)
    gterms = list(g.terms.items())
    cache = {}

    def moment(a):
        v = cache.get(a)
        if v is None:
            v = sum(c * s[tuple(ai + gi for ai, gi in zip(a, gam))]
                    for gam, c in gterms)
            cache[a] = v
        return v

    k = len(basis)
    H = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            H[i, j] = H[j, i] = moment(tuple(alphas[i] + alphas[j]))
    H.setflags(write=False)
    return HankelMatrix(basis, g, H)


def _mat(H):
    return np.asarray(H.data if isinstance(H, HankelMatrix) else H, dtype=float)


def psd_check(H, tol: float = PSD_TOL):
    """Relative positive-semidefiniteness test.

    Returns
    -------
    ok : bool
        ``lambda_min >= -tol * (1 + ||H||_2)``.
    lambda_min : float
    """
    A = _mat(H)
    if A.size == 0:
        return True, math.inf
    w = np.linalg.eigvalsh((A + A.T) / 2)
    norm = max(abs(w[0]), abs(w[-1]))
    return bool(w[0] >= -tol * (1.0 + norm)), float(w[0])


def numeric_rank(H, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol * sigma_max``."""
    A = _mat(H)
    if A.size == 0:
        return 0
    sv = np.linalg.svd(A, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def hankel_determinants(s: MomentSequence, N: int):
    """Determinants ``D_0..D_N`` of the leading 1D Hankel blocks."""
    if s.dim != 1:
        raise ValueError("determinants are defined for 1D sequences")
    if not s.available(2 * N):
        raise ValueError(f"need moments up to degree {2 * N}")
    v = s.values(2 * N)
    out = []
    for n in range(N + 1):
        H = np.array([[v[i + j] for j in range(n + 1)] for i in range(n + 1)])
        out.append(float(np.linalg.det(H)))
    return out


def kernel_polynomials(s: MomentSequence, basis, tol: float = RANK_TOL,
                       g: Polynomial | None = None) -> KernelBasis:
    """Null space of the Hankel matrix as orthonormal coefficient vectors.

    Eigenvalues with modulus at most ``tol * max|lambda|`` count as zero.
    """
    H = build_hankel(s, basis, g)
    A = H.data
    w, V = np.linalg.eigh((A + A.T) / 2)
    scale = np.abs(w).max() if w.size else 0.0
    if scale == 0.0:
        keep = np.ones(len(w), dtype=bool)
    else:
        keep = np.abs(w) <= tol * scale
    vecs = V[:, keep].T
    # fix signs so the leading nonzero entry is positive
    for r in vecs:
        k = np.flatnonzero(np.abs(r) > 1e-12)
        if k.size and r[k[-1]] < 0:
            r *= -1
    return KernelBasis(H.basis, vecs, tol)


def localizing_order(n: int, deg_f) -> int:
    """Largest ``n_j`` with ``2 n_j + deg f <= 2 n`` (negative if none)."""
    d = int(max(deg_f, 0))
    return (2 * n - d) // 2


def positivity_profile(s: MomentSequence, f: ConstraintSet | Sequence, n: int,
                       tol: float = PSD_TOL):
    """PSD test of ``H_n(s)`` and each localized ``H_{n_j}(f_j s)``.

    Returns
    -------
    list of tuple
        ``(label, ok, lambda_min)``; the first entry is the plain Hankel
        matrix, followed by one entry per constraint.
    """
    polys = list(f.polys if isinstance(f, ConstraintSet) else f)
    out = []
    ok, lam = psd_check(build_hankel(s, n), tol)
    out.append(("H", ok, lam))
    for j, fj in enumerate(polys, 1):
        nj = localizing_order(n, fj.degree)
        if nj < 0:
            out.append((f"H(f{j})", True, math.inf))
            continue
        ok, lam = psd_check(build_hankel(s, nj, fj), tol)
        out.append((f"H(f{j})", ok, lam))
    return out


def dump_matrix(H: HankelMatrix, fmt: str = "%.17g") -> str:
    """Dense row-major text dump, basis listed first."""
    lines = ["basis " + " ".join(",".join(map(str, a)) for a in H.basis)]
    for row in H.data:
        lines.append(" ".join(fmt % v for v in row))
    return "\n".join(lines) + "\n"
