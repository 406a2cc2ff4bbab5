"""
Sparse multivariate polynomials over the reals.

A polynomial is an immutable map from exponent tuples (multi-indices) to
nonzero float coefficients.  All matrix indexing in the package uses the
graded lexicographic order provided by :func:`monomials` and
:func:`glex_key`.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

__all__ = [
    "Polynomial",
    "ConstraintSet",
    "glex_key",
    "monomials",
    "variables",
    "poly_eval",
    "poly_mul",
    "poly_add",
    "poly_scale",
    "homogeneous_part",
    "motzkin",
    "robinson",
    "robinson_zeros",
]

MultiIndex = tuple


def glex_key(alpha):
    """Sort key for the graded lexicographic order.

    Monomials are ordered by total degree first; within a degree,
    ``x_1`` powers come first, so in two variables the degree-2 block
    reads ``x1^2, x1 x2, x2^2``.
    """
    return (sum(alpha), tuple(-a for a in alpha))


def _compositions(total, dim):
    # descending-lex compositions of `total` into `dim` nonnegative parts
    if dim == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, dim - 1):
            yield (first,) + rest


def monomials(dim, n, mindeg=0):
    """All exponents of total degree in ``[mindeg, n]`` in graded-lex order.

    Parameters
    ----------
    dim : int
        Number of variables.
    n : int
        Maximal total degree.  A negative value gives an empty list.
    mindeg : int, optional
        Minimal total degree.

    Returns
    -------
    list of tuple
    """
    if dim < 1:
        raise ValueError("dimension must be positive")
    out = []
    for deg in range(max(mindeg, 0), n + 1):
        out.extend(_compositions(deg, dim))
    return out


def _clean(terms, dim):
    out = {}
    for alpha, c in terms.items():
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != dim:
            raise ValueError(f"multi-index {alpha} does not have length {dim}")
        if any(a < 0 for a in alpha):
            raise ValueError(f"negative exponent in {alpha}")
        c = float(c)
        if c != 0.0:
            out[alpha] = out.get(alpha, 0.0) + c
            if out[alpha] == 0.0:
                del out[alpha]
    return out


class Polynomial:
    """Immutable sparse polynomial in ``dim`` real variables.

    Parameters
    ----------
    dim : int
        Number of variables.
    terms : mapping, optional
        Map from exponent tuples to coefficients.  Zero coefficients are
        dropped, repeated keys are not possible in a mapping.

    Examples
    --------
    >>> x, y = variables(2)
    >>> p = (x + y) ** 2
    >>> p.coeff((1, 1))
    2.0
    >>> p([1.0, 2.0])
    9.0
    """

    __slots__ = ("_dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping | None = None):
        if int(dim) < 1:
            raise ValueError("dimension must be positive")
        self._dim = int(dim)
        self._terms = MappingProxyType(_clean(dict(terms or {}), self._dim))
        self._hash = None

    # construction helpers

    @classmethod
    def constant(cls, dim, c=1.0):
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, alpha, c=1.0):
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: c})

    @classmethod
    def from_coeffs(cls, coeffs, basis):
        """Polynomial ``sum_k coeffs[k] x^basis[k]``."""
        basis = list(basis)
        if len(basis) != len(coeffs):
            raise ValueError("coefficient vector and basis differ in length")
        if not basis:
            raise ValueError("empty basis, dimension unknown")
        terms = {}
        for alpha, c in zip(basis, coeffs):
            terms[tuple(alpha)] = terms.get(tuple(alpha), 0.0) + float(c)
        return cls(len(basis[0]), terms)

    @classmethod
    def univariate(cls, coeffs):
        """1D polynomial from ascending coefficients ``c_0 + c_1 x + ...``."""
        return cls(1, {(k,): c for k, c in enumerate(coeffs)})

    # basic attributes

    @property
    def dim(self):
        return self._dim

    @property
    def terms(self):
        return self._terms

    @property
    def degree(self):
        """Total degree, ``-inf`` for the zero polynomial."""
        if not self._terms:
            return -math.inf
        return max(sum(a) for a in self._terms)

    def is_zero(self):
        return not self._terms

    def coeff(self, alpha):
        return self._terms.get(tuple(alpha), 0.0)

    def support(self):
        """Exponents with nonzero coefficient in graded-lex order."""
        return sorted(self._terms, key=glex_key)

    def norm(self):
        """Euclidean norm of the coefficient vector."""
        return math.sqrt(sum(c * c for c in self._terms.values()))

    def coeff_vector(self, basis):
        """Coefficients on ``basis``; raises if a term falls outside it."""
        index = {tuple(a): k for k, a in enumerate(basis)}
        v = np.zeros(len(index))
        for alpha, c in self._terms.items():
            if alpha not in index:
                raise ValueError(f"term {alpha} is not in the basis")
            v[index[alpha]] = c
        return v

    def univariate_coeffs(self):
        """Ascending coefficient array of a 1D polynomial."""
        if self._dim != 1:
            raise ValueError("polynomial is not univariate")
        if not self._terms:
            return np.zeros(1)
        c = np.zeros(int(self.degree) + 1)
        for (k,), v in self._terms.items():
            c[k] = v
        return c

    # arithmetic

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.dim != self._dim:
                raise ValueError(
                    f"dimension mismatch: {self._dim} vs {other.dim}")
            return other
        if isinstance(other, (int, float, np.integer, np.floating)):
            return Polynomial.constant(self._dim, float(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return poly_scale(self, -1.0)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(self, poly_scale(other, -1.0))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_add(other, poly_scale(self, -1.0))

    def __mul__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return poly_scale(self, float(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return poly_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.integer, np.floating)):
            return poly_scale(self, 1.0 / float(other))
        return NotImplemented

    def __pow__(self, k):
        k = int(k)
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = Polynomial.constant(self._dim, 1.0)
        base = self
        while k:
            if k & 1:
                out = poly_mul(out, base)
            k >>= 1
            if k:
                base = poly_mul(base, base)
        return out

    def __call__(self, x):
        return poly_eval(self, x)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._dim == other._dim and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._dim, frozenset(self._terms.items())))
        return self._hash

    def allclose(self, other, tol=1e-12):
        """Coefficient-wise comparison, relative to the larger norm."""
        diff = (self - other).terms.values()
        scale = max(1.0, self.norm(), other.norm())
        return all(abs(c) <= tol * scale for c in diff)

    def __repr__(self):
        if not self._terms:
            return f"Polynomial({self._dim}, 0)"
        parts = []
        for alpha in sorted(self._terms, key=glex_key, reverse=True):
            c = self._terms[alpha]
            mono = "*".join(
                f"x{j + 1}" + (f"^{a}" if a > 1 else "")
                for j, a in enumerate(alpha) if a)
            parts.append(f"{c:+g}" + (f"*{mono}" if mono else ""))
        return f"Polynomial({self._dim}, {' '.join(parts)})"

    def evaluate_many(self, X):
        """Evaluate at the rows of ``X`` (shape ``(k, dim)``)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self._dim:
            raise ValueError("dimension mismatch")
        out = np.zeros(X.shape[0])
        for alpha, c in self._terms.items():
            out += c * np.prod(X ** np.asarray(alpha), axis=1)
        return out

    # serialization

    def to_json(self):
        return {
            "dim": self._dim,
            "terms": [{"alpha": list(a), "c": self._terms[a]}
                      for a in self.support()],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            dim = int(obj["dim"])
            terms = {}
            for t in obj["terms"]:
                alpha = tuple(int(a) for a in t["alpha"])
                terms[alpha] = terms.get(alpha, 0.0) + float(t["c"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed polynomial JSON: {exc}") from exc
        return cls(dim, terms)


def variables(dim):
    """The coordinate polynomials ``x_1, ..., x_dim``."""
    return tuple(Polynomial.monomial(tuple(int(i == j) for i in range(dim)))
                 for j in range(dim))


def poly_eval(p: Polynomial, x) -> float:
    """Evaluate ``p`` at the point ``x`` as the finite sum of its terms."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != p.dim:
        raise ValueError(f"point has length {x.shape[0]}, expected {p.dim}")
    total = 0.0
    for alpha, c in p.terms.items():
        m = 1.0
        for xi, a in zip(x, alpha):
            if a:
                m *= xi ** a
        total += c * m
    return float(total)


def poly_add(p: Polynomial, q: Polynomial) -> Polynomial:
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    terms = dict(p.terms)
    for alpha, c in q.terms.items():
        terms[alpha] = terms.get(alpha, 0.0) + c
    return Polynomial(p.dim, terms)


def poly_scale(p: Polynomial, c: float) -> Polynomial:
    return Polynomial(p.dim, {a: c * v for a, v in p.terms.items()})


def poly_mul(p: Polynomial, q: Polynomial) -> Polynomial:
    """Product of two polynomials by convolution of the coefficient maps."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    terms = {}
    for a, c in p.terms.items():
        for b, d in q.terms.items():
            g = tuple(i + j for i, j in zip(a, b))
            terms[g] = terms.get(g, 0.0) + c * d
    return Polynomial(p.dim, terms)


def homogeneous_part(p: Polynomial, m: int) -> Polynomial:
    """Sum of the terms of ``p`` of total degree exactly ``m``."""
    return Polynomial(p.dim, {a: c for a, c in p.terms.items() if sum(a) == m})


@dataclass(frozen=True)
class ConstraintSet:
    """Generators ``f_1, ..., f_k`` of ``K(f) = {x : f_j(x) >= 0}``.

    The unit ``f_0 = 1`` is implicit and never stored.
    """

    dim: int
    polys: tuple = field(default_factory=tuple)

    def __post_init__(self):
        polys = tuple(self.polys)
        for f in polys:
            if not isinstance(f, Polynomial):
                raise TypeError("constraints must be Polynomial instances")
            if f.dim != self.dim:
                raise ValueError("constraint dimension mismatch")
            if f.is_zero():
                raise ValueError("zero constraint polynomial")
        object.__setattr__(self, "polys", polys)

    def __len__(self):
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def contains(self, x, tol=0.0):
        """True if every ``f_j(x) >= -tol``."""
        return all(f(x) >= -tol for f in self.polys)

    def products(self):
        """All products ``f^e`` for ``e`` in ``{0,1}^k`` with their masks."""
        k = len(self.polys)
        out = []
        for mask in itertools.product((0, 1), repeat=k):
            g = Polynomial.constant(self.dim, 1.0)
            for e, f in zip(mask, self.polys):
                if e:
                    g = g * f
            out.append((mask, g))
        return out

    def to_json(self):
        return {"dim": self.dim, "polys": [f.to_json() for f in self.polys]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            polys = [Polynomial.from_json(f) for f in obj["polys"]]
            dim = int(obj.get("dim", polys[0].dim if polys else 0))
        except (KeyError, TypeError, IndexError) as exc:
            raise ValueError(f"malformed constraint JSON: {exc}") from exc
        return cls(dim, tuple(polys))


def motzkin(c=3.0):
    """The Motzkin-type polynomial ``x1^2 x2^2 (x1^2 + x2^2 - c) + 1``."""
    x, y = variables(2)
    return x ** 2 * y ** 2 * (x ** 2 + y ** 2 - c) + 1


def robinson():
    """Robinson's ternary sextic form (nonnegative, not a sum of squares)."""
    x, y, z = variables(3)
    return (x ** 6 + y ** 6 + z ** 6 + 3 * x ** 2 * y ** 2 * z ** 2
            - x ** 4 * y ** 2 - x ** 4 * z ** 2 - x ** 2 * y ** 4
            - y ** 4 * z ** 2 - x ** 2 * z ** 4 - y ** 2 * z ** 4)


def robinson_zeros():
    """The ten projective zeros of :func:`robinson` as representatives in R^3."""
    return [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1), (1, 0, 1),
            (1, 0, -1), (1, 1, 0), (1, -1, 0), (0, 1, 1), (0, 1, -1)]
