"""
Moment sequences, Riesz functionals and atomic measures.

A :class:`MomentSequence` is either truncated (explicit entries for all
multi-indices up to ``maxdeg``) or generator-backed, in which case entries
are produced on demand by a pure callable.  Sequences whose entries
overflow a double (the log-normal one, say) may carry a ``log_generator``
returning ``log s_alpha``.
"""
from __future__ import annotations

import json
import math
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .poly import Polynomial, glex_key, monomials

__all__ = [
    "MomentSequence",
    "AtomicMeasure",
    "riesz_apply",
    "shift",
    "marginal",
    "moments_of_measure",
]


class MomentSequence:
    """Real numbers ``s_alpha`` indexed by multi-indices.

    Parameters
    ----------
    dim : int
        Number of variables.
    entries : mapping, optional
        Explicit values ``alpha -> s_alpha``.
    maxdeg : int or None
        Degree bound of the explicit entries.  ``None`` means the sequence
        is full and backed by ``generator``.
    generator : callable, optional
        Pure function ``alpha -> s_alpha`` (``alpha`` a tuple).
    log_generator : callable, optional
        Pure function ``alpha -> log s_alpha`` for positive entries.
    name : str, optional
        Label used in reports.
    """

    def __init__(self, dim: int, entries: Mapping | None = None,
                 maxdeg: int | None = None,
                 generator: Callable | None = None,
                 log_generator: Callable | None = None,
                 name: str = ""):
        self.dim = int(dim)
        self.generator = generator
        self.log_generator = log_generator
        self.name = name
        entries = {tuple(int(a) for a in k): float(v)
                   for k, v in dict(entries or {}).items()}
        for alpha in entries:
            if len(alpha) != self.dim:
                raise ValueError(f"multi-index {alpha} has wrong length")
        if maxdeg is None and generator is None:
            maxdeg = max((sum(a) for a in entries), default=0)
        if maxdeg is not None:
            maxdeg = int(maxdeg)
            for alpha in monomials(self.dim, maxdeg):
                if alpha not in entries:
                    if generator is None:
                        raise ValueError(f"missing moment for {alpha}")
                    entries[alpha] = float(generator(alpha))
            if any(sum(a) > maxdeg for a in entries):
                raise ValueError("entry beyond the degree bound")
        elif (0,) * self.dim not in entries:
            entries[(0,) * self.dim] = float(generator((0,) * self.dim))
        self.maxdeg = maxdeg
        self._entries = MappingProxyType(entries)

    # construction helpers

    @classmethod
    def univariate(cls, values, name=""):
        """Truncated 1D sequence ``(s_0, ..., s_m)``."""
        values = [float(v) for v in values]
        if not values:
            raise ValueError("a moment sequence needs at least s_0")
        return cls(1, {(k,): v for k, v in enumerate(values)},
                   maxdeg=len(values) - 1, name=name)

    @classmethod
    def from_generator(cls, dim, generator, log_generator=None, name=""):
        """Full sequence materialized lazily from ``generator``."""
        return cls(dim, {}, None, generator, log_generator, name)

    @property
    def entries(self):
        return self._entries

    @property
    def is_full(self):
        return self.maxdeg is None

    def available(self, deg):
        """True if all moments up to total degree ``deg`` can be produced."""
        return self.maxdeg is None or deg <= self.maxdeg

    def __getitem__(self, alpha):
        if isinstance(alpha, (int, np.integer)):
            alpha = (int(alpha),)
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim:
            raise ValueError(f"multi-index {alpha} has wrong length")
        v = self._entries.get(alpha)
        if v is not None:
            return v
        if self.generator is not None and (
                self.maxdeg is None or sum(alpha) <= self.maxdeg):
            return float(self.generator(alpha))
        raise ValueError(
            f"moment {alpha} of degree {sum(alpha)} exceeds maxdeg {self.maxdeg}")

    def log_moment(self, alpha):
        """``log s_alpha``; uses the log generator when present."""
        if isinstance(alpha, (int, np.integer)):
            alpha = (int(alpha),)
        alpha = tuple(alpha)
        if self.log_generator is not None:
            return float(self.log_generator(alpha))
        v = self[alpha]
        if v <= 0:
            raise ValueError(f"moment {alpha} is not positive")
        return math.log(v)

    def values(self, m):
        """1D entries ``s_0..s_m`` as an array."""
        if self.dim != 1:
            raise ValueError("values() needs a 1D sequence")
        if not self.available(m):
            raise ValueError(f"moments up to degree {m} are not available")
        return np.array([self[(k,)] for k in range(m + 1)])

    def truncate(self, maxdeg):
        """Truncated copy holding all moments up to ``maxdeg``."""
        if not self.available(maxdeg):
            raise ValueError(f"moments up to degree {maxdeg} are not available")
        ent = {a: self[a] for a in monomials(self.dim, maxdeg)}
        return MomentSequence(self.dim, ent, maxdeg, name=self.name)

    @property
    def mass(self):
        return self[(0,) * self.dim]

    def __repr__(self):
        deg = "full" if self.maxdeg is None else f"maxdeg={self.maxdeg}"
        label = f" {self.name!r}" if self.name else ""
        return f"MomentSequence(dim={self.dim}, {deg}{label})"

    def to_json(self, maxdeg=None):
        if maxdeg is None:
            if self.maxdeg is None:
                raise ValueError("full sequences need an explicit maxdeg")
            maxdeg = self.maxdeg
        return {
            "dim": self.dim,
            "maxdeg": int(maxdeg),
            "entries": [{"alpha": list(a), "s": self[a]}
                        for a in monomials(self.dim, maxdeg)],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        if isinstance(obj, list):
            return cls.univariate(obj)
        try:
            dim = int(obj["dim"])
            ent = {tuple(e["alpha"]): float(e["s"]) for e in obj["entries"]}
            maxdeg = int(obj.get("maxdeg", max(sum(a) for a in ent)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed moment JSON: {exc}") from exc
        return cls(dim, ent, maxdeg)


class AtomicMeasure:
    """Finite positive combination ``sum_j w_j delta_{x_j}``.

    Parameters
    ----------
    points : array_like, shape (k, d)
    weights : array_like, shape (k,)
        Strictly positive weights.
    """

    __slots__ = ("points", "weights")

    def __init__(self, points, weights, dim=None, check=True):
        pts = np.asarray(points, dtype=float)
        w = np.asarray(weights, dtype=float).ravel()
        if pts.size == 0:
            d = int(dim) if dim is not None else (pts.shape[1] if pts.ndim == 2 else 1)
            pts = np.zeros((0, d))
        elif pts.ndim == 1:
            pts = pts.reshape(-1, 1) if (dim in (None, 1)) else pts.reshape(1, -1)
        if pts.shape[0] != w.shape[0]:
            raise ValueError("points and weights differ in length")
        if check:
            if np.any(w <= 0):
                raise ValueError("weights must be strictly positive")
            if len(w) > 1:
                scale = max(1.0, float(np.abs(pts).max()))
                diff = pts[:, None, :] - pts[None, :, :]
                dist = np.sqrt((diff ** 2).sum(-1)) / scale
                np.fill_diagonal(dist, np.inf)
                if dist.min() <= 1e-10:
                    raise ValueError("atoms are not pairwise distinct")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def empty(cls, dim):
        return cls(np.zeros((0, dim)), np.zeros(0), dim=dim)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.weights)

    @property
    def mass(self):
        return float(self.weights.sum())

    def sorted(self):
        """Copy with atoms in lexicographic order of their coordinates."""
        if len(self) == 0:
            return self
        order = np.lexsort(self.points.T[::-1])
        return AtomicMeasure(self.points[order], self.weights[order], check=False)

    def scaled(self, c):
        return AtomicMeasure(self.points, c * self.weights, check=False)

    def to_json(self):
        return {"atoms": [{"x": [float(v) for v in x], "w": float(w)}
                          for x, w in zip(self.points, self.weights)]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            atoms = obj["atoms"]
            pts = [list(map(float, a["x"])) for a in atoms]
            w = [float(a["w"]) for a in atoms]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed measure JSON: {exc}") from exc
        dim = obj.get("dim") if not pts else None
        return cls(pts, w, dim=dim)

    def __repr__(self):
        body = ", ".join(
            f"{w:.6g}*delta(" + ", ".join(f"{c:.8g}" for c in x) + ")"
            for x, w in zip(self.points, self.weights))
        return f"AtomicMeasure({body or 'empty'})"


def riesz_apply(s: MomentSequence, p: Polynomial) -> float:
    """Riesz functional ``L_s(p) = sum_alpha p_alpha s_alpha``."""
    if p.dim != s.dim:
        raise ValueError("dimension mismatch")
    if p.is_zero():
        return 0.0
    if not s.available(p.degree):
        raise ValueError(
            f"polynomial degree {p.degree} exceeds available moments ({s.maxdeg})")
    return float(sum(c * s[a] for a, c in p.terms.items()))


def shift(s: MomentSequence, g: Polynomial) -> MomentSequence:
    """Localized sequence ``(g(E)s)_alpha = sum_gamma g_gamma s_{alpha+gamma}``.

    The truncation degree drops by ``deg g``; generator-backed sequences
    stay generator-backed.
    """
    if g.dim != s.dim:
        raise ValueError("dimension mismatch")
    if g.is_zero():
        raise ValueError("localizing polynomial is zero")
    terms = list(g.terms.items())

    def gen(alpha):
        return sum(c * s[tuple(a + b for a, b in zip(alpha, gam))]
                   for gam, c in terms)

    if s.maxdeg is None:
        return MomentSequence.from_generator(s.dim, gen, name=s.name)
    newdeg = s.maxdeg - int(g.degree)
    if newdeg < 0:
        raise ValueError(
            f"shift by degree {g.degree} needs more than {s.maxdeg} moments")
    ent = {a: gen(a) for a in monomials(s.dim, newdeg)}
    return MomentSequence(s.dim, ent, newdeg, name=s.name)


def marginal(s: MomentSequence, j: int) -> MomentSequence:
    """The 1D sequence ``n -> s_{n e_j}``; ``j`` counts from 1."""
    if not 1 <= j <= s.dim:
        raise ValueError(f"axis {j} out of range 1..{s.dim}")

    def alpha(n):
        a = [0] * s.dim
        a[j - 1] = n[0]
        return tuple(a)

    name = f"{s.name}[{j}]" if s.name else ""
    if s.maxdeg is None:
        log_gen = None
        if s.log_generator is not None:
            log_gen = lambda n: s.log_generator(alpha(n))
        return MomentSequence.from_generator(
            1, lambda n: s[alpha(n)], log_gen, name=name)
    return MomentSequence(1, {(n,): s[alpha((n,))] for n in range(s.maxdeg + 1)},
                          s.maxdeg, name=name)


def moments_of_measure(mu: AtomicMeasure, maxdeg: int) -> MomentSequence:
    """``s_alpha = sum_j w_j x_j^alpha`` for ``|alpha| <= maxdeg``."""
    alphas = monomials(mu.dim, maxdeg)
    if len(mu) == 0:
        return MomentSequence(mu.dim, {a: 0.0 for a in alphas}, maxdeg)
    V = evaluation_matrix(mu.points, alphas)
    vals = V.T @ mu.weights
    return MomentSequence(mu.dim, dict(zip(alphas, vals)), maxdeg)


def evaluation_matrix(points, alphas):
    """Matrix ``V[j, k] = x_j^{alpha_k}`` for points ``x_j`` (rows)."""
    X = np.atleast_2d(np.asarray(points, dtype=float))
    A = np.asarray(list(alphas), dtype=int).reshape(len(alphas), -1)
    if A.size == 0:
        return np.zeros((X.shape[0], 0))
    # integer powers, with 0**0 = 1
    return np.prod(X[:, None, :] ** A[None, :, :], axis=2)


def sort_alphas(alphas):
    return sorted((tuple(a) for a in alphas), key=glex_key)
