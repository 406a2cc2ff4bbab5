"""
Core variety of a linear functional on a finite-dimensional function space.

For ``L`` on ``E`` (functions on a ground set ``X``) put ``V_0 = X`` and ::

    N_k = {p in E : L(p) = 0, p >= 0 on V_(k-1)},
    V_k = common zeros of N_k.

The sets decrease and stabilize at the core variety ``V(L)``.  ``L`` is a
moment functional iff ``V(L)`` is nonempty and ``L(e) >= 0`` for a
strictly positive ``e`` in ``E``; representing measures live on ``V(L)``.

Two ground sets are supported:

* :class:`FiniteX`, points with an evaluation table; every step is a
  linear program.
* :class:`Line1D`, the real line with a monomial basis (possibly
  lacunary); nonnegative polynomials are sums of squares, so ``N_1`` is a
  face of a Gram cone, computed by a semidefinite program.  Later steps run
  on the finite set ``V_1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .atoms import caratheodory
from .moments import AtomicMeasure
from .poly import Polynomial, glex_key

__all__ = [
    "FiniteX",
    "Line1D",
    "FaceInfo",
    "CoreVarietyTrace",
    "ConeMembership",
    "FacialPosition",
    "n1_cone",
    "core_variety",
    "existence_via_core",
    "determinacy_via_core",
    "cone_membership",
    "facial_position",
    "point_functional",
]

LP_TOL = 1e-9
ROOT_TOL = 1e-6
DETECT_TOL = 1e-3


# ---------------------------------------------------------------------------
# ground sets

class FiniteX:
    """Finite ground set with an evaluation table.

    Parameters
    ----------
    points : array_like, shape (N, d)
    table : array_like, shape (N, m)
        ``table[i, k] = a_k(x_i)`` for the basis functions ``a_k`` of ``E``.
    """

    def __init__(self, points, table):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        T = np.asarray(table, dtype=float)
        if T.ndim != 2 or T.shape[0] != pts.shape[0]:
            raise ValueError("the table needs one row per point")
        if not np.all(np.isfinite(T)):
            raise ValueError("the evaluation table has non-finite entries")
        self.points = pts
        self.table = T

    @classmethod
    def from_polynomials(cls, points, basis: Sequence[Polynomial]):
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        T = np.column_stack([p.evaluate_many(pts) for p in basis])
        return cls(pts, T)

    @classmethod
    def from_monomials(cls, points, alphas):
        from .moments import evaluation_matrix
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return cls(pts, evaluation_matrix(pts, alphas))

    @property
    def m(self):
        return self.table.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def subset(self, idx):
        idx = np.asarray(idx, dtype=int)
        return FiniteX(self.points[idx], self.table[idx])


class Line1D:
    """The real line with the monomial basis ``{x^e : e in exponents}``."""

    def __init__(self, exponents: Sequence[int]):
        ex = sorted(set(int(e) for e in exponents))
        if not ex or ex[0] < 0:
            raise ValueError("exponents must be nonnegative and nonempty")
        self.exponents = ex

    @property
    def m(self):
        return len(self.exponents)

    @property
    def degree(self):
        return self.exponents[-1]

    def table(self, pts):
        pts = np.asarray(pts, dtype=float).ravel()
        return np.column_stack([pts ** e for e in self.exponents]) if len(pts) \
            else np.zeros((0, self.m))

    def polynomial(self, coeffs):
        return Polynomial(1, {(e,): float(c) for e, c in zip(self.exponents, coeffs)})

    def finite(self, pts):
        pts = np.asarray(pts, dtype=float).ravel()
        return FiniteX(pts[:, None], self.table(pts))


def point_functional(X: Line1D, points, weights=None):
    """Coefficient vector of ``L = sum_j c_j l_(x_j)`` on the basis of ``X``."""
    pts = np.asarray(points, dtype=float).ravel()
    w = np.ones(len(pts)) if weights is None else np.asarray(weights, dtype=float)
    return X.table(pts).T @ w


# ---------------------------------------------------------------------------
# faces

@dataclass
class FaceInfo:
    """``N_k`` and ``V_k`` of one step.

    Attributes
    ----------
    element : ndarray or None
        Coefficients of a relative-interior element of ``N_k`` (``None`` when
        ``N_k = {0}``).
    zeros : ndarray
        ``V_k``: indices into the finite ground set, or points on the line.
    trivial : bool
        ``N_k = {0}``.
    """

    element: np.ndarray | None
    zeros: np.ndarray
    trivial: bool
    notes: list = field(default_factory=list)


def _finite_face(T, L, tol=LP_TOL):
    """Relative-interior element of ``{c : T c >= 0, L.c = 0}`` on the rows of ``T``.

    Maximizes ``sum_i t_i`` with ``T c >= t`` and ``0 <= t <= 1``.  By
    conic scaling the optimal ``t`` is 1 on rows where some face element
    is positive and 0 on the common zeros.
    """
    N, m = T.shape
    if N == 0:
        return None, np.zeros(0, dtype=int)
    # variables: c (m, free), t (N, in [0, 1])
    cost = np.concatenate([np.zeros(m), -np.ones(N)])
    A_ub = np.hstack([-T, np.eye(N)])
    b_ub = np.zeros(N)
    A_eq = np.concatenate([L, np.zeros(N)])[None, :]
    bounds = [(None, None)] * m + [(0.0, 1.0)] * N
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[0.0],
                  bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"face LP failed: {res.message}")
    c, t = res.x[:m], res.x[m:]
    zeros = np.flatnonzero(t < 0.5)
    vals = T @ c
    if np.all(np.abs(vals) <= tol * max(1.0, np.abs(c).max())):
        return None, zeros
    return c, zeros


def _gram_face(X: Line1D, L, tol=1e-9):
    """Max-rank Gram matrix of ``{f in E : f SOS, L(f) = 0}`` with trace 1.

    Returns ``(coeffs, G)`` or ``(None, None)`` when the face is ``{0}``.
    The interior point iterates approach the analytic center of the
    feasible set, so the limit has maximal rank within the face.
    """
    from .sdp import OPTIMAL, SDPProblem, sdp_solve

    D = X.degree
    h = D // 2
    k = h + 1
    pairs = [(i, j) for i in range(k) for j in range(i, k)]
    nv = len(pairs)
    # coefficient of x^e in z^T G z, as a row over the upper-triangle entries
    rows = {}
    for col, (i, j) in enumerate(pairs):
        e = i + j
        rows.setdefault(e, np.zeros(nv))[col] += 1.0 if i == j else 2.0
    eq, rhs = [], []
    allowed = set(X.exponents)
    for e in range(2 * h + 1):
        if e not in allowed:
            eq.append(rows.get(e, np.zeros(nv)))
            rhs.append(0.0)
    Lrow = np.zeros(nv)
    for e, v in zip(X.exponents, L):
        if e in rows:
            Lrow += v * rows[e]
    eq.append(Lrow)
    rhs.append(0.0)
    tr = np.array([1.0 if i == j else 0.0 for (i, j) in pairs])
    eq.append(tr)
    rhs.append(1.0)
    A = np.array(eq)
    b = np.array(rhs)
    g0, *_ = np.linalg.lstsq(A, b, rcond=None)
    if np.linalg.norm(A @ g0 - b) > 1e-9:
        return None, None
    Nsp = null_space(A)

    def sym(vec):
        G = np.zeros((k, k))
        for v, (i, j) in zip(vec, pairs):
            G[i, j] = G[j, i] = v
        return G

    blk = np.zeros((Nsp.shape[1] + 1, k, k))
    blk[0] = sym(g0)
    for q in range(Nsp.shape[1]):
        blk[q + 1] = sym(Nsp[:, q])
    P = SDPProblem(np.zeros(Nsp.shape[1]), [blk])
    sol = sdp_solve(P, tol=tol, max_iter=200)
    if sol.status == "primal_infeasible":
        return None, None
    if sol.y is None:
        raise RuntimeError(f"Gram face SDP failed: {sol.status}")
    G = P.lmi(sol.y)[0]
    w, U = np.linalg.eigh(G)
    G = (U * np.maximum(w, 0.0)) @ U.T
    coeffs = np.zeros(2 * h + 1)
    for i in range(k):
        for j in range(k):
            coeffs[i + j] += G[i, j]
    return coeffs, G


def _double_roots(coeffs, tol=ROOT_TOL):
    """Candidate real zeros of a nonnegative polynomial (ascending coefficients).

    Zeros of ``f >= 0`` are local minima, so candidates are the real
    critical points with ``f'' >= 0`` and ``f`` small relative to
    ``sum |c_k| |x|^k``.  Returns ``(points, relative values)``.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size <= 1:
        return np.zeros(0), np.zeros(0)
    P = np.polynomial.Polynomial(c)
    dP, ddP = P.deriv(), P.deriv(2)
    crit = dP.roots()
    crit = crit[np.abs(crit.imag) <= 1e-4 * (1 + np.abs(crit.real))].real
    absP = np.polynomial.Polynomial(np.abs(c))
    pts, vals = [], []
    for x in crit:
        for _ in range(20):
            d2 = ddP(x)
            if d2 == 0:
                break
            step = dP(x) / d2
            x -= step
            if abs(step) <= 1e-15 * (1 + abs(x)):
                break
        den = absP(abs(x))
        rel = abs(P(x)) / den if den > 0 else 0.0
        if rel <= tol and ddP(x) >= -tol * absP(abs(x)):
            if pts and abs(x - pts[-1]) <= 1e-6 * (1 + abs(x)):
                continue
            pts.append(x)
            vals.append(rel)
    order = np.argsort(pts)
    return np.asarray(pts)[order], np.asarray(vals)[order]


def _polish(X: Line1D, L, roots, el):
    """Newton refinement of ``V_1`` and the face element.

    Solves jointly for roots ``r``, weights ``a`` and ``f in E`` with
    ``L = sum a_i s(r_i)``, ``f(r_i) = f'(r_i) = 0`` and ``|f| = 1``.  When
    ``L`` is a moment functional its representing measures live on
    ``V_1``, so the system is consistent; the interior point output only
    locates the roots to roughly the square root of the solver tolerance.
    Returns ``(roots, element)`` or ``None`` when the refinement fails.
    """
    from scipy.optimize import least_squares

    ex = np.array(X.exponents, dtype=float)
    k, m = len(roots), X.m
    scale = max(1.0, float(np.abs(L).max()))
    c0 = el / np.linalg.norm(el)
    a0, *_ = np.linalg.lstsq(X.table(roots).T, L, rcond=None)

    def dtable(r, order=1):
        cols = []
        for e in ex:
            fac = e if order == 1 else e * (e - 1)
            cols.append(fac * r ** (e - order) if e >= order else np.zeros_like(r))
        return np.column_stack(cols)

    def F(z):
        r, a, c = z[:k], z[k:2 * k], z[2 * k:]
        T = X.table(r)
        return np.concatenate([(T.T @ a - L) / scale, T @ c, dtable(r) @ c,
                               [c @ c - 1.0]])

    def J(z):
        r, a, c = z[:k], z[k:2 * k], z[2 * k:]
        T, dT, ddT = X.table(r), dtable(r), dtable(r, 2)
        out = np.zeros((m + 2 * k + 1, 2 * k + m))
        out[:m, :k] = (dT * a[:, None]).T / scale
        out[:m, k:2 * k] = T.T / scale
        out[m:m + k, :k] = np.diag(dT @ c)
        out[m:m + k, 2 * k:] = T
        out[m + k:m + 2 * k, :k] = np.diag(ddT @ c)
        out[m + k:m + 2 * k, 2 * k:] = dT
        out[-1, 2 * k:] = 2 * c
        return out

    z = np.concatenate([roots, a0, c0])
    if m + 2 * k + 1 < len(z):
        return None
    z = least_squares(F, z, jac=J, method="lm", max_nfev=200).x
    for _ in range(10):
        step, *_ = np.linalg.lstsq(J(z), -F(z), rcond=None)
        z = z + step
        if np.abs(step).max() <= 1e-15 * (1 + np.abs(z).max()):
            break
    r, c = z[:k], z[2 * k:]
    if np.abs(F(z)).max() > 1e-10 or np.abs(r - roots).max() > 1e-2 * (1 + np.abs(roots).max()):
        return None
    # the refined element must stay nonnegative
    full = np.zeros(X.degree + 1)
    full[X.exponents] = c
    P = np.polynomial.Polynomial(full)
    absP = np.polynomial.Polynomial(np.abs(full))
    crit = P.deriv().roots()
    crit = crit[np.abs(crit.imag) <= 1e-8].real
    if full[-1] < 0 or any(P(x) < -1e-9 * absP(abs(x)) for x in crit):
        return None
    return np.sort(r), c


def n1_cone(L, X) -> FaceInfo:
    """``N_1(L)`` and ``V_1(L)``.

    Parameters
    ----------
    L : array_like
        Values ``L(a_k)`` on the basis of ``E``.
    X : FiniteX or Line1D

    Returns
    -------
    FaceInfo
        For :class:`Line1D`, ``zeros`` holds the real points of ``V_1``; an
        empty array with ``trivial`` set means ``V_1`` is the whole line.
    """
    L = np.asarray(L, dtype=float)
    if L.shape != (X.m,):
        raise ValueError(f"L needs {X.m} values")
    if not np.any(L):
        raise ValueError("L = 0 is not accepted")
    if isinstance(X, FiniteX):
        c, zeros = _finite_face(X.table, L)
        return FaceInfo(c, zeros, c is None)
    coeffs, G = _gram_face(X, L)
    if coeffs is None:
        return FaceInfo(None, np.zeros(0), True, ["N_1 = {0}: V_1 is the real line"])
    el = np.array([coeffs[e] if e < len(coeffs) else 0.0 for e in X.exponents])
    cand, rel = _double_roots(coeffs, DETECT_TOL)
    notes = []
    # refine; a spurious candidate makes the system inconsistent, so drop
    # the weakest candidate and retry
    while cand.size:
        out = _polish(X, L, cand, el)
        if out is not None:
            roots, el = out
            break
        worst = int(np.argmax(rel))
        cand, rel = np.delete(cand, worst), np.delete(rel, worst)
    else:
        roots, _ = _double_roots(coeffs, ROOT_TOL)
        if roots.size:
            notes.append("root refinement failed; roots are solver accurate only")
    if roots.size == 0:
        notes.append("interior element has no real zeros: V_1 is empty")
    return FaceInfo(el, roots, False, notes)


# ---------------------------------------------------------------------------
# iteration

@dataclass
class CoreVarietyTrace:
    """Steps ``(k, element, V_k)`` of the core variety iteration.

    ``final`` holds the points of ``V(L)`` (rows of the ground set or
    points of the line), ``k`` the smallest index with ``V_k = V(L)``
    (``V_0 = X``).  ``whole_line`` marks ``V(L) = R`` in the line case.
    """

    steps: list
    final: np.ndarray
    k: int
    whole_line: bool = False
    notes: list = field(default_factory=list)

    @property
    def empty(self):
        return not self.whole_line and len(self.final) == 0

    def to_json(self):
        return {
            "steps": [{"k": k, "element": None if el is None else np.asarray(el).tolist(),
                       "V": np.asarray(v).tolist()} for k, el, v in self.steps],
            "core_variety": "R" if self.whole_line else np.asarray(self.final).tolist(),
            "k": self.k,
            "notes": self.notes,
        }


def _run_finite(T, L, pts, alive, k, steps):
    """Iterate ``N_k``/``V_k`` on the rows ``alive`` of ``T`` until stable."""
    while len(alive):
        c, z = _finite_face(T[alive], L)
        new = alive[z]
        k += 1
        steps.append((k, c, pts[new]))
        if len(new) == len(alive):
            break
        alive = new
    return alive


def core_variety(L, X) -> CoreVarietyTrace:
    """Run ``V_0 = X, V_1, V_2, ...`` until it stabilizes.

    Raises
    ------
    ValueError
        For ``L = 0``.
    """
    L = np.asarray(L, dtype=float)
    face = n1_cone(L, X)
    if isinstance(X, FiniteX):
        steps = [(1, face.element, X.points[face.zeros])]
        if len(face.zeros) == len(X):
            return CoreVarietyTrace(steps, X.points.copy(), 0)
        alive = _run_finite(X.table, L, X.points, face.zeros, 1, steps)
        return CoreVarietyTrace(steps, X.points[alive], _stable_index(steps))
    if face.trivial:
        return CoreVarietyTrace([(1, None, np.zeros(0))], np.zeros(0), 0, True,
                                list(face.notes))
    pts = face.zeros
    steps = [(1, face.element, pts.copy())]
    if len(pts) == 0:
        return CoreVarietyTrace(steps, pts, 1, False, list(face.notes))
    F = X.finite(pts)
    alive = _run_finite(F.table, L, pts, np.arange(len(pts)), 1, steps)
    return CoreVarietyTrace(steps, pts[alive], _stable_index(steps), False,
                            list(face.notes))


def _stable_index(steps):
    sizes = [len(v) for _, _, v in steps]
    last = sizes[-1]
    k = steps[-1][0]
    for (kk, _, _), sz in zip(reversed(steps), reversed(sizes)):
        if sz != last:
            break
        k = kk
    return k


# ---------------------------------------------------------------------------
# existence, determinacy, membership

def _positive_element(X):
    if isinstance(X, Line1D):
        if 0 not in X.exponents:
            raise ValueError("the basis must contain the constant 1")
        e = np.zeros(X.m)
        e[X.exponents.index(0)] = 1.0
        return e
    # a strictly positive element: maximize the minimum over X
    T = X.table
    N, m = T.shape
    cost = np.concatenate([np.zeros(m), [-1.0]])
    A_ub = np.hstack([-T, np.ones((N, 1))])
    res = linprog(cost, A_ub=A_ub, b_ub=np.zeros(N),
                  bounds=[(-1.0, 1.0)] * m + [(None, 1.0)], method="highs")
    if res.status != 0 or res.x[-1] <= LP_TOL:
        raise ValueError("E has no strictly positive element on X")
    c = res.x[:m]
    return c / res.x[-1]


@dataclass
class CoreExistence:
    """Outcome of :func:`existence_via_core`."""

    verdict: str
    trace: CoreVarietyTrace | None
    measure: AtomicMeasure | None
    L_e: float
    residual: float = math.nan
    reason: str = ""

    def to_json(self):
        return {"verdict": self.verdict,
                "trace": self.trace.to_json() if self.trace is not None else None,
                "measure": self.measure.to_json() if self.measure is not None else None,
                "L_e": self.L_e, "residual": self.residual, "reason": self.reason}


def _fit_measure(T, pts, L):
    """Nonnegative weights on the rows of ``T`` reproducing ``L``."""
    N, m = T.shape
    if N == 0:
        return None, math.inf
    # min sum |r| with T^T c + r^+ - r^- = L, c >= 0
    cost = np.concatenate([np.zeros(N), np.ones(2 * m)])
    A_eq = np.hstack([T.T, np.eye(m), -np.eye(m)])
    res = linprog(cost, A_eq=A_eq, b_eq=L, bounds=[(0, None)] * (N + 2 * m),
                  method="highs")
    if res.status != 0:
        return None, math.inf
    c = res.x[:N]
    keep = c > 0
    if not np.any(keep):
        return AtomicMeasure.empty(pts.shape[1]), float(np.abs(L).max())
    idx, w = caratheodory(T[keep].T, c[keep])
    kept = np.flatnonzero(keep)[idx]
    # least squares polish on the fixed support
    w2, *_ = np.linalg.lstsq(T[kept].T, L, rcond=None)
    if np.all(w2 > 0):
        w = w2
    mu = AtomicMeasure(pts[kept], w, dim=pts.shape[1], check=False)
    res_ = float(np.abs(T[kept].T @ w - L).max())
    return mu, res_


def existence_via_core(L, X, e=None) -> CoreExistence:
    """Moment functional test: ``L(e) >= 0`` and ``V(L)`` nonempty.

    Parameters
    ----------
    L : array_like
    X : FiniteX or Line1D
    e : array_like, optional
        Coefficients of an element with ``e >= 1`` on ``X``; by default the
        constant 1 (line) or an LP-found positive element (finite set).

    On ``yes`` a representing measure supported on ``V(L)`` is fitted by a
    linear program over the points of ``V(L)``.
    """
    L = np.asarray(L, dtype=float)
    if not np.any(L):
        dim = 1 if isinstance(X, Line1D) else X.points.shape[1]
        return CoreExistence("yes", None, AtomicMeasure.empty(dim), 0.0, 0.0,
                             "L = 0 is represented by the zero measure")
    e = _positive_element(X) if e is None else np.asarray(e, dtype=float)
    Le = float(L @ e)
    trace = core_variety(L, X)
    if Le < -LP_TOL * max(1.0, float(np.abs(L).max())):
        return CoreExistence("no", trace, None, Le, reason="L(e) < 0")
    if trace.empty:
        return CoreExistence("no", trace, None, Le, reason="core variety is empty")
    if trace.whole_line:
        return CoreExistence("yes", trace, None, Le,
                             reason="V(L) = R; no finite support to fit on")
    if isinstance(X, Line1D):
        F = X.finite(trace.final)
    else:
        F = FiniteX(trace.final, X.table[[_row(X, p) for p in trace.final]])
    mu, res = _fit_measure(F.table, F.points, L)
    if mu is None or res > 1e-8 * max(1.0, float(np.abs(L).max())):
        return CoreExistence("yes", trace, mu, Le, res,
                             "V(L) nonempty; fitted measure residual is large")
    return CoreExistence("yes", trace, mu, Le, res, "L(e) >= 0 and V(L) nonempty")


def _row(X, p):
    d = np.abs(X.points - p).max(axis=1)
    return int(np.argmin(d))


def determinacy_via_core(L, X) -> dict:
    """``determinate`` iff ``|V(L)| <= rank`` of ``E`` restricted to ``V(L)``.

    Returns a dict with ``verdict`` (``determinate``, ``indeterminate`` or
    ``inconclusive``), ``count``, ``rank`` and the existence result.
    """
    ex = existence_via_core(L, X)
    if ex.verdict != "yes":
        raise ValueError("L is not a moment functional: " + ex.reason)
    if ex.trace is None:
        return {"verdict": "determinate", "count": 0, "rank": 0, "existence": ex}
    if ex.trace.whole_line:
        return {"verdict": "indeterminate", "count": math.inf, "rank": X.m,
                "existence": ex,
                "reason": "V(L) is infinite and exceeds dim E"}
    pts = ex.trace.final
    T = X.table(pts) if isinstance(X, Line1D) else X.table[[_row(X, p) for p in pts]]
    r = int(np.linalg.matrix_rank(T, tol=1e-9 * max(1.0, np.abs(T).max())))
    verdict = "determinate" if len(pts) <= r else "indeterminate"
    return {"verdict": verdict, "count": len(pts), "rank": r, "existence": ex}


@dataclass
class ConeMembership:
    """``v`` in the moment cone: a measure, else a separating ``p``."""

    member: bool
    measure: AtomicMeasure | None = None
    separator: np.ndarray | None = None
    residual: float = math.nan

    def to_json(self):
        return {"member": self.member,
                "measure": self.measure.to_json() if self.measure is not None else None,
                "separator": None if self.separator is None else self.separator.tolist(),
                "residual": self.residual}


def cone_membership(v, X: FiniteX, tol: float = 1e-9) -> ConeMembership:
    """Is ``v`` a conic combination of the evaluation vectors ``s(x)``, ``x in X``?

    On ``no`` the separator ``p`` satisfies ``p >= 0`` on ``X`` and
    ``<p, v> < 0``.
    """
    if not isinstance(X, FiniteX):
        raise ValueError("cone_membership needs a finite ground set")
    v = np.asarray(v, dtype=float)
    scale = max(1.0, float(np.abs(v).max()))
    mu, res = _fit_measure(X.table, X.points, v)
    if mu is not None and res <= tol * scale:
        return ConeMembership(True, mu, None, res)
    m = X.m
    r = linprog(v, A_ub=-X.table, b_ub=np.zeros(len(X)),
                bounds=[(-1.0, 1.0)] * m, method="highs")
    if r.status == 0 and r.fun < -tol * scale:
        p = r.x / np.abs(r.x).max()
        return ConeMembership(False, None, p, res)
    # numerically on the boundary: accept the fitted measure
    return ConeMembership(mu is not None, mu, None, res)


@dataclass
class FacialPosition:
    """Interior or boundary of the moment cone, with the exposed face."""

    position: str
    element: np.ndarray | None
    V1: np.ndarray
    V: np.ndarray | None
    relative_interior: bool | None

    def to_json(self):
        return {"position": self.position,
                "p": None if self.element is None else np.asarray(self.element).tolist(),
                "V1": np.asarray(self.V1).tolist(),
                "V": None if self.V is None else np.asarray(self.V).tolist(),
                "relative_interior_of_face": self.relative_interior}


def facial_position(L, X) -> FacialPosition:
    """``interior`` iff ``N_1(L) = {0}``; else the exposed face ``F_p``.

    ``relative_interior`` tells whether ``L`` lies in the relative interior
    of ``F_p``, equivalently whether the set of atoms ``W(L) = V(L)``
    equals ``V_1(L)``.

    Raises
    ------
    ValueError
        If ``L`` is not in the moment cone.
    """
    ex = existence_via_core(L, X)
    if ex.verdict != "yes":
        raise ValueError("L is outside the moment cone: " + ex.reason)
    face = n1_cone(L, X)
    V1 = X.points[face.zeros] if isinstance(X, FiniteX) else face.zeros
    if face.trivial:
        return FacialPosition("interior", None, V1, None, None)
    trace = ex.trace
    same = len(trace.final) == len(V1)
    return FacialPosition("boundary", face.element, V1, trace.final, bool(same))
