"""
One-dimensional moment problems.

Full problems on the line and the half-line are tested through Hankel
positivity up to a finite horizon.  On a compact interval ``[a, b]`` the
truncated problem is decided exactly by the two matrices ::

    m = 2n:      H_n(s)              and  H_(n-1)((b - x)(x - a) s)
    m = 2n + 1:  H_n((x - a) s)      and  H_n((b - x) s)

called the *lower* and *upper* matrix below.  Boundary points of the
moment cone have a unique representing measure, read off from the zeros of
a kernel polynomial.  Interior points have two principal measures and a
one-parameter family of canonical measures, built here by removing the
largest possible point mass at an anchor and resolving the remaining
boundary sequence.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares, nnls

from .hankel import build_hankel
from .moments import AtomicMeasure, MomentSequence
from .poly import Polynomial

__all__ = [
    "IntervalUnion",
    "ExistenceReport",
    "FiniteSupport",
    "SMPReport",
    "hamburger_check",
    "stieltjes_check",
    "interval_truncated_check",
    "hausdorff_difference_check",
    "bernstein_check",
    "finite_support_detect",
    "boundary_classify",
    "atom_at_infinity_split",
    "max_mass",
    "principal_measures",
    "canonical_measure",
    "measure_index",
    "semialgebraic_set",
    "natural_generators",
    "smp_check",
]

PSD_TOL = 1e-9
SING_TOL = 1e-10
MERGE_TOL = 1e-7


# ---------------------------------------------------------------------------
# helpers

def _seq(s) -> MomentSequence:
    if isinstance(s, MomentSequence):
        if s.dim != 1:
            raise ValueError("a one-dimensional sequence is required")
        return s
    return MomentSequence.univariate(list(s))


def _classify(A, tol=PSD_TOL, sing_tol=SING_TOL):
    """``pd``, ``singular`` or ``indefinite`` after diagonal scaling.

    Returns the status and the smallest eigenvalue of the scaled matrix
    (unit diagonal on the nonzero rows).  Congruence by a positive diagonal
    keeps the inertia, and scaling tames sequences of very different
    magnitudes such as factorial moments.
    """
    A = np.asarray(A, dtype=float)
    if A.size == 0:
        return "pd", math.inf
    A = (A + A.T) / 2
    d = np.diag(A).copy()
    top = float(np.abs(d).max())
    if top == 0.0:
        return ("singular", 0.0) if not np.any(A) else ("indefinite", -math.inf)
    if np.any(d < -tol * top):
        return "indefinite", float(d.min() / top)
    live = d > sing_tol * top
    if not np.all(live):
        dead = ~live
        # a PSD matrix with a vanishing diagonal entry has a vanishing row
        off = np.abs(A[dead]).max() / top
        if off > math.sqrt(sing_tol):
            return "indefinite", -off
    r = 1.0 / np.sqrt(d[live])
    B = A[np.ix_(live, live)] * r[:, None] * r[None, :]
    lam = float(np.linalg.eigvalsh(B)[0]) if B.size else math.inf
    k = max(1, B.shape[0])
    if lam < -tol * k:
        return "indefinite", lam
    if lam <= sing_tol * k or not np.all(live):
        return "singular", min(lam, 0.0) if not np.all(live) else lam
    return "pd", lam


def _vander(x, m):
    x = np.asarray(x, dtype=float)
    return np.vander(x, m + 1, increasing=True).T  # (m + 1, k)


def _real_roots(coeffs, lo=-math.inf, hi=math.inf):
    """Real roots of an ascending coefficient vector inside ``[lo, hi]``."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size == 0:
        raise ValueError("zero polynomial has no isolated roots")
    scale = np.abs(c).max()
    while c.size > 1 and abs(c[-1]) <= 1e-12 * scale:
        c = c[:-1]
    if c.size <= 1:
        return np.zeros(0)
    r = np.roots(c[::-1])
    real = r[np.abs(r.imag) <= 1e-6 * (1.0 + np.abs(r.real))].real
    span = hi - lo if math.isfinite(hi - lo) else 1.0
    eps = 1e-6 * span
    real = real[(real >= lo - eps) & (real <= hi + eps)]
    return np.clip(np.sort(real), lo, hi)


def _merge(points, tol):
    out = []
    for p in sorted(points):
        if out and abs(p - out[-1]) <= tol:
            continue
        out.append(p)
    return np.array(out)


def _interval_matrices(s: MomentSequence, a, b):
    """``[(name, matrix, weight, order)]``; ``weight(xi)`` scales rank-one terms."""
    m = s.maxdeg
    x = Polynomial.univariate([0.0, 1.0])
    out = []
    if m % 2 == 0:
        n = m // 2
        out.append(("lower", build_hankel(s, n).data, lambda t: 1.0, n))
        if n >= 1:
            g = (b - x) * (x - a)
            out.append(("upper", build_hankel(s, n - 1, g).data,
                        lambda t: (b - t) * (t - a), n - 1))
    else:
        n = (m - 1) // 2
        out.append(("lower", build_hankel(s, n, x - a).data, lambda t: t - a, n))
        out.append(("upper", build_hankel(s, n, b - x).data, lambda t: b - t, n))
    return out


def measure_index(mu: AtomicMeasure, a, b, tol=1e-9):
    """Index of an atomic measure on ``[a, b]``: endpoints count 1, others 2."""
    w = tol * (b - a)
    return int(sum(1 if (abs(t - a) <= w or abs(t - b) <= w) else 2
                   for t in mu.points[:, 0]))


def _measure(points, weights):
    pts = np.asarray(points, dtype=float).reshape(-1, 1)
    return AtomicMeasure(pts, np.asarray(weights, dtype=float), dim=1).sorted()


def _moment_residual(mu, s_vals):
    if len(mu) == 0:
        return float(np.abs(s_vals).max())
    V = _vander(mu.points[:, 0], len(s_vals) - 1)
    return float(np.abs(V @ mu.weights - s_vals).max())


def _refine(mu, s_vals, a, b, fixed=()):
    """Newton polish of atoms and weights against the given moments.

    Endpoint atoms and those listed in ``fixed`` stay put.  The polished
    measure is kept only if it stays in ``[a, b]`` with positive weights
    and lowers the moment residual.
    """
    x = mu.points[:, 0].copy()
    w = mu.weights.copy()
    if len(x) == 0:
        return mu
    span = (b - a) if math.isfinite(b - a) else 1.0
    pinned = np.array([abs(t - a) <= 1e-9 * span or abs(t - b) <= 1e-9 * span
                       or any(abs(t - f) <= 1e-12 * (1 + abs(f)) for f in fixed)
                       for t in x])
    free = ~pinned
    nf = int(free.sum())
    m = len(s_vals) - 1
    if nf + len(w) > m + 1:
        return mu

    def unpack(z):
        xx = x.copy()
        xx[free] = z[:nf]
        return xx, z[nf:]

    def resid(z):
        xx, ww = unpack(z)
        return _vander(xx, m) @ ww - s_vals

    z0 = np.concatenate([x[free], w])
    before = float(np.abs(resid(z0)).max())
    try:
        sol = least_squares(resid, z0, method="lm", xtol=1e-15, ftol=1e-15,
                            gtol=1e-15, max_nfev=200)
    except ValueError:
        return mu
    xx, ww = unpack(sol.x)
    after = float(np.abs(resid(sol.x)).max())
    if (after < before and np.all(ww > 0) and np.all(xx >= a - 1e-12 * span)
            and np.all(xx <= b + 1e-12 * span)
            and len(_merge(xx, 1e-9 * span)) == len(xx)):
        return _measure(np.clip(xx, a, b), ww)
    return mu


# ---------------------------------------------------------------------------
# reports

@dataclass
class ExistenceReport:
    """Verdict of an existence test with its matrix certificates.

    Attributes
    ----------
    verdict : str
        ``yes``, ``no``, ``boundary`` or ``interior``.
    certificates : list of tuple
        ``(matrix name, smallest eigenvalue)``; eigenvalues refer to the
        diagonally scaled matrix unless stated otherwise.
    measure : AtomicMeasure, optional
    index : int, optional
    mass_at_infinity : float, optional
    scope : str
        What the verdict covers, for example ``verified up to degree 8``.
    notes : list of str
    """

    verdict: str
    certificates: list = field(default_factory=list)
    measure: AtomicMeasure | None = None
    index: int | None = None
    mass_at_infinity: float | None = None
    scope: str = ""
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.verdict in ("yes", "boundary", "interior")

    def to_json(self):
        return {
            "verdict": self.verdict,
            "certificates": [{"matrix": n, "min_eig": _fin(v)}
                             for n, v in self.certificates],
            "measure": self.measure.to_json() if self.measure is not None else None,
            "index": self.index,
            "mass_at_infinity": self.mass_at_infinity,
            "scope": self.scope,
            "notes": self.notes,
        }


def _fin(v):
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _horizon(s, N, extra=0):
    if N is None:
        if s.is_full:
            raise ValueError("a horizon N is required for a full sequence")
        N = (s.maxdeg - extra) // 2
    if not s.available(2 * N + extra):
        raise ValueError(f"need moments up to degree {2 * N + extra}")
    return int(N)


def hamburger_check(s, N: int | None = None, tol: float = PSD_TOL) -> ExistenceReport:
    """Positive semidefiniteness of ``H_0(s), ..., H_N(s)``.

    For the full problem on the line this is the complete criterion, so a
    ``yes`` means "no obstruction up to degree ``2N``".
    """
    s = _seq(s)
    N = _horizon(s, N)
    certs, verdict = [], "yes"
    for n in range(N + 1):
        st, lam = _classify(build_hankel(s, n).data, tol)
        certs.append((f"H_{n}", lam))
        if st == "indefinite":
            verdict = "no"
            break
    return ExistenceReport(verdict, certs, scope=f"verified up to degree {2 * N}")


def stieltjes_check(s, N: int | None = None, tol: float = PSD_TOL) -> ExistenceReport:
    """Positive semidefiniteness of ``H_n(s)`` and ``H_n(Es)`` for ``n <= N``.

    ``Es`` is the shifted sequence ``(s_1, s_2, ...)``.  When only
    ``s_0..s_2N`` is given, ``H_n(Es)`` is checked for ``n <= N - 1``.
    """
    s = _seq(s)
    N = _horizon(s, N)
    x = Polynomial.univariate([0.0, 1.0])
    certs, verdict = [], "yes"
    for n in range(N + 1):
        st, lam = _classify(build_hankel(s, n).data, tol)
        certs.append((f"H_{n}", lam))
        if st == "indefinite":
            verdict = "no"
            break
        if s.available(2 * n + 1):
            st, lam = _classify(build_hankel(s, n, x).data, tol)
            certs.append((f"H_{n}(Es)", lam))
            if st == "indefinite":
                verdict = "no"
                break
    top = 2 * N + 1 if s.available(2 * N + 1) else 2 * N
    return ExistenceReport(verdict, certs, scope=f"verified up to degree {top}")


def interval_truncated_check(s, a: float, b: float,
                             tol: float = PSD_TOL) -> ExistenceReport:
    """Decide whether ``s_0..s_m`` has a representing measure on ``[a, b]``.

    Examples
    --------
    >>> interval_truncated_check([1, 0, 1], -1, 1).verdict
    'yes'
    >>> interval_truncated_check([1, 0, 1], -0.5, 0.5).verdict
    'no'
    """
    if not a < b:
        raise ValueError("need a < b")
    s = _seq(s)
    if s.maxdeg is None:
        raise ValueError("a truncated sequence is required")
    certs, verdict = [], "yes"
    for name, H, _, _ in _interval_matrices(s, a, b):
        st, lam = _classify(H, tol)
        certs.append((name, lam))
        if st == "indefinite":
            verdict = "no"
    return ExistenceReport(verdict, certs, scope=f"[{a}, {b}], m = {s.maxdeg}")


def hausdorff_difference_check(s, N: int | None = None,
                               tol: float = 1e-9) -> ExistenceReport:
    """Hausdorff test on ``[0, 1]``: ``((I - E)^n s)_k >= 0`` for ``k + n <= N``.

    The tolerance is scaled by ``2^n max|s_k|`` to absorb cancellation.
    """
    s = _seq(s)
    if N is None:
        if s.is_full:
            raise ValueError("a horizon N is required for a full sequence")
        N = s.maxdeg
    v = s.values(N)
    top = max(1.0, float(np.abs(v).max()))
    worst, where = math.inf, None
    for n in range(N + 1):
        coef = np.array([(-1) ** j * math.comb(n, j) for j in range(n + 1)], float)
        for k in range(N - n + 1):
            d = float(coef @ v[k:k + n + 1])
            rel = d / (2 ** n * top)
            if rel < worst:
                worst, where = rel, (k, n)
    verdict = "yes" if worst >= -tol else "no"
    return ExistenceReport(verdict, [(f"difference k={where[0]}, n={where[1]}", worst)],
                           scope=f"[0, 1], k + n <= {N}")


def bernstein_check(s, N: int | None = None, tol: float = 1e-9) -> ExistenceReport:
    """Test on ``[-1, 1]``: ``L_s((1 - x)^k (1 + x)^l) >= 0`` for ``k + l <= N``."""
    s = _seq(s)
    if N is None:
        if s.is_full:
            raise ValueError("a horizon N is required for a full sequence")
        N = s.maxdeg
    v = s.values(N)
    top = max(1.0, float(np.abs(v).max()))
    one_m = np.polynomial.polynomial.Polynomial([1.0, -1.0])
    one_p = np.polynomial.polynomial.Polynomial([1.0, 1.0])
    worst, where = math.inf, None
    for k in range(N + 1):
        for l in range(N - k + 1):
            c = (one_m ** k * one_p ** l).coef
            val = float(c @ v[:len(c)]) / (2 ** (k + l) * top)
            if val < worst:
                worst, where = val, (k, l)
    verdict = "yes" if worst >= -tol else "no"
    return ExistenceReport(verdict, [(f"(1-x)^{where[0]}(1+x)^{where[1]}", worst)],
                           scope=f"[-1, 1], k + l <= {N}")


# ---------------------------------------------------------------------------
# finite support and atoms at infinity

@dataclass
class FiniteSupport:
    """Outcome of :func:`finite_support_detect`.

    ``atoms`` is the support size ``n`` when ``D_0..D_(n-1) > 0`` and
    ``D_n = 0``, else ``None`` (all determinants positive up to the horizon).
    """

    atoms: int | None
    determinants: list
    horizon: int
    note: str = ""

    def to_json(self):
        return {"atoms": self.atoms, "determinants": self.determinants,
                "horizon": self.horizon, "note": self.note}


def finite_support_detect(s, N: int | None = None,
                          tol: float = SING_TOL) -> FiniteSupport:
    """Detect a finitely atomic sequence from the Hankel determinant pattern.

    Raises
    ------
    ValueError
        If a leading Hankel matrix is indefinite before any singular one.
    """
    s = _seq(s)
    N = _horizon(s, N)
    dets = []
    for n in range(N + 1):
        H = build_hankel(s, n).data
        dets.append(float(np.linalg.det(H)))
        st, _ = _classify(H, PSD_TOL, tol)
        if st == "indefinite":
            raise ValueError(f"H_{n} is indefinite: the sequence is not positive semidefinite")
        if st == "singular":
            return FiniteSupport(n, dets, N)
    return FiniteSupport(None, dets, N, f"all determinants positive up to D_{N}")


def _gauss(vals, k):
    """``k``-node rule for a functional with ``H_(k-1)`` positive definite."""
    if k == 0:
        return np.zeros(0), np.zeros(0)
    H = np.array([[vals[i + j] for j in range(k)] for i in range(k)])
    rhs = -np.array(vals[k:2 * k])
    c = np.linalg.solve(H, rhs)
    nodes = np.sort(np.roots(np.concatenate([[1.0], c[::-1]])).real)
    V = _vander(nodes, 2 * k - 1)
    w, *_ = np.linalg.lstsq(V, np.asarray(vals[:2 * k]), rcond=None)
    return nodes, w


def atom_at_infinity_split(s) -> tuple[float, AtomicMeasure]:
    """Write ``s_0..s_2n`` as ``a e_2n + (moments of mu)`` with ``a`` maximal.

    ``a`` is the largest mass that can be taken from ``s_2n`` while
    ``H_n(s)`` stays positive semidefinite, i.e. the generalized Schur
    complement of the leading ``n x n`` block.

    Examples
    --------
    >>> a, mu = atom_at_infinity_split([0, 0, 1])
    >>> a, len(mu)
    (1.0, 0)
    """
    s = _seq(s)
    if s.maxdeg is None or s.maxdeg % 2:
        raise ValueError("need an even number 2n of moments beyond s_0")
    n = s.maxdeg // 2
    H = build_hankel(s, n).data
    st, _ = _classify(H)
    if st == "indefinite":
        raise ValueError("H_n(s) is not positive semidefinite")
    if n == 0:
        return float(s[0]), AtomicMeasure.empty(1)
    A, v = H[:n, :n], H[:n, n]
    w, U = np.linalg.eigh(A)
    top = max(1.0, float(np.abs(w).max()))
    keep = w > 1e-12 * top
    Ainv_v = U[:, keep] @ ((U[:, keep].T @ v) / w[keep])
    a = max(0.0, float(H[n, n] - v @ Ainv_v))
    if a <= 1e-12 * max(1.0, abs(H[n, n])):
        a = 0.0
    vals = s.values(2 * n).copy()
    vals[2 * n] -= a
    mu = _psd_measure(vals)
    return a, mu


def _psd_measure(vals):
    """Measure of a PSD 1D sequence with no mass at infinity."""
    vals = np.asarray(vals, dtype=float)
    n = (len(vals) - 1) // 2
    if vals[0] <= 0:
        return AtomicMeasure.empty(1)
    k = n + 1
    for j in range(1, n + 1):
        H = np.array([[vals[i + l] for l in range(j + 1)] for i in range(j + 1)])
        if _classify(H)[0] != "pd":
            k = j
            break
    else:
        # H_n positive definite: the Gauss rule with n + 1 nodes needs s_(2n+1)
        raise ValueError("H_n is nonsingular: the split leaves no atom structure")
    nodes, w = _gauss(vals, k)
    mu = _measure(nodes, np.maximum(w, 1e-300))
    return _refine(mu, vals, -math.inf, math.inf)


# ---------------------------------------------------------------------------
# compact interval: boundary, principal and canonical measures

def _boundary_measure(s: MomentSequence, a, b, names=None, tol=1e-8):
    """Unique measure of a boundary sequence from the degenerate matrices."""
    vals = s.values(s.maxdeg)
    m = s.maxdeg
    cands = []
    mats = _interval_matrices(s, a, b)
    ranked = []
    for name, H, _, order in mats:
        w, U = np.linalg.eigh((H + H.T) / 2)
        top = max(float(np.abs(w).max()), 1e-300) if w.size else 1.0
        ranked.append((w[0] / top if w.size else math.inf, name, U, order, w, top))
    ranked.sort(key=lambda r: r[0])
    for lam, name, U, order, w, top in ranked:
        if names is not None and name not in names:
            continue
        if names is None and lam > tol and ranked[0][0] != lam:
            continue
        cols = np.flatnonzero(w <= max(tol * top, w[0]))
        for c in cols:
            cands.extend(_real_roots(U[:, c], a, b))
        if m % 2 == 0:
            if name == "upper":
                cands.extend([a, b])
        else:
            cands.append(a if name == "lower" else b)
    pts = _merge(cands, MERGE_TOL * (b - a))
    if len(pts) == 0:
        return AtomicMeasure.empty(1)
    V = _vander(pts, m)
    scale = np.abs(V).max(axis=1)
    scale[scale == 0] = 1.0
    w, _ = nnls(V / scale[:, None], vals / scale)
    keep = w > 1e-12 * max(1.0, float(w.max()) if w.size else 1.0)
    mu = _measure(pts[keep], w[keep])
    return _refine(mu, vals, a, b)


def boundary_classify(s, a: float, b: float, tol: float = 1e-9) -> ExistenceReport:
    """Interior or boundary point of the moment cone on ``[a, b]``.

    On the boundary the unique representing measure and its index are
    returned.  Classification within a factor 100 of ``tol`` is flagged
    in the notes and reported as boundary.

    Raises
    ------
    ValueError
        If ``s`` has no representing measure on ``[a, b]``.
    """
    s = _seq(s)
    rep = interval_truncated_check(s, a, b)
    if rep.verdict != "yes":
        raise ValueError("sequence is not in the moment cone of [a, b]")
    vals = s.values(s.maxdeg)
    certs, degenerate, notes = [], [], []
    for name, H, _, _ in _interval_matrices(s, a, b):
        st, lam = _classify(H, PSD_TOL, tol)
        certs.append((name, lam))
        if st != "pd":
            degenerate.append(name)
        elif lam <= 100 * tol * max(1, H.shape[0]):
            notes.append(f"{name} matrix is nearly singular ({lam:.2e})")
    if not degenerate and not notes:
        return ExistenceReport("interior", certs, scope=f"[{a}, {b}], m = {s.maxdeg}")
    if not degenerate:
        notes.append("numerically ambiguous; treated as boundary")
        warnings.warn("ambiguous interior/boundary classification", RuntimeWarning)
    if vals[0] == 0 and not np.any(vals):
        mu = AtomicMeasure.empty(1)
    else:
        mu = _boundary_measure(s, a, b, degenerate or None)
    res = _moment_residual(mu, vals)
    if res > 1e-8 * max(1.0, float(np.abs(vals).max())):
        notes.append(f"moment residual {res:.2e}")
    return ExistenceReport("boundary", certs, mu, measure_index(mu, a, b),
                           scope=f"[{a}, {b}], m = {s.maxdeg}", notes=notes)


def max_mass(s, a: float, b: float, xi: float) -> tuple[float, str]:
    """Largest ``rho`` with ``s - rho s(xi)`` in the moment cone of ``[a, b]``.

    For each matrix ``H`` of the interval test with weight ``w`` the bound is
    ``1 / (w(xi) v(xi)^T H^{-1} v(xi))``; for ``H_n(s)`` this is the
    Christoffel function.  Returns the minimum and the attaining matrix.
    """
    s = _seq(s)
    best, which = math.inf, ""
    for name, H, weight, order in _interval_matrices(s, a, b):
        wt = weight(xi)
        if wt <= 0:
            continue
        v = xi ** np.arange(order + 1)
        try:
            L = np.linalg.cholesky(H)
        except np.linalg.LinAlgError:
            return 0.0, name
        u = np.linalg.solve(L, v)
        r = 1.0 / (wt * float(u @ u))
        if r < best:
            best, which = r, name
    return best, which


def _anchored(s, a, b, xi):
    rho, which = max_mass(s, a, b, xi)
    m = s.maxdeg
    vals = s.values(m)
    rest = vals - rho * xi ** np.arange(m + 1)
    mu = _boundary_measure(MomentSequence.univariate(rest), a, b, [which])
    pts = list(mu.points[:, 0]) + [xi]
    w = list(mu.weights) + [rho]
    out = _measure(pts, w)
    return out


def _require_interior(s, a, b):
    rep = boundary_classify(s, a, b)
    if rep.verdict != "interior":
        raise ValueError("sequence is not an interior point of the moment cone")


def principal_measures(s, a: float, b: float):
    """Lower and upper principal measures ``(mu_minus, mu_plus)`` on ``[a, b]``.

    Both have index ``m + 1``; ``b`` is an atom of ``mu_plus`` only.  The
    upper measure, and the lower one for even ``m``, come from removing
    the maximal mass at ``b`` (resp. ``a``).  For odd ``m = 2n + 1`` the lower
    measure is the ``n + 1`` point Gauss rule of ``s``, whose nodes are the
    zeros of the degree ``n + 1`` orthogonal polynomial.
    """
    s = _seq(s)
    _require_interior(s, a, b)
    m = s.maxdeg
    vals = s.values(m)
    plus = _refine(_anchored(s, a, b, b), vals, a, b)
    if m % 2 == 0:
        minus = _anchored(s, a, b, a)
    else:
        nodes, w = _gauss(vals, (m + 1) // 2)
        minus = _measure(nodes, w)
    minus = _refine(minus, vals, a, b)
    return minus, plus


def canonical_measure(s, a: float, b: float, xi: float) -> AtomicMeasure:
    """Canonical measure through ``xi`` in ``(a, b)``: index at most ``m + 2``."""
    if not a < xi < b:
        raise ValueError("xi must lie strictly between a and b")
    s = _seq(s)
    _require_interior(s, a, b)
    mu = _anchored(s, a, b, xi)
    return _refine(mu, s.values(s.maxdeg), a, b, fixed=(xi,))


# ---------------------------------------------------------------------------
# semi-algebraic subsets of the line

@dataclass(frozen=True)
class IntervalUnion:
    """Sorted disjoint closed intervals; ``(t, t)`` is a point, ends may be infinite."""

    intervals: tuple

    def __post_init__(self):
        iv = tuple((float(lo), float(hi)) for lo, hi in self.intervals)
        for lo, hi in iv:
            if lo > hi:
                raise ValueError(f"empty interval ({lo}, {hi})")
        for (l1, h1), (l2, h2) in zip(iv, iv[1:]):
            if not h1 < l2:
                raise ValueError("intervals must be sorted and disjoint")
        object.__setattr__(self, "intervals", iv)

    @classmethod
    def real_line(cls):
        return cls(((-math.inf, math.inf),))

    def is_empty(self):
        return not self.intervals

    def is_compact(self):
        return bool(self.intervals) and math.isfinite(self.intervals[0][0]) \
            and math.isfinite(self.intervals[-1][1])

    def is_real_line(self):
        return self.intervals == ((-math.inf, math.inf),)

    def contains(self, x, tol=0.0):
        return any(lo - tol <= x <= hi + tol for lo, hi in self.intervals)

    def to_json(self):
        return [[_fin(lo), _fin(hi)] for lo, hi in self.intervals]

    def __str__(self):
        def piece(lo, hi):
            if lo == hi:
                return f"{{{lo:g}}}"
            l = "(-inf" if lo == -math.inf else f"[{lo:g}"
            h = "inf)" if hi == math.inf else f"{hi:g}]"
            return f"{l}, {h}"
        return " u ".join(piece(*i) for i in self.intervals) or "empty"


def semialgebraic_set(f: Sequence[Polynomial], tol: float = 1e-9) -> IntervalUnion:
    """``K(f) = {x : f_j(x) >= 0}`` for univariate ``f`` by root analysis."""
    polys = list(f)
    for p in polys:
        if p.dim != 1:
            raise ValueError("univariate polynomials are required")
    roots = []
    for p in polys:
        if p.is_zero() or p.degree <= 0:
            continue
        roots.extend(_real_roots(p.univariate_coeffs()))
    roots = list(_merge(roots, tol))

    def inside(x):
        return all(p(x) >= -tol * max(1.0, p.norm()) for p in polys)

    # alternate cells and roots: cell_0, r_1, cell_1, ..., r_k, cell_k
    tests = []
    if not roots:
        tests.append(("cell", -math.inf, math.inf, inside(0.0)))
    else:
        tests.append(("cell", -math.inf, roots[0], inside(roots[0] - 1.0)))
        for i, r in enumerate(roots):
            tests.append(("point", r, r, inside(r)))
            nxt = roots[i + 1] if i + 1 < len(roots) else math.inf
            mid = (r + nxt) / 2 if math.isfinite(nxt) else r + 1.0
            tests.append(("cell", r, nxt, inside(mid)))
    out = []
    for _, lo, hi, ok in tests:
        if not ok:
            continue
        if out and out[-1][1] == lo:
            out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return IntervalUnion(tuple(out))


def natural_generators(K: IntervalUnion) -> list:
    """Smallest generator set ``g`` with ``Pos(K) = T(g)``.

    Rules: ``x - a`` for a least element ``a``, ``a - x`` for a greatest
    element ``a``, and ``(x - a)(x - b)`` for each gap ``(a, b)``.
    """
    if K.is_empty():
        raise ValueError("K is empty")
    x = Polynomial.univariate([0.0, 1.0])
    if K.is_real_line():
        return [Polynomial.constant(1, 1.0)]
    iv = K.intervals
    g = []
    if math.isfinite(iv[0][0]):
        g.append(x - iv[0][0])
    for (_, h), (l, _) in zip(iv, iv[1:]):
        g.append((x - h) * (x - l))
    if math.isfinite(iv[-1][1]):
        g.append(iv[-1][1] - x)
    return g


def _positive_multiple(p: Polynomial, g: Polynomial, tol=1e-9):
    keys = sorted(set(p.terms) | set(g.terms))
    u = np.array([p.coeff(k) for k in keys])
    v = np.array([g.coeff(k) for k in keys])
    c = float(u @ v) / float(v @ v)
    return c > 0 and np.linalg.norm(u - c * v) <= tol * max(1.0, np.linalg.norm(u))


@dataclass
class SMPReport:
    """Outcome of :func:`smp_check`."""

    verdict: str
    K: IntervalUnion
    generators: list
    missing: list
    reason: str

    def to_json(self):
        return {"verdict": self.verdict, "K": self.K.to_json(),
                "generators": [g.to_json() for g in self.generators],
                "missing": [g.to_json() for g in self.missing],
                "reason": self.reason}


def smp_check(f: Sequence[Polynomial]) -> SMPReport:
    """Does the preordering ``T(f)`` on the line have the strong moment property?

    Compact ``K(f)`` always does.  Otherwise the answer is yes iff ``f``
    contains a positive multiple of every natural generator of ``K(f)``.

    Examples
    --------
    >>> x = Polynomial.univariate([0, 1])
    >>> smp_check([x ** 3]).verdict, smp_check([x]).verdict
    ('no', 'yes')
    """
    f = list(f)
    K = semialgebraic_set(f)
    if K.is_empty():
        raise ValueError("K(f) is empty")
    gens = natural_generators(K)
    if K.is_compact():
        return SMPReport("yes", K, gens, [], "K(f) is compact")
    missing = [g for g in gens
               if not (g.degree == 0 or any(_positive_multiple(p, g) for p in f))]
    verdict = "no" if missing else "yes"
    reason = ("f lacks positive multiples of some natural generators" if missing
              else "f contains positive multiples of all natural generators")
    return SMPReport(verdict, K, gens, missing, reason)
