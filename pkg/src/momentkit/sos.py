"""
Sums of squares, quadratic modules and preorderings at fixed degree.

Membership of ``p`` in the truncated module ``{sum_e g_e sigma_e}`` with
``deg(g_e sigma_e) <= 2n`` is decided through a margin problem ::

    maximize t   subject to   p - t * Theta = sum_e g_e x_e^T Z_e x_e,
                              Z_e >= 0,  t <= 1,

where ``x_e`` is the monomial vector of degree ``n_e`` and
``Theta = sum_e g_e |x_e|^2``.  Both sides of this program are strictly
feasible whenever the module contains an interior point, so the interior
point solver behaves well; ``p`` is a member iff the optimal margin is
nonnegative, in which case ``G_e = Z_e + t I`` are Gram matrices for
``p``.  A negative margin comes with a moment functional ``L`` that is
nonnegative on the truncated module and has ``L(p) < 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._lmi import localizing_block, shift_relaxation, variable_index
from .poly import ConstraintSet, Polynomial, monomials
from .sdp import DUAL_INFEASIBLE, OPTIMAL, SDPProblem, SDPSolution, sdp_solve

__all__ = [
    "SosCertificate",
    "SosResult",
    "sos_decompose",
    "qmodule_membership",
    "archimedean_certificate",
    "gram_polynomial",
]

CLIP = -1e-9
RESIDUAL_TOL = 1e-7
AMBIGUOUS = 1e-6


@dataclass
class SosCertificate:
    """Weighted Gram representation ``p = sum_e g_e (x_e^T G_e x_e)``.

    Attributes
    ----------
    target : Polynomial
    multipliers : list of Polynomial
        The weights ``g_e`` (``1`` first).
    labels : list of str
        Human-readable names of the weights.
    bases : list of list of tuple
        Monomial exponents indexing each Gram matrix.
    grams : list of ndarray
        Positive semidefinite Gram matrices.
    residual : float
        Largest coefficient error of the reconstruction, relative to
        ``max(1, ||p||)``.
    margin : float
        Optimal value of the margin program.
    """

    target: Polynomial
    multipliers: list
    labels: list
    bases: list
    grams: list
    residual: float = math.nan
    margin: float = math.nan

    def sigmas(self):
        """The sums of squares ``x_e^T G_e x_e`` as polynomials."""
        return [gram_polynomial(G, B, self.target.dim)
                for G, B in zip(self.grams, self.bases)]

    def reconstruct(self):
        total = Polynomial(self.target.dim)
        for g, s in zip(self.multipliers, self.sigmas()):
            total = total + g * s
        return total

    def check(self):
        """Recompute the relative reconstruction residual."""
        diff = self.reconstruct() - self.target
        err = max((abs(c) for c in diff.terms.values()), default=0.0)
        return err / max(1.0, self.target.norm())

    def to_json(self):
        return {
            "target": self.target.to_json(),
            "terms": [{"label": lab, "multiplier": g.to_json(),
                       "basis": [list(a) for a in B],
                       "gram": np.asarray(G).tolist()}
                      for lab, g, B, G in zip(self.labels, self.multipliers,
                                              self.bases, self.grams)],
            "residual": self.residual,
            "margin": self.margin,
        }


@dataclass
class SosResult:
    """Outcome of a membership test.

    ``status`` is ``feasible``, ``infeasible`` (only from
    :func:`sos_decompose`), ``unknown`` (membership tests at a fixed level)
    or ``solver_failure``.  ``ray`` maps exponents to the values of a
    separating moment functional.
    """

    status: str
    certificate: SosCertificate | None = None
    ray: dict | None = None
    margin: float = math.nan
    solution: SDPSolution | None = None
    notes: list = field(default_factory=list)

    @property
    def feasible(self):
        return self.status == "feasible"

    def to_json(self):
        out = {"status": self.status, "margin": self.margin, "notes": self.notes}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        if self.ray is not None:
            out["ray"] = [{"alpha": list(a), "L": v} for a, v in self.ray.items()]
        return out


def gram_polynomial(G, basis, dim):
    """``x^T G x`` over the exponent list ``basis``."""
    terms = {}
    for i, a in enumerate(basis):
        for j, b in enumerate(basis):
            g = tuple(x + y for x, y in zip(a, b))
            terms[g] = terms.get(g, 0.0) + float(G[i][j])
    return Polynomial(dim, terms)


def _psd_clip(G):
    w, V = np.linalg.eigh((G + G.T) / 2)
    scale = max(1.0, float(np.abs(w).max()) if w.size else 0.0)
    clipped = bool(np.any(w < 0))
    w = np.where(w < CLIP * scale, w, np.maximum(w, 0.0))
    return (V * w) @ V.T, clipped, float(w.min()) if w.size else 0.0


def _membership(p: Polynomial, multipliers, labels, n, tol=1e-9):
    dim = p.dim
    if p.degree > 2 * n:
        raise ValueError(f"deg p = {p.degree} exceeds 2n = {2 * n}")
    items = []
    for g, lab in zip(multipliers, labels):
        ne = (2 * n - int(max(g.degree, 0))) // 2
        if ne >= 0:
            items.append((g, lab, monomials(dim, ne)))
    alphas, index = variable_index(dim, 2 * n)
    nv = len(alphas)
    blocks = []
    theta = Polynomial(dim)
    for g, lab, B in items:
        blocks.append(localizing_block(g, B, index, nv))
        theta = theta + g * Polynomial(dim, {tuple(2 * x for x in a): 1.0 for a in B})
    th = np.array([theta.coeff(a) for a in alphas])
    pv = np.array([p.coeff(a) for a in alphas])
    scalar = np.zeros((nv + 1, 1, 1))
    scalar[0, 0, 0] = 1.0
    scalar[1:, 0, 0] = -th
    blocks.append(scalar)
    P = SDPProblem(pv - th, blocks)
    sol = sdp_solve(P, tol=tol, max_iter=150)
    notes = []
    if sol.status == "dual_infeasible":
        # the functional side is unbounded: cannot happen with t <= 1
        return "solver_failure", None, None, math.nan, sol, ["unexpected unboundedness"]
    if sol.status == "primal_infeasible":
        # no functional with L(Theta) <= 1 on the module cone: margin +inf
        notes.append("moment side infeasible")
        return "solver_failure", None, None, math.inf, sol, notes
    if sol.status != OPTIMAL:
        if sol.y is None or sol.Z is None:
            return "solver_failure", None, None, math.nan, sol, [sol.diagnostics.get("note", "")]
        notes.append("interior point did not reach tolerance; using best iterate")
    t_primal = 1.0 + sol.primal_obj
    t_dual = 1.0 - float(sol.Z[-1][0, 0])
    margin = t_dual
    scale = max(1.0, p.norm())
    if sol.status != OPTIMAL and abs(t_primal - t_dual) > 1e-5 * scale:
        return "solver_failure", None, None, margin, sol, notes
    if margin < -1e-7 * scale and t_primal < -1e-7 * scale:
        y = sol.y
        ray = {a: float(v) for a, v in zip(alphas, y)}
        return "infeasible", None, ray, margin, sol, notes
    if abs(margin) <= AMBIGUOUS * scale:
        ray = _shift_test(p, [g for g, _, _ in items], n, tol, scale, notes)
        if ray is not None:
            return "infeasible", None, ray, margin, sol, notes
    grams = []
    for (g, lab, B), Zb in zip(items, sol.Z[:-1]):
        G, clipped, _ = _psd_clip(Zb + margin * np.eye(len(B)))
        grams.append(G)
    cert = SosCertificate(p, [g for g, _, _ in items], [lab for _, lab, _ in items],
                          [B for _, _, B in items], grams, margin=margin)
    cert.residual = cert.check()
    if cert.residual > RESIDUAL_TOL:
        cert = _polish(cert)
    if cert.residual > RESIDUAL_TOL:
        notes.append(f"reconstruction residual {cert.residual:.2e} too large")
        if margin < 0:
            ray = {a: float(v) for a, v in zip(alphas, sol.y)}
            return "infeasible", None, ray, margin, sol, notes
        return "solver_failure", cert, None, margin, sol, notes
    return "feasible", cert, None, margin, sol, notes


def _shift_test(p, multipliers, n, tol, scale, notes):
    """Separate a zero margin: is ``p - lam`` in the cone for some ``lam``?

    A margin of zero is attained both on the boundary of the truncated cone
    and by polynomials outside it whose separating functionals vanish on
    ``Theta``.  The largest constant shift tells the two apart: it is
    ``-inf`` (with an exact improving direction) in the second case and a
    finite ``lam* <= 0`` close to zero in the first.  Returns a separating
    functional or ``None``.
    """
    P = shift_relaxation(p, multipliers, n)
    sol = sdp_solve(P, tol=min(tol, 1e-8), max_iter=150)
    zero = tuple([0] * p.dim)
    if sol.status == DUAL_INFEASIBLE:
        notes.append("margin is zero but no constant shift enters the cone")
        ray = {zero: 0.0}
        ray.update({a: float(v) for a, v in zip(P.alphas, sol.y)})
        return ray
    if sol.status == OPTIMAL:
        lam = P.offset + sol.dual_obj
        if lam < -1e-6 * scale:
            notes.append(f"largest constant shift {lam:.3g} is negative")
            ray = {zero: 1.0}
            ray.update({a: float(v) for a, v in zip(P.alphas, sol.y)})
            return ray
    return None


def _polish(cert: SosCertificate):
    """Least-norm Gram correction removing the coefficient residual."""
    dim = cert.target.dim
    diff = cert.target - cert.reconstruct()
    if diff.is_zero():
        return cert
    # linear map from the stacked Gram entries to coefficients
    cols, index = [], {}
    coeff_rows = {}
    for e, (g, B) in enumerate(zip(cert.multipliers, cert.bases)):
        for i in range(len(B)):
            for j in range(i, len(B)):
                mono = tuple(x + y for x, y in zip(B[i], B[j]))
                w = 1.0 if i == j else 2.0
                col = len(cols)
                cols.append((e, i, j))
                for gam, c in g.terms.items():
                    a = tuple(x + y for x, y in zip(mono, gam))
                    coeff_rows.setdefault(a, {})
                    coeff_rows[a][col] = coeff_rows[a].get(col, 0.0) + w * c
    keys = sorted(set(coeff_rows) | set(diff.terms))
    A = np.zeros((len(keys), len(cols)))
    for r, a in enumerate(keys):
        for col, v in coeff_rows.get(a, {}).items():
            A[r, col] = v
    rhs = np.array([diff.coeff(a) for a in keys])
    delta, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    grams = [G.copy() for G in cert.grams]
    for (e, i, j), v in zip(cols, delta):
        grams[e][i, j] += v
        if i != j:
            grams[e][j, i] += v
    new = SosCertificate(cert.target, cert.multipliers, cert.labels, cert.bases,
                         grams, margin=cert.margin)
    if all(np.linalg.eigvalsh(G)[0] >= CLIP * max(1.0, np.abs(G).max())
           for G in grams if G.size):
        new.residual = new.check()
        if new.residual < cert.residual:
            return new
    return cert


def sos_decompose(p: Polynomial, n: int, tol: float = 1e-9) -> SosResult:
    """Decide whether ``p`` is a sum of squares of polynomials of degree ``<= n``.

    Returns
    -------
    SosResult
        ``feasible`` with a Gram certificate, ``infeasible`` with a
        separating moment functional, or ``solver_failure``.
    """
    one = Polynomial.constant(p.dim, 1.0)
    status, cert, ray, margin, sol, notes = _membership(p, [one], ["1"], n, tol)
    return SosResult(status, cert, ray, margin, sol, notes)


def qmodule_membership(p: Polynomial, f: ConstraintSet, n: int,
                       preordering: bool = False, tol: float = 1e-9) -> SosResult:
    """Test ``p`` against the degree-``2n`` truncation of ``Q(f)`` or ``T(f)``.

    An infeasible program only shows that no representation of this degree
    exists, so the verdict is then ``unknown``.
    """
    if p.dim != f.dim:
        raise ValueError("dimension mismatch")
    if preordering:
        mults, labels = [], []
        for mask, g in f.products():
            mults.append(g)
            labels.append("*".join(f"f{j + 1}" for j, e in enumerate(mask) if e) or "1")
    else:
        mults = [Polynomial.constant(p.dim, 1.0)] + list(f.polys)
        labels = ["1"] + [f"f{j + 1}" for j in range(len(f))]
    status, cert, ray, margin, sol, notes = _membership(p, mults, labels, n, tol)
    if status == "infeasible":
        status = "unknown"
    return SosResult(status, cert, ray, margin, sol, notes)


def archimedean_certificate(f: ConstraintSet, lam: float, n: int,
                            preordering: bool = False) -> SosResult:
    """Look for ``lam - sum_k x_k^2`` in the truncated module.

    A feasible result proves the module Archimedean.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    d = f.dim
    target = Polynomial.constant(d, lam)
    for a in monomials(d, 1, 1):
        target = target - Polynomial.monomial(tuple(2 * x for x in a))
    return qmodule_membership(target, f, n, preordering)
