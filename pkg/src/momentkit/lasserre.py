"""
Moment and sum-of-squares relaxations of polynomial minimization.

Level convention
----------------
Level ``n`` uses moments up to total degree ``2n``: the moment matrix is
``H_n(y)`` and the localizing matrix of ``f_j`` is ``H_{n_j}(f_j y)`` with
``n_j = n - ceil(deg f_j / 2)``.  In this convention the Motzkin polynomial
(degree 6) enters at level 3.

For a problem ``min p(x) s.t. f_j(x) >= 0`` the moment relaxation is the
primal (y-) problem of an :class:`~momentkit.sdp.SDPProblem` and the SOS
relaxation is its dual (Z-) problem, so one solve yields both bounds::

    p_mom = p_0 + b^T y,     p_sos = p_0 - <A_0, Z>.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._lmi import shift_relaxation
from .atoms import AtomExtractionError, extract_atoms_flat
from .hankel import build_hankel, numeric_rank
from .moments import AtomicMeasure, MomentSequence
from .poly import ConstraintSet, Polynomial
from .sdp import (DUAL_INFEASIBLE, OPTIMAL, PRIMAL_INFEASIBLE, SDPProblem,
                  SDPSolution, sdp_solve)

__all__ = [
    "RelaxationLevel",
    "build_moment_relaxation",
    "build_sos_relaxation",
    "solve_relaxation",
    "solve_hierarchy",
]

FLAT_RANK_TOL = 1e-6
ATOM_K_TOL = 1e-6


@dataclass
class RelaxationLevel:
    """Bounds and diagnostics of one relaxation level.

    Attributes
    ----------
    n : int
    moment_problem, sos_problem : SDPProblem
        The same object; the SOS program is its dual.
    p_mom, p_sos : float
        Bounds; ``-inf`` when the relaxation is unbounded.
    status : str
        Solver status.
    flat : bool
        Whether the rank test fired and atom extraction succeeded.
    flat_order : int or None
        Order ``t`` with ``rank H_t = rank H_{t - dK}``.
    extracted : AtomicMeasure or None
    certified : bool
        Flat, atoms in ``K(f)`` and ``p`` at the atoms equal to ``p_mom``.
    moments : MomentSequence or None
        The optimal moment vector.
    notes : list of str
    """

    n: int
    moment_problem: SDPProblem
    sos_problem: SDPProblem
    p_mom: float = math.nan
    p_sos: float = math.nan
    status: str = ""
    flat: bool = False
    flat_order: int | None = None
    extracted: AtomicMeasure | None = None
    certified: bool = False
    moments: MomentSequence | None = None
    solution: SDPSolution | None = None
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "n": self.n,
            "p_mom": _num(self.p_mom),
            "p_sos": _num(self.p_sos),
            "status": self.status,
            "flat": self.flat,
            "certified": self.certified,
            "atoms": self.extracted.to_json()["atoms"] if self.extracted is not None else None,
            "notes": self.notes,
        }


def _num(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return None
    if isinstance(v, float) and math.isinf(v):
        return "-inf" if v < 0 else "inf"
    return float(v)


def _half(deg):
    return int(math.ceil(max(deg, 0) / 2))


def _check_level(p, f, n):
    if p.dim != f.dim:
        raise ValueError("objective and constraints differ in dimension")
    need = max([_half(p.degree)] + [_half(g.degree) for g in f.polys])
    if n < max(need, 1):
        raise ValueError(f"level {n} is below the minimal level {max(need, 1)}")


def build_moment_relaxation(p: Polynomial, f: ConstraintSet, n: int) -> SDPProblem:
    """Moment relaxation of ``min p`` over ``K(f)`` at level ``n``.

    Variables are ``y_alpha`` for ``0 < |alpha| <= 2n`` (``y_0 = 1`` is
    substituted); the LMI is block diagonal with the moment matrix
    ``H_n(y)`` and the localizing matrices ``H_{n_j}(f_j y)``.  The
    objective omits the constant ``p_0``, stored as ``P.offset``.
    """
    _check_level(p, f, n)
    one = Polynomial.constant(p.dim, 1.0)
    return shift_relaxation(p, [one] + list(f.polys), n)


def build_sos_relaxation(p: Polynomial, f: ConstraintSet, n: int) -> SDPProblem:
    """SOS relaxation ``sup {lam : p - lam in Q(f)_n}`` as an SDP.

    The SOS program is the dual of the moment program, so the returned
    problem is the same data; read the bound off ``-<A_0, Z>``.
    """
    return build_moment_relaxation(p, f, n)


def solve_relaxation(p: Polynomial, f: ConstraintSet, n: int,
                     tol: float = 1e-8, seed: int = 0,
                     rank_tol: float = FLAT_RANK_TOL) -> RelaxationLevel:
    """Solve one level and run the flat-extension stopping test."""
    P = build_moment_relaxation(p, f, n)
    lev = RelaxationLevel(n, P, P)
    sol = sdp_solve(P, tol=tol, max_iter=200)
    lev.solution = sol
    lev.status = sol.status
    off = P.offset
    if sol.status == PRIMAL_INFEASIBLE:
        lev.p_mom, lev.p_sos = math.inf, math.inf
        lev.notes.append("moment relaxation infeasible: K(f) is empty")
        return lev
    if sol.status == DUAL_INFEASIBLE:
        lev.p_mom = lev.p_sos = -math.inf
        lev.notes.append("relaxation unbounded below")
        return lev
    if sol.y is None or sol.Z is None:
        lev.notes.append("solver failure: " + str(sol.diagnostics.get("note")))
        return lev
    lev.p_mom = off + sol.primal_obj
    lev.p_sos = off + sol.dual_obj
    if sol.status != OPTIMAL:
        lev.notes.append("solver stopped early: " + str(
            sol.diagnostics.get("reason", sol.diagnostics.get("note", ""))))
    ent = {(0,) * p.dim: 1.0}
    ent.update({a: float(v) for a, v in zip(P.alphas, sol.y)})
    seq = MomentSequence(p.dim, ent, 2 * n)
    lev.moments = seq
    _flat_test(lev, p, f, seq, n, seed, rank_tol)
    return lev


def _flat_test(lev, p, f, seq, n, seed, rank_tol):
    dK = max([1] + [_half(g.degree) for g in f.polys])
    ranks = [numeric_rank(build_hankel(seq, t), rank_tol) for t in range(n + 1)]
    # solver noise can make a high order look flat; try each candidate
    mu = None
    for t in range(n, dK - 1, -1):
        if ranks[t] != ranks[t - dK]:
            continue
        lev.flat_order = t
        try:
            mu = extract_atoms_flat(seq, t, rank_tol=rank_tol, seed=seed,
                                    verify_tol=1e-5)
            break
        except AtomExtractionError as exc:
            lev.notes.append(f"rank test fired at t={t} but extraction failed: {exc}")
    if mu is None:
        return
    lev.flat = True
    lev.extracted = mu
    scale = 1.0 + abs(lev.p_mom)
    inK = all(g(x) >= -ATOM_K_TOL for g in f.polys for x in mu.points)
    vals = [p(x) for x in mu.points]
    match = all(abs(v - lev.p_mom) <= 1e-5 * scale for v in vals)
    lev.certified = bool(inK and match)
    if not inK:
        lev.notes.append("extracted atoms leave K(f)")
    if not match:
        lev.notes.append("objective at atoms differs from the bound")


def solve_hierarchy(p: Polynomial, f: ConstraintSet, n_min: int, n_max: int,
                    tol: float = 1e-8, seed: int = 0, stop_when_certified=False,
                    jobs: int = 1):
    """Solve levels ``n_min..n_max`` and report bounds per level.

    Parameters
    ----------
    stop_when_certified : bool
        Stop after the first level whose flat test certifies optimality.
    jobs : int
        Solve levels in parallel with a thread pool when ``> 1``
        (ignored together with ``stop_when_certified``).

    Returns
    -------
    list of RelaxationLevel
        In increasing ``n``.  Solver failures are recorded in the level
        notes and do not stop the sweep.
    """
    _check_level(p, f, n_min)
    levels = list(range(n_min, n_max + 1))

    def run(n):
        try:
            return solve_relaxation(p, f, n, tol=tol, seed=seed)
        except (np.linalg.LinAlgError, ValueError) as exc:
            P = build_moment_relaxation(p, f, n)
            lev = RelaxationLevel(n, P, P, status="error")
            lev.notes.append(f"solver error: {exc}")
            return lev

    if jobs > 1 and not stop_when_certified:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(run, levels))
    else:
        out = []
        for n in levels:
            out.append(run(n))
            if stop_when_certified and out[-1].certified:
                break
    # monotonicity bookkeeping
    for prev, cur in zip(out, out[1:]):
        for name in ("p_mom", "p_sos"):
            a, b = getattr(prev, name), getattr(cur, name)
            if np.isfinite(a) and np.isfinite(b) and b < a - 1e-7 * (1 + abs(a)):
                cur.notes.append(f"{name} decreased by {a - b:.2e}")
    return out
