"""
Small dense semidefinite programs.

Conventions
-----------
The *primal* (y-) problem is ::

    minimize    b^T y
    subject to  A(y) = A_0 + y_1 A_1 + ... + y_m A_m  >= 0

and the *dual* (Z-) problem is ::

    maximize    -<A_0, Z>
    subject to  <A_j, Z> = b_j,  j = 1..m,   Z >= 0.

All matrices are block diagonal with the block sizes in
``SDPProblem.blocks``.  Any feasible pair satisfies
``b^T y >= -<A_0, Z>`` (weak duality).

Infeasibility certificates
--------------------------
* ``primal_infeasible``: a matrix ``Z >= 0`` with ``<A_j, Z> = 0`` for all
  ``j >= 1`` and ``<A_0, Z> = -1``.
* ``dual_infeasible``: a direction ``d`` with ``sum_j d_j A_j >= 0`` and
  ``b^T d = -1``.

The solver is a homogeneous self-dual interior point method with
Nesterov-Todd scaling and Mehrotra predictor-corrector steps.  Before the
interior point solve, a linear-programming pass looks for diagonal
facial-reduction certificates; it detects some infeasible problems
exactly and shrinks problems that lack strictly feasible points, which is
what makes instances with a nonzero duality gap tractable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linprog

__all__ = [
    "SDPProblem",
    "SDPSolution",
    "sdp_solve",
    "weak_duality_check",
    "lambda_max_problem",
    "gap_example",
    "write_sdpa",
    "read_sdpa",
]

OPTIMAL = "optimal"
PRIMAL_INFEASIBLE = "primal_infeasible"
DUAL_INFEASIBLE = "dual_infeasible"
MAX_ITER = "max_iter"


class SDPProblem:
    """Block-diagonal linear matrix inequality data.

    Parameters
    ----------
    b : array_like, shape (m,)
        Objective of the y-problem.
    blocks : sequence of array_like
        One array per block, of shape ``(m + 1, n_k, n_k)``; slice ``0`` is
        the block of ``A_0`` and slice ``i`` the block of ``A_i``.
    labels : sequence of str, optional
        Names of the variables, carried into reports.
    """

    def __init__(self, b, blocks, labels=None):
        self.b = np.asarray(b, dtype=float).ravel()
        m = self.b.shape[0]
        F = []
        for blk in blocks:
            blk = np.asarray(blk, dtype=float)
            if blk.ndim != 3 or blk.shape[0] != m + 1 or blk.shape[1] != blk.shape[2]:
                raise ValueError(
                    f"block of shape {blk.shape} does not fit {m} variables")
            if not np.allclose(blk, blk.transpose(0, 2, 1), atol=1e-12, rtol=0):
                raise ValueError("block data is not symmetric")
            blk = (blk + blk.transpose(0, 2, 1)) / 2
            blk.setflags(write=False)
            F.append(blk)
        if not np.all(np.isfinite(self.b)):
            raise ValueError("objective is not finite")
        self.F = tuple(F)
        self.labels = list(labels) if labels is not None else None

    @property
    def m(self):
        return self.b.shape[0]

    @property
    def blocks(self):
        return tuple(f.shape[1] for f in self.F)

    def A(self, i):
        """Blocks of ``A_i`` (``i = 0`` is the constant term)."""
        return [f[i] for f in self.F]

    def lmi(self, y):
        """Blocks of ``A(y)``."""
        y = np.asarray(y, dtype=float).ravel()
        return [f[0] + np.tensordot(y, f[1:], axes=1) for f in self.F]

    def constraint_values(self, Z):
        """The vector ``(<A_j, Z>)_j`` for block data ``Z``."""
        out = np.zeros(self.m)
        for f, z in zip(self.F, Z):
            out += np.tensordot(f[1:], z, axes=([1, 2], [0, 1]))
        return out

    def a0_dot(self, Z):
        return float(sum(np.sum(f[0] * z) for f, z in zip(self.F, Z)))

    def dense(self, i):
        """``A_i`` as one dense block-diagonal matrix."""
        return sla.block_diag(*self.A(i)) if self.F else np.zeros((0, 0))

    def __repr__(self):
        return f"SDPProblem(m={self.m}, blocks={list(self.blocks)})"


@dataclass
class SDPSolution:
    """Result of :func:`sdp_solve`.

    Attributes
    ----------
    status : str
        ``optimal``, ``primal_infeasible``, ``dual_infeasible`` or
        ``max_iter``.
    y : ndarray or None
        Primal point, or the improving direction for ``dual_infeasible``.
    Z : list of ndarray or None
        Dual blocks, or the certificate for ``primal_infeasible``.
    primal_obj, dual_obj : float
        ``b^T y`` and ``-<A_0, Z>``.
    gap : float
        ``primal_obj - dual_obj``.
    residuals : dict
        Primal/dual feasibility residuals of the returned point.
    diagnostics : dict
        Iteration counts, facial reduction steps, and free-form notes.
    history : list of dict
        Per-iterate ``y``, ``Z``, objective values and residuals.
    """

    status: str
    y: np.ndarray | None
    Z: list | None
    primal_obj: float = math.nan
    dual_obj: float = math.nan
    gap: float = math.nan
    residuals: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    history: list = field(default_factory=list)

    @property
    def optimal(self):
        return self.status == OPTIMAL


# ---------------------------------------------------------------------------
# interior point core

def _nt_scaling(S, Z):
    # R with R^{-1} S R^{-T} = R^T Z R = diag(lam)
    Ls = np.linalg.cholesky(S)
    Lz = np.linalg.cholesky(Z)
    U, lam, Vt = np.linalg.svd(Lz.T @ Ls)
    R = Ls @ Vt.T / np.sqrt(lam)
    Rinv = (np.sqrt(lam)[:, None] * Vt) @ sla.solve_triangular(
        Ls, np.eye(len(lam)), lower=True)
    return R, Rinv, lam


def _max_step(lam, D):
    # largest a with diag(lam) + a D >= 0
    if D.size == 0:
        return math.inf
    s = 1.0 / np.sqrt(lam)
    w = np.linalg.eigvalsh(s[:, None] * D * s[None, :])
    return math.inf if w[0] >= 0 else -1.0 / w[0]


def _jordan(A, B):
    return (A @ B + B @ A) / 2


def _ipm(F, b, tol, max_iter, ray_tol):
    """Homogeneous self-dual embedding solve of one problem."""
    m = b.shape[0]
    sizes = [f.shape[1] for f in F]
    N = sum(sizes)
    x = np.zeros(m)
    S = [np.eye(n) for n in sizes]
    Z = [np.eye(n) for n in sizes]
    tau = kappa = 1.0
    hnorm = max(1.0, math.sqrt(sum(np.sum(f[0] ** 2) for f in F)))
    bnorm = max(1.0, float(np.linalg.norm(b)))
    Anorm = max([1.0] + [float(np.abs(f[1:]).max()) for f in F if f.shape[0] > 1])
    history = []
    best = None
    status = MAX_ITER
    note = ""
    it = 0

    def unscaled(x, S, Z, tau):
        y = x / tau
        Zh = [z / tau for z in Z]
        Sh = [s / tau for s in S]
        lmi = [f[0] + np.tensordot(y, f[1:], axes=1) for f in F]
        pres = math.sqrt(sum(np.sum((l - s) ** 2) for l, s in zip(lmi, Sh))) / hnorm
        AZ = np.zeros(m)
        for f, z in zip(F, Zh):
            AZ += np.tensordot(f[1:], z, axes=([1, 2], [0, 1]))
        dres = float(np.linalg.norm(AZ - b)) / bnorm
        pobj = float(b @ y)
        dobj = -float(sum(np.sum(f[0] * z) for f, z in zip(F, Zh)))
        comp = float(sum(np.sum(s * z) for s, z in zip(Sh, Zh)))
        return y, Zh, pres, dres, pobj, dobj, comp

    for it in range(1, max_iter + 1):
        # residuals of the embedding
        AZ = np.zeros(m)
        for f, z in zip(F, Z):
            AZ += np.tensordot(f[1:], z, axes=([1, 2], [0, 1]))
        F1 = -AZ + b * tau
        F2 = [-np.tensordot(x, f[1:], axes=1) + s - f[0] * tau
              for f, s in zip(F, S)]
        a0z = float(sum(np.sum(f[0] * z) for f, z in zip(F, Z)))
        F3 = float(b @ x) + a0z + kappa
        mu = (sum(float(np.sum(s * z)) for s, z in zip(S, Z)) + tau * kappa) / (N + 1)

        y, Zh, pres, dres, pobj, dobj, comp = unscaled(x, S, Z, tau)
        history.append({"y": y, "Z": Zh, "primal_obj": pobj, "dual_obj": dobj,
                        "pres": pres, "dres": dres, "tau": tau, "kappa": kappa})
        score = max(pres, dres, abs(pobj - dobj) / (1 + abs(pobj)))
        if best is None or score < best[0]:
            best = (score, it - 1)
        gap_ok = (comp <= tol * (1 + abs(pobj)) and
                  abs(pobj - dobj) <= tol * (1 + abs(pobj)))
        if pres <= tol and dres <= tol and gap_ok:
            status = OPTIMAL
            break
        # infeasibility rays
        if a0z < 0:
            pinf = float(np.linalg.norm(AZ)) / (-a0z) / Anorm
            if pinf <= ray_tol:
                status = PRIMAL_INFEASIBLE
                break
        bx = float(b @ x)
        if bx < 0:
            res = [np.tensordot(x, f[1:], axes=1) - s for f, s in zip(F, S)]
            dinf = math.sqrt(sum(np.sum(r ** 2) for r in res)) / (-bx) / hnorm
            if dinf <= ray_tol:
                status = DUAL_INFEASIBLE
                break

        try:
            scal = [_nt_scaling(s, z) for s, z in zip(S, Z)]
        except np.linalg.LinAlgError:
            note = "scaling breakdown"
            break
        At = []  # scaled data R^{-1} F R^{-T}
        for f, (R, Rinv, lam) in zip(F, scal):
            At.append(np.matmul(np.matmul(Rinv[None], f), Rinv.T[None]))
        M = np.zeros((m, m))
        g = np.zeros(m)
        q0 = 0.0
        for a in At:
            flat = a.reshape(m + 1, -1)
            M += flat[1:] @ flat[1:].T
            g += flat[1:] @ flat[0]
            q0 += float(flat[0] @ flat[0])
        try:
            cho = sla.cho_factor(M + 1e-14 * np.trace(M) / max(m, 1) * np.eye(m))
            solveM = lambda r: sla.cho_solve(cho, r)
        except (np.linalg.LinAlgError, ValueError):
            Mp = np.linalg.pinv(M)
            solveM = lambda r: Mp @ r
        F2t = [Rinv @ r @ Rinv.T for r, (_, Rinv, _) in zip(F2, scal)]

        def direction(D, dk, eta):
            Us = []
            rt = []
            for d, (_, _, lam), f2 in zip(D, scal, F2t):
                U = 2 * d / (lam[:, None] + lam[None, :])
                Us.append(U)
                rt.append(eta * f2 + U)
            rhs1 = -eta * F1
            proj0 = 0.0
            for a, r in zip(At, rt):
                flat = a.reshape(m + 1, -1)
                rhs1 += flat[1:] @ r.ravel()
                proj0 += float(flat[0] @ r.ravel())
            rhs2 = -eta * F3 - proj0 - dk / tau
            Q = q0 + kappa / tau
            u1 = solveM(rhs1)
            u2 = solveM(g + b)
            dtau = (float((b - g) @ u1) - rhs2) / (float((b - g) @ u2) + Q)
            dx = u1 - u2 * dtau
            dZ = []
            dS = []
            for a, r, U in zip(At, rt, Us):
                dz = -np.tensordot(dx, a[1:], axes=1) - dtau * a[0] + r
                dZ.append(dz)
                dS.append(U - dz)
            dkap = (dk - kappa * dtau) / tau
            return dx, dS, dZ, dtau, dkap

        def step_len(dS, dZ, dtau, dkap):
            a = math.inf
            for (_, _, lam), ds, dz in zip(scal, dS, dZ):
                a = min(a, _max_step(lam, ds), _max_step(lam, dz))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkap < 0:
                a = min(a, -kappa / dkap)
            return a

        lam2 = [np.diag(lam ** 2) for (_, _, lam) in scal]
        try:
            with np.errstate(all="ignore"):
                # predictor
                D = [-l2 for l2 in lam2]
                dx, dS, dZ, dtau, dkap = direction(D, -tau * kappa, 1.0)
                a_aff = min(1.0, step_len(dS, dZ, dtau, dkap))
                sigma = min(1.0, max(0.0, (1 - a_aff))) ** 3
                # corrector
                D = [-l2 + sigma * mu * np.eye(len(l2)) - _jordan(ds, dz)
                     for l2, ds, dz in zip(lam2, dS, dZ)]
                dk = -tau * kappa + sigma * mu - dtau * dkap
                dx, dS, dZ, dtau, dkap = direction(D, dk, 1.0 - sigma)
                a = min(1.0, 0.99 * step_len(dS, dZ, dtau, dkap))
        except (np.linalg.LinAlgError, ValueError):
            note = "search direction breakdown"
            break
        if not np.isfinite(a) or a < 1e-10:
            note = "step length collapsed"
            break
        x = x + a * dx
        tau += a * dtau
        kappa += a * dkap
        newS, newZ = [], []
        for (R, Rinv, lam), ds, dz in zip(scal, dS, dZ):
            Ls = np.diag(lam) + a * ds
            Lz = np.diag(lam) + a * dz
            Sn = R @ Ls @ R.T
            Zn = Rinv.T @ Lz @ Rinv
            newS.append((Sn + Sn.T) / 2)
            newZ.append((Zn + Zn.T) / 2)
        S, Z = newS, newZ
        if tau < 1e-300 or not np.isfinite(tau):
            note = "homogenizing variable underflow"
            break
    else:
        note = "iteration limit"
        it = max_iter

    return {"x": x, "S": S, "Z": Z, "tau": tau, "kappa": kappa,
            "status": status, "history": history, "iterations": it,
            "best": best, "note": note}


# ---------------------------------------------------------------------------
# facial reduction by diagonal certificates

def _diag_entries(F):
    rows = []
    for k, f in enumerate(F):
        for r in range(f.shape[1]):
            rows.append((k, r))
    return rows


def _primal_fr(F, b, tol):
    """Diagonal Z >= 0 with <A_i,Z> = 0; returns (kind, support)."""
    m = b.shape[0]
    idx = _diag_entries(F)
    if not idx:
        return None, None
    nd = len(idx)
    A = np.array([[F[k][i, r, r] for (k, r) in idx] for i in range(1, m + 1)])
    c = np.array([F[k][0, r, r] for (k, r) in idx])
    A_eq = np.vstack([A.reshape(m, nd), np.ones((1, nd))])
    b_eq = np.concatenate([np.zeros(m), [1.0]])
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method="highs")
    if res.status != 0:
        return None, None
    scale = max(1.0, float(np.abs(c).max()))
    z = res.x
    if res.fun < -tol * scale:
        return "infeasible", (idx, z)
    if res.fun <= tol * scale:
        supp = [idx[j] for j in np.flatnonzero(z > 1e-9)]
        return "reduce", supp
    return None, None


def _dual_fr(F, b, tol):
    """Direction d with sum d_i A_i diagonal, >= 0, trace 1; min b^T d."""
    m = b.shape[0]
    idx = _diag_entries(F)
    if not idx or m == 0:
        return None, None
    nd = len(idx)
    rows, rhs = [], []
    pos = 0
    for k, f in enumerate(F):
        n = f.shape[1]
        iu, ju = np.triu_indices(n, 1)
        for r, c in zip(iu, ju):
            coef = f[1:, r, c]
            if np.any(coef != 0):
                rows.append(np.concatenate([coef, np.zeros(nd)]))
                rhs.append(0.0)
        for r in range(n):
            row = np.concatenate([f[1:, r, r], np.zeros(nd)])
            row[m + pos + r] = -1.0
            rows.append(row)
            rhs.append(0.0)
        pos += n
    rows.append(np.concatenate([np.zeros(m), np.ones(nd)]))
    rhs.append(1.0)
    c = np.concatenate([b, np.zeros(nd)])
    bounds = [(None, None)] * m + [(0, None)] * nd
    res = linprog(c, A_eq=np.array(rows), b_eq=np.array(rhs), bounds=bounds,
                  method="highs")
    if res.status != 0:
        return None, None
    scale = max(1.0, float(np.abs(b).max()))
    d, v = res.x[:m], res.x[m:]
    if res.fun < -tol * scale:
        return "infeasible", d
    if res.fun <= tol * scale:
        return "reduce", [idx[j] for j in np.flatnonzero(v > 1e-9)]
    return None, None


def _restrict(F, drop):
    """Remove the (block, row) pairs in ``drop`` from every block."""
    out, keeps = [], []
    for k, f in enumerate(F):
        keep = [r for r in range(f.shape[1]) if (k, r) not in drop]
        keeps.append(keep)
        out.append(f[:, keep][:, :, keep])
    return out, keeps


def _drop_zero_rows(F):
    drop = set()
    for k, f in enumerate(F):
        for r in range(f.shape[1]):
            if not np.any(f[:, r, :]):
                drop.add((k, r))
    return drop


class _Reduction:
    """Affine change of variables y = y0 + T w plus index restriction."""

    def __init__(self, F, b):
        self.m0 = b.shape[0]
        self.F = [np.array(f) for f in F]
        self.b = b.copy()
        self.y0 = np.zeros(self.m0)
        self.T = np.eye(self.m0)
        self.keeps = [list(range(f.shape[1])) for f in F]
        self.steps = []

    def restrict(self, drop):
        self.F, keeps = _restrict(self.F, drop)
        self.keeps = [[old[r] for r in kp] for old, kp in zip(self.keeps, keeps)]

    def substitute(self, yp, N):
        # y_cur = yp + N w
        newF = []
        for f in self.F:
            A0 = f[0] + np.tensordot(yp, f[1:], axes=1)
            Ai = np.tensordot(N.T, f[1:], axes=1)
            newF.append(np.concatenate([A0[None], Ai], axis=0))
        self.F = newF
        self.y0 = self.y0 + self.T @ yp
        self.T = self.T @ N
        self.b = N.T @ self.b

    def embed_Z(self, Zr, sizes):
        out = [np.zeros((n, n)) for n in sizes]
        for k, (keep, z) in enumerate(zip(self.keeps, Zr)):
            if keep:
                out[k][np.ix_(keep, keep)] = z
        return out


def _primal_reduce(P, tol):
    red = _Reduction(P.F, P.b)
    for _ in range(sum(P.blocks) + 1):
        if not any(f.shape[1] for f in red.F):
            break
        kind, info = _primal_fr(red.F, red.b, tol)
        if kind == "infeasible":
            idx, z = info
            Zr = [np.zeros((f.shape[1], f.shape[1])) for f in red.F]
            for (k, r), v in zip(idx, z):
                Zr[k][r, r] = v
            return red, ("ray", Zr)
        if kind != "reduce":
            break
        # rows of A(y) indexed by supp vanish identically
        E, e = [], []
        for (k, r) in info:
            f = red.F[k]
            for c in range(f.shape[1]):
                E.append(f[1:, r, c])
                e.append(f[0, r, c])
        E = np.array(E).reshape(len(e), -1)
        e = np.array(e)
        mcur = red.b.shape[0]
        if mcur:
            yp, *_ = np.linalg.lstsq(E, -e, rcond=None)
        else:
            yp = np.zeros(0)
        scale = max(1.0, float(np.abs(np.concatenate([E.ravel(), e])).max()))
        if np.linalg.norm(E @ yp + e) > 1e-9 * scale:
            return red, ("inconsistent", info)
        N = sla.null_space(E) if mcur else np.zeros((0, 0))
        red.substitute(yp, N)
        red.restrict(set(info))
        red.steps.append(("primal", len(info)))
    return red, None


def _dual_reduce(P, tol):
    red = _Reduction(P.F, P.b)
    for _ in range(sum(P.blocks) + 1):
        zero = _drop_zero_rows(red.F)
        if zero:
            red.restrict(zero)
        # dependent A_i: keep a basis of the row space
        m = red.b.shape[0]
        if m:
            Amat = np.concatenate([f[1:].reshape(m, -1) for f in red.F], axis=1) \
                if red.F else np.zeros((m, 0))
            u, sv, vt = np.linalg.svd(Amat, full_matrices=True)
            rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0] if sv.size else 0)))
            if rank < m:
                Null = u[:, rank:]
                if np.linalg.norm(Null.T @ red.b) > 1e-9 * max(1.0, np.linalg.norm(red.b)):
                    d = Null @ (Null.T @ red.b)
                    return red, ("inconsistent", red.T @ (-d / float(red.b @ d)))
                red.substitute(np.zeros(m), u[:, :rank])
                red.steps.append(("dependent", m - rank))
        if not any(f.shape[1] for f in red.F):
            break
        kind, info = _dual_fr(red.F, red.b, tol)
        if kind == "infeasible":
            d = info
            return red, ("ray", red.T @ (d / -float(red.b @ d)))
        if kind != "reduce":
            break
        red.restrict(set(info))
        red.steps.append(("dual", len(info)))
    return red, None


# ---------------------------------------------------------------------------

def _solve_core(F, b, tol, max_iter, ray_tol):
    m = b.shape[0]
    F = [f for f in F if f.shape[1] > 0]
    if not F:
        # no constraints left: bounded only if b = 0
        if np.linalg.norm(b) > tol:
            return {"status": DUAL_INFEASIBLE, "x": -b / float(b @ b), "Z": [],
                    "history": [], "iterations": 0, "note": "no constraints"}
        return {"status": OPTIMAL, "x": np.zeros(m), "Z": [], "history": [],
                "iterations": 0, "note": ""}
    out = _ipm(F, b, tol, max_iter, ray_tol)
    tau = out["tau"]
    if out["status"] == OPTIMAL:
        out["x"] = out["x"] / tau
        out["Z"] = [z / tau for z in out["Z"]]
    elif out["status"] == PRIMAL_INFEASIBLE:
        a0z = float(sum(np.sum(f[0] * z) for f, z in zip(F, out["Z"])))
        out["Z"] = [z / -a0z for z in out["Z"]]
    elif out["status"] == DUAL_INFEASIBLE:
        out["x"] = out["x"] / -float(b @ out["x"])
    else:
        h = out["history"][out["best"][1]] if out["best"] else None
        if h is not None:
            out["x"], out["Z"] = h["y"], h["Z"]
    out["F"] = F
    return out


def _residuals(P, y, Z):
    res = {}
    if y is not None:
        lmi = P.lmi(y)
        res["primal_min_eig"] = min(
            [float(np.linalg.eigvalsh(l)[0]) for l in lmi if l.size] or [math.inf])
    if Z is not None:
        res["dual_eq"] = float(np.max(np.abs(P.constraint_values(Z) - P.b))) \
            if P.m else 0.0
        res["dual_min_eig"] = min(
            [float(np.linalg.eigvalsh(z)[0]) for z in Z if z.size] or [math.inf])
    return res


def sdp_solve(P: SDPProblem, tol: float = 1e-8, max_iter: int = 100,
              ray_tol: float = 1e-7, facial_reduction: bool = True
              ) -> SDPSolution:
    """Solve the primal-dual pair described in the module docstring.

    Parameters
    ----------
    P : SDPProblem
    tol : float
        Relative feasibility and gap tolerance.
    max_iter : int
        Interior point iteration limit (per solve).
    ray_tol : float
        Tolerance on normalized improving rays.
    facial_reduction : bool
        Run the diagonal facial-reduction pre-pass.

    Returns
    -------
    SDPSolution
        ``max_iter`` is also used, with ``diagnostics["reason"]``, when the
        two reduced problems converge to different values (a positive
        duality gap).
    """
    sizes = P.blocks
    diag = {"facial_reduction": []}
    if facial_reduction:
        pred, pinfo = _primal_reduce(P, tol)
        dred, dinfo = _dual_reduce(P, tol)
        diag["facial_reduction"] = [s for s in pred.steps] + [s for s in dred.steps]
    else:
        pred = dred = _Reduction(P.F, P.b)
        pinfo = dinfo = None

    if pinfo is not None:
        kind, data = pinfo
        diag["reason"] = "facial reduction: " + (
            "diagonal improving ray" if kind == "ray"
            else "forced equations are inconsistent")
        Zc = pred.embed_Z(data, sizes) if kind == "ray" else None
        sol = SDPSolution(PRIMAL_INFEASIBLE, None, Zc, math.inf, math.inf,
                          math.nan, {}, diag)
        if Zc is not None:
            sol.residuals = {"ray_eq": float(np.max(np.abs(P.constraint_values(Zc))))
                             if P.m else 0.0, "a0_dot": P.a0_dot(Zc)}
        return sol
    if dinfo is not None:
        kind, d = dinfo
        diag["reason"] = "facial reduction: " + (
            "diagonal improving direction" if kind == "ray"
            else "dependent constraints with inconsistent right-hand side")
        return SDPSolution(DUAL_INFEASIBLE, d, None, -math.inf, -math.inf,
                           math.nan, {"b_dot": float(P.b @ d)}, diag)

    reduced = bool(pred.steps or dred.steps)
    if not reduced:
        out = _solve_core(list(P.F), P.b, tol, max_iter, ray_tol)
        diag.update(iterations=out["iterations"], note=out["note"])
        history = [{"y": h["y"], "Z": h["Z"], "primal_obj": h["primal_obj"],
                    "dual_obj": h["dual_obj"], "pres": h["pres"],
                    "dres": h["dres"]} for h in out["history"]]
        status = out["status"]
        if status == PRIMAL_INFEASIBLE:
            Z = out["Z"]
            sol = SDPSolution(status, None, Z, math.inf, math.inf, math.nan,
                              {}, diag, history)
            sol.residuals = {"ray_eq": float(np.max(np.abs(P.constraint_values(Z))))
                             if P.m else 0.0, "a0_dot": P.a0_dot(Z)}
            return sol
        if status == DUAL_INFEASIBLE:
            d = out["x"]
            return SDPSolution(status, d, None, -math.inf, -math.inf, math.nan,
                               {"b_dot": float(P.b @ d)}, diag, history)
        y, Z = out["x"], out["Z"]
        pobj = float(P.b @ y)
        dobj = -P.a0_dot(Z)
        return SDPSolution(status, y, Z, pobj, dobj, pobj - dobj,
                           _residuals(P, y, Z), diag, history)

    # separate solves on the two reduced problems
    outp = _solve_core(pred.F, pred.b, tol, max_iter, ray_tol)
    outd = _solve_core(dred.F, dred.b, tol, max_iter, ray_tol)
    diag.update(iterations=outp["iterations"] + outd["iterations"],
                note="; ".join(n for n in (outp["note"], outd["note"]) if n))
    history = []
    for h in outp["history"]:
        history.append({"y": pred.y0 + pred.T @ h["y"], "Z": None,
                        "primal_obj": float(P.b @ (pred.y0 + pred.T @ h["y"])),
                        "dual_obj": math.nan, "pres": h["pres"], "dres": h["dres"]})
    for h in outd["history"]:
        Zh = dred.embed_Z(h["Z"], sizes)
        history.append({"y": None, "Z": Zh, "primal_obj": math.nan,
                        "dual_obj": -P.a0_dot(Zh), "pres": h["pres"],
                        "dres": h["dres"]})
    if outp["status"] == PRIMAL_INFEASIBLE:
        Z = pred.embed_Z(outp["Z"], sizes)
        diag["reason"] = "reduced primal problem is infeasible"
        return SDPSolution(PRIMAL_INFEASIBLE, None, None, math.inf, math.inf,
                           math.nan, {}, diag, history)
    if outd["status"] == DUAL_INFEASIBLE:
        d = dred.T @ outd["x"]
        return SDPSolution(DUAL_INFEASIBLE, d, None, -math.inf, -math.inf,
                           math.nan, {"b_dot": float(P.b @ d)}, diag, history)
    y = pred.y0 + pred.T @ outp["x"]
    Z = dred.embed_Z(outd["Z"], sizes)
    pobj = float(P.b @ y)
    dobj = -P.a0_dot(Z)
    gap = pobj - dobj
    status = OPTIMAL
    if outp["status"] != OPTIMAL or outd["status"] != OPTIMAL:
        status = MAX_ITER
        diag["reason"] = "reduced problems did not both converge"
    elif gap > tol * (1 + abs(pobj)) * 10:
        status = MAX_ITER
        diag["reason"] = "positive duality gap"
        diag["duality_gap"] = gap
    return SDPSolution(status, y, Z, pobj, dobj, gap, _residuals(P, y, Z),
                       diag, history)


def weak_duality_check(P: SDPProblem, sol_or_y, Z=None, tol: float = 1e-7):
    """Check ``b^T y + <A_0, Z> >= -tol`` for a feasible pair.

    Accepts either an :class:`SDPSolution` or explicit ``(y, Z)``.

    Raises
    ------
    ValueError
        If ``y`` or ``Z`` is not feasible to ``tol``.
    """
    if isinstance(sol_or_y, SDPSolution):
        y, Z = sol_or_y.y, sol_or_y.Z
    else:
        y = sol_or_y
    if y is None or Z is None:
        raise ValueError("a primal point and a dual matrix are required")
    y = np.asarray(y, dtype=float)
    scale = 1 + max(float(np.abs(f).max()) for f in P.F) if P.F else 1.0
    for l in P.lmi(y):
        if l.size and np.linalg.eigvalsh(l)[0] < -tol * scale:
            raise ValueError("y is not primal feasible")
    for z in Z:
        if z.size and np.linalg.eigvalsh(z)[0] < -tol * scale:
            raise ValueError("Z is not positive semidefinite")
    if P.m and np.max(np.abs(P.constraint_values(Z) - P.b)) > tol * scale:
        raise ValueError("Z violates the dual equality constraints")
    return bool(float(P.b @ y) + P.a0_dot(Z) >= -tol * scale)


def lambda_max_problem(B):
    """``min y  s.t.  y I - B >= 0``; the optimum is ``lambda_max(B)``."""
    B = np.asarray(B, dtype=float)
    n = B.shape[0]
    return SDPProblem([1.0], [np.stack([-B, np.eye(n)])])


def gap_example():
    """``min y1`` over ``[[0,y1,0],[y1,y2,0],[0,0,y1+1]] >= 0``.

    The optimal primal value is 0 while the dual optimum is -1.
    """
    A0 = np.zeros((3, 3))
    A0[2, 2] = 1.0
    A1 = np.zeros((3, 3))
    A1[0, 1] = A1[1, 0] = 1.0
    A1[2, 2] = 1.0
    A2 = np.zeros((3, 3))
    A2[1, 1] = 1.0
    return SDPProblem([1.0, 0.0], [np.stack([A0, A1, A2])])


def write_sdpa(P: SDPProblem) -> str:
    """Sparse text form.

    Layout: ``m``, number of blocks, block sizes, ``b``, then one line
    ``i blk row col value`` per nonzero upper-triangular entry of ``A_i``
    (``i = 0..m``; block, row and column counted from 1).  Entries are the
    ``A_i`` themselves, so the sign differs from SDPA's ``F_0``.
    """
    lines = [str(P.m), str(len(P.F)), " ".join(str(n) for n in P.blocks),
             " ".join(repr(float(v)) for v in P.b) if P.m else ""]
    for k, f in enumerate(P.F):
        n = f.shape[1]
        for i in range(P.m + 1):
            for r in range(n):
                for c in range(r, n):
                    v = f[i, r, c]
                    if v != 0.0:
                        lines.append(f"{i} {k + 1} {r + 1} {c + 1} {float(v)!r}")
    return "\n".join(lines) + "\n"


def read_sdpa(text: str) -> SDPProblem:
    """Inverse of :func:`write_sdpa`."""
    rows = [ln.split("#")[0].strip() for ln in text.splitlines()]
    it = iter(rows)
    try:
        m = int(next(it))
        nb = int(next(it))
        sizes = [int(t) for t in next(it).split()]
        bline = next(it)
        b = [float(t) for t in bline.split()] if m else []
        if len(sizes) != nb or len(b) != m:
            raise ValueError("header does not match block count or m")
        F = [np.zeros((m + 1, n, n)) for n in sizes]
        for ln in it:
            if not ln:
                continue
            i, k, r, c, v = ln.split()
            i, k, r, c = int(i), int(k) - 1, int(r) - 1, int(c) - 1
            F[k][i, r, c] = F[k][i, c, r] = float(v)
    except (StopIteration, ValueError, IndexError) as exc:
        raise ValueError(f"malformed SDP text: {exc}") from exc
    return SDPProblem(b, F)
