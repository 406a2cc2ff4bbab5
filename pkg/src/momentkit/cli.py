"""
Command-line interface: ``momentkit <command> [options]``.

Every command writes a JSON report (stdout, or ``--out``) and a one-line
summary on stderr.  Exit codes:

====  ==========================================
0     verdict yes / success
1     verdict no / infeasible
2     inconclusive / unknown
3     numeric failure or invalid request
64    malformed JSON input
====  ==========================================

Reports are deterministic: keys are sorted, no timestamps are written and
every random choice flows from ``--seed``.  Each report embeds the tool
version, the tolerances in force and SHA-256 hashes of the parsed inputs.

JSON-valued options accept inline JSON or a path to a file holding it.
Polynomial options also accept the built-in names ``motzkin`` and
``robinson``.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__

EXIT_YES, EXIT_NO, EXIT_UNKNOWN, EXIT_FAIL, EXIT_BADJSON = 0, 1, 2, 3, 64


class BadInput(Exception):
    """Malformed JSON (exit 64)."""


# ---------------------------------------------------------------------------
# input helpers

def _read(arg, what):
    text = arg
    if not arg.lstrip().startswith(("[", "{", '"')) and os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise BadInput(f"{what}: {exc}") from exc


def _canon(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _hash(obj):
    return hashlib.sha256(_canon(obj).encode()).hexdigest()


def _poly(arg, what="--poly"):
    from .poly import Polynomial, motzkin, robinson
    builtins = {"motzkin": motzkin, "robinson": robinson}
    if arg in builtins:
        p = builtins[arg]()
        return p, p.to_json()
    obj = _read(arg, what)
    try:
        return Polynomial.from_json(obj), obj
    except (ValueError, TypeError) as exc:
        raise BadInput(f"{what}: {exc}") from exc


def _constraints(arg, dim=None):
    from .poly import ConstraintSet, Polynomial
    if arg is None:
        if dim is None:
            raise BadInput("--constraints is required")
        return ConstraintSet(dim, ()), {"dim": dim, "polys": []}
    obj = _read(arg, "--constraints")
    try:
        if isinstance(obj, list):
            polys = [Polynomial.from_json(o) for o in obj]
            d = polys[0].dim if polys else dim
            return ConstraintSet(d, tuple(polys)), obj
        return ConstraintSet.from_json(obj), obj
    except (ValueError, TypeError) as exc:
        raise BadInput(f"--constraints: {exc}") from exc


def _sequence(arg, what="--s"):
    from .moments import MomentSequence
    obj = _read(arg, what)
    try:
        if isinstance(obj, list):
            return MomentSequence.univariate([float(v) for v in obj]), obj
        return MomentSequence.from_json(obj), obj
    except (ValueError, TypeError) as exc:
        raise BadInput(f"{what}: {exc}") from exc


def _vector(arg, what):
    obj = _read(arg, what)
    try:
        return np.asarray(obj, dtype=float), obj
    except (ValueError, TypeError) as exc:
        raise BadInput(f"{what}: {exc}") from exc


# ---------------------------------------------------------------------------
# output helpers

def _clean(v):
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, np.ndarray):
        return _clean(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return v


class Report:
    def __init__(self, command, seed):
        self.command = command
        self.seed = seed
        self.inputs = {}
        self.tolerances = {}
        self.result = {}
        self.verdict = None

    def add_input(self, name, obj):
        self.inputs[name] = {"value": obj, "sha256": _hash(obj)}

    def to_json(self, code):
        return _clean({
            "tool": "momentkit",
            "version": __version__,
            "command": self.command,
            "seed": self.seed,
            "inputs": self.inputs,
            "tolerances": self.tolerances,
            "verdict": self.verdict,
            "exit_code": code,
            "result": self.result,
        })


# ---------------------------------------------------------------------------
# commands

def _existence(rep, res, yes=("yes",)):
    rep.result = res.to_json()
    rep.verdict = res.verdict
    return EXIT_YES if res.verdict in yes else EXIT_NO


def cmd_check_hamburger(a, rep):
    from .existence1d import PSD_TOL, hamburger_check
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.tolerances = {"psd": PSD_TOL}
    return _existence(rep, hamburger_check(s, a.N))


def cmd_check_stieltjes(a, rep):
    from .existence1d import PSD_TOL, stieltjes_check
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.tolerances = {"psd": PSD_TOL}
    return _existence(rep, stieltjes_check(s, a.N))


def cmd_check_interval(a, rep):
    from .existence1d import PSD_TOL, interval_truncated_check
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.add_input("interval", [a.a, a.b])
    rep.tolerances = {"psd": PSD_TOL}
    return _existence(rep, interval_truncated_check(s, a.a, a.b))


def cmd_check_hausdorff(a, rep):
    from .existence1d import hausdorff_difference_check
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.tolerances = {"difference": 1e-9}
    return _existence(rep, hausdorff_difference_check(s, a.N))


def cmd_classify_boundary(a, rep):
    from .existence1d import boundary_classify, interval_truncated_check
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.add_input("interval", [a.a, a.b])
    rep.tolerances = {"singular": 1e-9}
    pre = interval_truncated_check(s, a.a, a.b)
    if pre.verdict != "yes":
        rep.result = pre.to_json()
        rep.verdict = "no"
        return EXIT_NO
    return _existence(rep, boundary_classify(s, a.a, a.b), ("boundary", "interior"))


def cmd_principal(a, rep):
    from .existence1d import measure_index, principal_measures
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.add_input("interval", [a.a, a.b])
    lo, up = principal_measures(s, a.a, a.b)
    rep.result = {
        "lower": {"measure": lo.to_json(), "index": measure_index(lo, a.a, a.b)},
        "upper": {"measure": up.to_json(), "index": measure_index(up, a.a, a.b)},
    }
    rep.verdict = "yes"
    return EXIT_YES


def cmd_canonical(a, rep):
    from .existence1d import canonical_measure, measure_index
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.add_input("interval", [a.a, a.b])
    rep.add_input("xi", a.xi)
    mu = canonical_measure(s, a.a, a.b, a.xi)
    rep.result = {"measure": mu.to_json(), "index": measure_index(mu, a.a, a.b)}
    rep.verdict = "yes"
    return EXIT_YES


_DET_EXIT = {"determinate": EXIT_YES, "indeterminate": EXIT_NO,
             "inconclusive": EXIT_UNKNOWN}


def _builtin_sequence(name, alpha, mode):
    from . import determinacy as D
    if name == "lognormal":
        return D.lognormal_moments()
    if name == "gaussian":
        return D.gaussian_moments(1)
    if name == "exp_abs_alpha":
        if alpha is None:
            raise ValueError("--alpha is required for exp_abs_alpha")
        return D.exp_abs_alpha_moments(alpha, mode)
    raise ValueError(f"unknown built-in {name!r}")


def cmd_carleman(a, rep):
    from .determinacy import carleman_report
    if a.s is not None:
        s, obj = _sequence(a.s)
        rep.add_input("s", obj)
    elif a.builtin is not None:
        s = _builtin_sequence(a.builtin, a.alpha, a.mode)
        rep.add_input("builtin", {"name": a.builtin, "alpha": a.alpha})
    else:
        raise ValueError("give --s or --builtin")
    rep.add_input("mode", a.mode)
    rep.tolerances = {"growth_ratio_slack": 1e-9}
    r = carleman_report(s, a.N, a.mode)
    rep.result = r.to_json()
    rep.verdict = r.verdict
    return _DET_EXIT[r.verdict]


def cmd_krein(a, rep):
    from . import determinacy as D
    if a.density == "lognormal":
        f = D.lognormal_density
    elif a.density == "gaussian":
        f = D.gaussian_density
    elif a.density == "exp_abs_alpha":
        if a.alpha is None:
            raise ValueError("--alpha is required for exp_abs_alpha")
        f = D.exp_abs_alpha_density(a.alpha)
    else:
        raise ValueError(f"unknown density {a.density!r}")
    rep.add_input("density", {"name": a.density, "alpha": a.alpha, "mode": a.mode})
    rep.tolerances = {"increment": 1e-8, "R_max": 1e6}
    r = D.krein_report(f, a.mode)
    rep.result = r.to_json()
    rep.verdict = r.verdict
    return _DET_EXIT[r.verdict]


def cmd_carleman_mv(a, rep):
    from .determinacy import multivariate_carleman, product_moments
    if a.s is not None:
        s, obj = _sequence(a.s)
        rep.add_input("s", obj)
    elif a.axes:
        names = [t.strip() for t in a.axes.split(",") if t.strip()]
        seqs = [_builtin_sequence(nm, a.alpha, "hamburger") for nm in names]
        s = product_moments(seqs, "x".join(names))
        rep.add_input("axes", {"names": names, "alpha": a.alpha})
    else:
        raise ValueError("give --s or --axes")
    r = multivariate_carleman(s, a.N)
    rep.result = r.to_json()
    rep.verdict = r.verdict
    return _DET_EXIT.get(r.verdict, EXIT_UNKNOWN)


_SOS_EXIT = {"feasible": EXIT_YES, "infeasible": EXIT_NO, "unknown": EXIT_UNKNOWN}


def _sos_out(rep, r):
    rep.result = r.to_json()
    rep.verdict = r.status
    return _SOS_EXIT.get(r.status, EXIT_FAIL)


def cmd_sos(a, rep):
    from .sos import sos_decompose
    p, obj = _poly(a.poly)
    rep.add_input("poly", obj)
    rep.add_input("level", a.level)
    rep.tolerances = {"sdp": 1e-9, "ambiguous_margin": 1e-6}
    return _sos_out(rep, sos_decompose(p, a.level))


def cmd_qmodule(a, rep):
    from .sos import qmodule_membership
    p, obj = _poly(a.poly)
    f, fobj = _constraints(a.constraints, p.dim)
    rep.add_input("poly", obj)
    rep.add_input("constraints", fobj)
    rep.add_input("level", a.level)
    rep.add_input("preordering", a.preordering)
    rep.tolerances = {"sdp": 1e-9, "ambiguous_margin": 1e-6}
    return _sos_out(rep, qmodule_membership(p, f, a.level, a.preordering))


def cmd_archimedean(a, rep):
    from .sos import archimedean_certificate
    f, fobj = _constraints(a.constraints)
    rep.add_input("constraints", fobj)
    rep.add_input("lambda", a.lam)
    rep.add_input("level", a.level)
    return _sos_out(rep, archimedean_certificate(f, a.lam, a.level, a.preordering))


def _levels(text):
    try:
        lo, _, hi = text.partition(":")
        lo = int(lo)
        hi = int(hi) if hi else lo
    except ValueError:
        raise ValueError(f"--levels expects LO:HI, got {text!r}") from None
    if hi < lo:
        raise ValueError("--levels: HI < LO")
    return lo, hi


def cmd_minimize(a, rep):
    from .lasserre import FLAT_RANK_TOL, solve_hierarchy
    p, obj = _poly(a.poly)
    f, fobj = _constraints(a.constraints, p.dim)
    lo, hi = _levels(a.levels)
    rep.add_input("poly", obj)
    rep.add_input("constraints", fobj)
    rep.add_input("levels", [lo, hi])
    rep.tolerances = {"sdp": 1e-8, "flat_rank": FLAT_RANK_TOL, "atoms_in_K": 1e-6}
    levels = solve_hierarchy(p, f, lo, hi, seed=a.seed, jobs=a.jobs)
    rep.result = {"levels": [lev.to_json() for lev in levels]}
    last = levels[-1]
    if math.isinf(last.p_mom) and last.p_mom > 0:
        rep.verdict = "infeasible"
        return EXIT_NO
    if last.status == "optimal" and math.isfinite(last.p_mom):
        rep.verdict = "certified" if any(lev.certified for lev in levels) else "bounded"
        return EXIT_YES
    rep.verdict = "unbounded" if last.p_mom == -math.inf else "unknown"
    return EXIT_UNKNOWN


def cmd_extract_atoms(a, rep):
    from .atoms import AtomExtractionError, extract_atoms_flat
    s, obj = _sequence(a.s)
    rep.add_input("s", obj)
    rep.add_input("n", a.n)
    rep.tolerances = {"rank": a.rank_tol, "verify": 1e-8, "commutator": 1e-7}
    try:
        mu = extract_atoms_flat(s, a.n, rank_tol=a.rank_tol, seed=a.seed)
    except AtomExtractionError as exc:
        rep.result = {"error": str(exc)}
        rep.verdict = "not flat"
        return EXIT_NO
    rep.result = {"measure": mu.to_json()}
    rep.verdict = "flat"
    return EXIT_YES


def _alphas(arg, dim=None):
    obj = _read(arg, "--basis")
    try:
        return [tuple(int(v) for v in al) for al in obj], obj
    except (TypeError, ValueError) as exc:
        raise BadInput(f"--basis: {exc}") from exc


def cmd_richter_reduce(a, rep):
    from .atoms import richter_reduce
    from .moments import AtomicMeasure
    obj = _read(a.measure, "--measure")
    try:
        mu = AtomicMeasure.from_json(obj)
    except ValueError as exc:
        raise BadInput(f"--measure: {exc}") from exc
    basis, bobj = _alphas(a.basis)
    rep.add_input("measure", obj)
    rep.add_input("basis", bobj)
    rep.tolerances = {"null_vector": 1e-12}
    nu = richter_reduce(mu, basis)
    rep.result = {"measure": nu.to_json(), "atoms_in": len(mu), "atoms_out": len(nu)}
    rep.verdict = "reduced"
    return EXIT_YES


def _ground_set(a, rep):
    from .corevar import FiniteX, Line1D
    if a.exponents is not None:
        ex = _read(a.exponents, "--exponents")
        rep.add_input("exponents", ex)
        try:
            return Line1D([int(e) for e in ex])
        except (TypeError, ValueError) as exc:
            raise BadInput(f"--exponents: {exc}") from exc
    if a.points is None or a.basis is None:
        raise ValueError("give --exponents, or --points with --basis")
    pts = _read(a.points, "--points")
    basis, bobj = _alphas(a.basis)
    rep.add_input("points", pts)
    rep.add_input("basis", bobj)
    try:
        return FiniteX.from_monomials(np.asarray(pts, dtype=float), basis)
    except (TypeError, ValueError) as exc:
        raise BadInput(f"--points: {exc}") from exc


def cmd_core_variety(a, rep):
    from .corevar import core_variety, determinacy_via_core, existence_via_core
    X = _ground_set(a, rep)
    L, obj = _vector(a.L, "--L")
    rep.add_input("L", obj)
    rep.tolerances = {"lp": 1e-9, "root_detect": 1e-3, "root_accept": 1e-10}
    ex = existence_via_core(L, X)
    out = {"existence": ex.to_json()}
    if ex.trace is None and np.any(L):
        out["trace"] = core_variety(L, X).to_json()
    if ex.verdict == "yes":
        det = determinacy_via_core(L, X)
        out["determinacy"] = {k: v for k, v in det.items() if k != "existence"}
    rep.result = out
    rep.verdict = ex.verdict
    return EXIT_YES if ex.verdict == "yes" else EXIT_NO


def cmd_cone_member(a, rep):
    from .corevar import cone_membership
    X = _ground_set(a, rep)
    v, obj = _vector(a.v, "--v")
    rep.add_input("v", obj)
    rep.tolerances = {"lp": 1e-9}
    r = cone_membership(v, X)
    rep.result = r.to_json()
    rep.verdict = "member" if r.member else "separated"
    return EXIT_YES if r.member else EXIT_NO


def cmd_sdp_solve(a, rep):
    from .sdp import DUAL_INFEASIBLE, OPTIMAL, PRIMAL_INFEASIBLE, read_sdpa, sdp_solve
    with open(a.problem, encoding="utf-8") as fh:
        text = fh.read()
    try:
        P = read_sdpa(text)
    except ValueError as exc:
        raise BadInput(f"--problem: {exc}") from exc
    rep.inputs["problem"] = {"sha256": hashlib.sha256(text.encode()).hexdigest()}
    rep.tolerances = {"sdp": a.tol, "ray": 1e-7}
    sol = sdp_solve(P, tol=a.tol, max_iter=a.max_iter)
    rep.result = {
        "status": sol.status,
        "y": sol.y,
        "Z": sol.Z,
        "primal_obj": sol.primal_obj,
        "dual_obj": sol.dual_obj,
        "gap": sol.gap,
        "residuals": sol.residuals,
        "diagnostics": {k: v for k, v in sol.diagnostics.items()
                        if isinstance(v, (str, int, float, list))},
    }
    rep.verdict = sol.status
    if sol.status == OPTIMAL:
        return EXIT_YES
    if sol.status in (PRIMAL_INFEASIBLE, DUAL_INFEASIBLE):
        return EXIT_NO
    return EXIT_UNKNOWN


# ---------------------------------------------------------------------------
# parser

def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")

    ap = argparse.ArgumentParser(prog="momentkit",
                                 description="Moment problem toolkit.")
    ap.add_argument("--version", action="version", version=f"momentkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    def seq_opts(p, interval=False, horizon=False):
        p.add_argument("--s", required=True, help="moments (JSON list or sequence object)")
        if interval:
            p.add_argument("--a", type=float, required=True)
            p.add_argument("--b", type=float, required=True)
        if horizon:
            p.add_argument("--N", type=int, default=None)

    seq_opts(add("check-hamburger", cmd_check_hamburger,
                 "PSD test of all Hankel matrices"), horizon=True)
    seq_opts(add("check-stieltjes", cmd_check_stieltjes,
                 "PSD test of H(s) and H(Es)"), horizon=True)
    seq_opts(add("check-interval", cmd_check_interval,
                 "truncated problem on [a, b]"), interval=True)
    seq_opts(add("check-hausdorff", cmd_check_hausdorff,
                 "difference test on [0, 1]"), horizon=True)
    seq_opts(add("classify-boundary", cmd_classify_boundary,
                 "interior or boundary of the moment cone on [a, b]"), interval=True)
    seq_opts(add("principal", cmd_principal, "lower and upper principal measures"),
             interval=True)
    p = add("canonical", cmd_canonical, "canonical measure with a prescribed atom")
    seq_opts(p, interval=True)
    p.add_argument("--xi", type=float, required=True)

    p = add("carleman", cmd_carleman, "Carleman sums and growth test")
    p.add_argument("--s", default=None)
    p.add_argument("--builtin", choices=["lognormal", "gaussian", "exp_abs_alpha"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--mode", choices=["hamburger", "stieltjes"], default="hamburger")
    p.add_argument("--N", type=int, default=30)

    p = add("krein", cmd_krein, "Krein log-integral test of a built-in density")
    p.add_argument("--density", required=True,
                   choices=["lognormal", "gaussian", "exp_abs_alpha"])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--mode", choices=["hamburger", "stieltjes"], default="hamburger")

    p = add("carleman-mv", cmd_carleman_mv, "Carleman test on every marginal")
    p.add_argument("--s", default=None)
    p.add_argument("--axes", default=None,
                   help="comma-separated built-ins forming a product measure")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--N", type=int, default=30)

    p = add("sos", cmd_sos, "sum-of-squares decomposition")
    p.add_argument("--poly", required=True)
    p.add_argument("--level", type=int, required=True)

    p = add("qmodule", cmd_qmodule, "quadratic module or preordering membership")
    p.add_argument("--poly", required=True)
    p.add_argument("--constraints", required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--preordering", action="store_true")

    p = add("archimedean", cmd_archimedean, "lambda - |x|^2 in the module")
    p.add_argument("--constraints", required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--preordering", action="store_true")

    p = add("minimize", cmd_minimize, "moment-SOS hierarchy")
    p.add_argument("--poly", required=True)
    p.add_argument("--constraints", default=None)
    p.add_argument("--levels", required=True, help="LO:HI")

    p = add("extract-atoms", cmd_extract_atoms, "atoms of a flat moment sequence")
    p.add_argument("--s", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rank-tol", type=float, default=1e-8)

    p = add("richter-reduce", cmd_richter_reduce, "prune a measure to at most dim atoms")
    p.add_argument("--measure", required=True)
    p.add_argument("--basis", required=True, help="JSON list of exponent tuples")

    for name, fn, help_, vec in (
            ("core-variety", cmd_core_variety, "core variety, existence, determinacy", "--L"),
            ("cone-member", cmd_cone_member, "moment cone membership", "--v")):
        p = add(name, fn, help_)
        p.add_argument(vec, required=True)
        p.add_argument("--exponents", default=None, help="Line1D monomial exponents")
        p.add_argument("--points", default=None, help="finite ground set")
        p.add_argument("--basis", default=None, help="monomial exponents on --points")

    p = add("sdp-solve", cmd_sdp_solve, "solve an SDP in sparse text form")
    p.add_argument("--problem", required=True)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=100)
    return ap


def run(argv=None):
    """Execute one command; returns ``(exit code, report dict or None)``."""
    ap = _parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_FAIL if exc.code else EXIT_YES), None
    rep = Report(a.command, a.seed)
    try:
        code = a.func(a, rep)
    except BadInput as exc:
        print(f"momentkit {a.command}: malformed input: {exc}", file=sys.stderr)
        return EXIT_BADJSON, None
    except (ValueError, RuntimeError, np.linalg.LinAlgError, OSError) as exc:
        print(f"momentkit {a.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL, None
    out = rep.to_json(code)
    text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    if a.out:
        with open(a.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"momentkit {a.command}: {rep.verdict} (exit {code})", file=sys.stderr)
    return code, out


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
