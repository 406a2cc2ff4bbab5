"""Assembly of localizing-matrix LMIs shared by the sos and lasserre modules."""
from __future__ import annotations

import math

import numpy as np

from .poly import Polynomial, monomials


def variable_index(dim, maxdeg, skip_zero=False):
    """Graded-lex list of moment variables and the inverse map."""
    alphas = monomials(dim, maxdeg, 1 if skip_zero else 0)
    return alphas, {a: k for k, a in enumerate(alphas)}


def localizing_block(g: Polynomial, basis, index, nvar, fixed=None):
    """Coefficient stack of ``H(g y)`` over ``basis``.

    Returns an array of shape ``(nvar + 1, k, k)``.  Slot ``0`` collects
    constant contributions: moments listed in ``fixed`` (a map
    ``alpha -> value``) are moved there instead of being variables.
    Variable ``alpha`` lives in slot ``index[alpha] + 1``.
    """
    k = len(basis)
    B = np.asarray(basis, dtype=int).reshape(k, -1)
    out = np.zeros((nvar + 1, k, k))
    terms = [(np.asarray(gam, dtype=int), c) for gam, c in g.terms.items()]
    fixed = fixed or {}
    for i in range(k):
        for j in range(i, k):
            base = B[i] + B[j]
            for gam, c in terms:
                a = tuple((base + gam).tolist())
                if a in fixed:
                    out[0, i, j] += c * fixed[a]
                else:
                    out[index[a] + 1, i, j] += c
            if i != j:
                out[:, j, i] = out[:, i, j]
    return out


def block_sizes_ok(multipliers, n):
    """Keep multipliers whose localizing order is nonnegative."""
    out = []
    for g in multipliers:
        nj = (2 * n - int(max(g.degree, 0))) // 2
        if nj >= 0:
            out.append((g, nj))
    return out


def shift_relaxation(p: Polynomial, multipliers, n):
    """Moment side of ``sup {lam : p - lam in sum_e g_e Sigma}`` at degree ``2n``.

    ``y_0 = 1`` is substituted, so the variables are ``y_alpha`` with
    ``0 < |alpha| <= 2n``.  The problem carries ``alphas`` and ``offset``
    (the constant coefficient of ``p``) as attributes.
    """
    from .sdp import SDPProblem

    dim = p.dim
    alphas, index = variable_index(dim, 2 * n, skip_zero=True)
    fixed = {(0,) * dim: 1.0}
    blocks = []
    for g in multipliers:
        nj = n - int(math.ceil(max(g.degree, 0) / 2))
        if nj >= 0:
            blocks.append(localizing_block(g, monomials(dim, nj), index,
                                           len(alphas), fixed))
    b = np.array([p.coeff(a) for a in alphas])
    labels = ["y" + "_".join(map(str, a)) for a in alphas]
    P = SDPProblem(b, blocks, labels)
    P.alphas = alphas
    P.offset = p.coeff((0,) * dim)
    return P
