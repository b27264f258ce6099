"""Exact linear solving over Gaussian rationals and over jet rings.

Two layers:

* constant layer: dense Gaussian elimination with deterministic pivoting
  (first nonzero entry in canonical column order), used for gauge-fixed
  solves of normalization systems;
* jet layer: Neumann-series solves for systems whose constant part is
  invertible, used for Reeb fields, dual coframes and Levi-form inverses.
"""

from __future__ import annotations

from .jets import EXACT, JetPoly, TruncationContext
from .rationals import GR, GaussianRational, gr

__all__ = [
    "rref",
    "solve_exact",
    "jet_matrix_inverse",
    "solve_jet_linear",
]


def rref(matrix: list) -> tuple:
    """Reduced row echelon form in place semantics (returns new rows).

    Returns (rows, pivot_columns).  Pivots are chosen as the first column
    with a nonzero entry, scanning rows top-down; no magnitude pivoting is
    wanted since arithmetic is exact and determinism matters.
    """
    rows = [[gr(x) for x in r] for r in matrix]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if rows[i][c]:
                pr = i
                break
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = GR(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return rows, pivots


class InconsistentSystem(ArithmeticError):
    pass


def solve_exact(A: list, b: list, free_value=None) -> list:
    """Solve A x = b exactly.

    Underdetermined systems are resolved deterministically: non-pivot
    variables are set to zero (or to the entries of ``free_value``).
    Raises InconsistentSystem when no solution exists.
    """
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    aug = [list(A[i]) + [b[i]] for i in range(nrows)]
    rows, pivots = rref(aug)
    if ncols in pivots:
        raise InconsistentSystem("rhs column became a pivot")
    piv_cols = list(pivots)
    rank = len(piv_cols)
    for i in range(rank, nrows):
        if rows[i][ncols]:
            raise InconsistentSystem("nonzero residual row")
    if free_value is not None:
        x = [gr(v) for v in free_value]
        if len(x) != ncols:
            raise ValueError("free_value length mismatch")
    else:
        x = [GR(0)] * ncols
    for i in range(rank - 1, -1, -1):
        c = piv_cols[i]
        s = rows[i][ncols]
        for j in range(c + 1, ncols):
            if rows[i][j]:
                s = s - rows[i][j] * x[j]
        x[c] = s
    return x


def nullspace(A: list) -> list:
    """Basis of the exact nullspace, deterministic ordering."""
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    rows, pivots = rref([list(r) for r in A])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [GR(0)] * ncols
        v[fc] = GR(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][fc]
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# jet-valued matrices
# ---------------------------------------------------------------------------


def _const_matrix(M: list) -> list:
    return [[e.coeffs.get(e.ctx.zero_mono(), GR(0)) for e in row] for row in M]


def _exact_inverse(C: list) -> list:
    """Inverse of an exact constant square matrix."""
    k = len(C)
    aug = [list(C[i]) + [GR(1) if j == i else GR(0) for j in range(k)] for i in range(k)]
    rows, pivots = rref(aug)
    if pivots[:k] != list(range(k)):
        raise InconsistentSystem("constant part is singular")
    return [r[k:] for r in rows]


def jet_matrix_inverse(M: list, ctx: TruncationContext) -> list:
    """Inverse of a square jet matrix with invertible constant part.

    Computed by a Neumann series around the constant part; exact to the
    common validity order of the entries.
    """
    k = len(M)
    C = _const_matrix(M)
    C_inv = _exact_inverse(C)
    one = JetPoly.one(ctx)
    zero = JetPoly.zero(ctx)
    # N = C^{-1} M - I has positive minimum weight
    N = []
    for i in range(k):
        row = []
        for j in range(k):
            s = zero
            for l in range(k):
                if C_inv[i][l]:
                    s = s + M[l][j].scale(C_inv[i][l])
            if i == j:
                s = s - one
            row.append(s)
        N.append(row)
    # inv = (sum (-N)^p) C^{-1}
    acc = [[one if i == j else zero for j in range(k)] for i in range(k)]
    power = [[one if i == j else zero for j in range(k)] for i in range(k)]
    for _ in range(ctx.W):
        nxt = [[zero for _ in range(k)] for _ in range(k)]
        any_nonzero = False
        for i in range(k):
            for j in range(k):
                s = zero
                for l in range(k):
                    if not power[i][l].is_zero() and not N[l][j].is_zero():
                        s = s + power[i][l] * N[l][j]
                s = s.scale(-1)
                nxt[i][j] = s
                if not s.is_zero():
                    any_nonzero = True
        power = nxt
        if not any_nonzero:
            break
        for i in range(k):
            for j in range(k):
                acc[i][j] = acc[i][j] + power[i][j]
    out = [[zero for _ in range(k)] for _ in range(k)]
    for i in range(k):
        for j in range(k):
            s = zero
            for l in range(k):
                if C_inv[l][j] and not acc[i][l].is_zero():
                    s = s + acc[i][l].scale(C_inv[l][j])
            out[i][j] = s
    return out


def solve_jet_linear(rows: list, rhs: list, ctx: TruncationContext) -> list:
    """Solve a consistent jet-linear system (possibly overdetermined).

    ``rows`` is a list of coefficient-jet lists; the constant part must
    have full column rank.  The solution is refined by fixed-point
    iteration around the constant solve and every residual is verified to
    its certified order before returning.
    """
    nrows = len(rows)
    ncols = len(rows[0])
    C = [[e.coeffs.get(ctx.zero_mono(), GR(0)) for e in row] for row in rows]
    # select ncols independent rows deterministically (top-down greedy)
    sel = []
    picked = []
    for i in range(nrows):
        cand = picked + [C[i]]
        _, piv = rref(cand)
        if len(piv) == len(cand):
            sel.append(i)
            picked = cand
        if len(sel) == ncols:
            break
    if len(sel) < ncols:
        raise InconsistentSystem("constant part does not have full column rank")
    G_inv = _exact_inverse(picked)
    zero = JetPoly.zero(ctx)
    # split selected rows: A = G + N with N of positive minimum weight
    Nsel = [
        [rows[i][j] - JetPoly.const(ctx, C[i][j]) for j in range(ncols)] for i in sel
    ]
    bsel = [rhs[i] for i in sel]
    x = [zero] * ncols
    for _ in range(ctx.W + 2):
        r = []
        for i in range(ncols):
            s = bsel[i]
            for j in range(ncols):
                if not Nsel[i][j].is_zero() and not x[j].is_zero():
                    s = s - Nsel[i][j] * x[j]
            r.append(s)
        x = []
        for i in range(ncols):
            s = zero
            for j in range(ncols):
                if G_inv[i][j]:
                    s = s + r[j].scale(G_inv[i][j])
            x.append(s)
    for i in range(nrows):
        res = JetPoly.zero(ctx)
        for j in range(ncols):
            res = res + rows[i][j] * x[j]
        res = res - rhs[i]
        if not res.is_zero_to(min(ctx.W, res.valid_order)):
            raise InconsistentSystem(f"jet-linear residual nonzero in row {i}")
    return x
