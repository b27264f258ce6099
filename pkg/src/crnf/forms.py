"""Exterior calculus with jet coefficients on a (2n+1)-dimensional chart.

Coordinates are indexed 0..2n: first the z's, then the zbar's, then t.
Forms are stored sparsely on strictly increasing index tuples; the wedge
and evaluation conventions are the usual alternating ones,
(xi ^ eta)(X, Y) = xi(X) eta(Y) - xi(Y) eta(X).
"""

from __future__ import annotations

from itertools import combinations

from .jets import EXACT, JetPoly, TruncationContext
from .rationals import GR

__all__ = ["VectorField", "DifferentialForm", "one_form", "d"]


class VectorField:
    """First-order differential operator with jet coefficients."""

    __slots__ = ("ctx", "comps")

    def __init__(self, ctx: TruncationContext, comps):
        comps = tuple(comps)
        if len(comps) != ctx.nvars:
            raise ValueError("component count mismatch")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "comps", comps)

    def __setattr__(self, name, value):
        raise AttributeError("VectorField is immutable")

    @staticmethod
    def coordinate(ctx: TruncationContext, j: int) -> "VectorField":
        return VectorField(
            ctx,
            [JetPoly.one(ctx) if k == j else JetPoly.zero(ctx) for k in range(ctx.nvars)],
        )

    def __call__(self, f: JetPoly) -> JetPoly:
        out = None
        for j, a in enumerate(self.comps):
            term = a * f.derive(j)
            out = term if out is None else out + term
        return out

    def __add__(self, other):
        return VectorField(self.ctx, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other):
        return VectorField(self.ctx, [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self):
        return VectorField(self.ctx, [-a for a in self.comps])

    def scale(self, c) -> "VectorField":
        return VectorField(self.ctx, [a.scale(c) for a in self.comps])

    def mul_jet(self, f: JetPoly) -> "VectorField":
        return VectorField(self.ctx, [a * f for a in self.comps])

    def conj(self) -> "VectorField":
        """Complex conjugate field: swaps z and zbar component slots."""
        n = self.ctx.n
        c = [a.conj() for a in self.comps]
        return VectorField(self.ctx, c[n : 2 * n] + c[:n] + [c[2 * n]])

    def commutator(self, other: "VectorField") -> "VectorField":
        comps = []
        for j in range(self.ctx.nvars):
            s = JetPoly.zero(self.ctx)
            s = s + self(other.comps[j]) - other(self.comps[j])
            comps.append(s)
        return VectorField(self.ctx, comps)

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.comps == other.comps

    def __repr__(self):
        return f"VectorField({list(map(str, self.comps))})"


class DifferentialForm:
    """Degree-p form; components on strictly increasing coordinate tuples."""

    __slots__ = ("ctx", "degree", "comps")

    def __init__(self, ctx: TruncationContext, degree: int, comps=None):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "degree", degree)
        clean = {}
        if comps:
            for idx, c in comps.items():
                idx = tuple(idx)
                if len(idx) != degree or list(idx) != sorted(set(idx)):
                    raise ValueError(f"bad index tuple {idx} for degree {degree}")
                if not c.is_zero() or c.valid_order < EXACT:
                    clean[idx] = c
        object.__setattr__(self, "comps", clean)

    def __setattr__(self, name, value):
        raise AttributeError("DifferentialForm is immutable")

    def comp(self, idx) -> JetPoly:
        return self.comps.get(tuple(idx), JetPoly.zero(self.ctx))

    def __add__(self, other):
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        out = dict(self.comps)
        for idx, c in other.comps.items():
            out[idx] = out[idx] + c if idx in out else c
        return DifferentialForm(self.ctx, self.degree, out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "DifferentialForm":
        return DifferentialForm(
            self.ctx, self.degree, {i: f.scale(c) for i, f in self.comps.items()}
        )

    def mul_jet(self, g: JetPoly) -> "DifferentialForm":
        return DifferentialForm(
            self.ctx, self.degree, {i: f * g for i, f in self.comps.items()}
        )

    def conj(self) -> "DifferentialForm":
        n = self.ctx.n

        def cidx(j):
            if j < n:
                return j + n
            if j < 2 * n:
                return j - n
            return j

        out = {}
        for idx, c in self.comps.items():
            mapped = sorted(cidx(j) for j in idx)
            # count the permutation sign of the relabeling
            raw = [cidx(j) for j in idx]
            sign = _perm_sign(raw)
            cc = c.conj().scale(sign)
            key = tuple(mapped)
            out[key] = out[key] + cc if key in out else cc
        return DifferentialForm(self.ctx, self.degree, out)

    def wedge(self, other: "DifferentialForm") -> "DifferentialForm":
        out = {}
        ctx = self.ctx
        for i1, c1 in self.comps.items():
            for i2, c2 in other.comps.items():
                if set(i1) & set(i2):
                    continue
                raw = list(i1) + list(i2)
                sign = _perm_sign(raw)
                key = tuple(sorted(raw))
                c = (c1 * c2).scale(sign)
                out[key] = out[key] + c if key in out else c
        return DifferentialForm(ctx, self.degree + other.degree, out)

    def d(self) -> "DifferentialForm":
        ctx = self.ctx
        out = {}
        for idx, c in self.comps.items():
            for j in range(ctx.nvars):
                if j in idx:
                    continue
                dc = c.derive(j)
                if dc.is_zero() and dc.valid_order >= EXACT:
                    continue
                raw = [j] + list(idx)
                sign = _perm_sign(raw)
                key = tuple(sorted(raw))
                term = dc.scale(sign)
                out[key] = out[key] + term if key in out else term
        return DifferentialForm(ctx, self.degree + 1, out)

    def __call__(self, *fields) -> JetPoly:
        if len(fields) != self.degree:
            raise ValueError("wrong number of vector-field arguments")
        ctx = self.ctx
        out = JetPoly.zero(ctx)
        for idx, c in self.comps.items():
            if self.degree == 1:
                contrib = fields[0].comps[idx[0]]
            elif self.degree == 2:
                a, b = idx
                contrib = (
                    fields[0].comps[a] * fields[1].comps[b]
                    - fields[0].comps[b] * fields[1].comps[a]
                )
            else:
                contrib = _det([[f.comps[j] for j in idx] for f in fields], ctx)
            out = out + c * contrib
        return out

    def pullback(self, mapping: list, target_ctx: TruncationContext) -> "DifferentialForm":
        """Pull back through the map whose component jets are ``mapping``.

        ``mapping[j]`` expresses source coordinate j in target coordinates.
        """
        ctx = self.ctx
        if self.degree == 0:
            raise ValueError("pull back scalars with JetPoly.compose")
        dmap = [
            [mapping[i].derive(j) for j in range(target_ctx.nvars)]
            for i in range(ctx.nvars)
        ]
        out = DifferentialForm(target_ctx, self.degree, {})
        for idx, c in self.comps.items():
            cc = c.compose(mapping, target_ctx)
            pieces = []
            for i in idx:
                pieces.append(
                    DifferentialForm(
                        target_ctx,
                        1,
                        {(j,): dmap[i][j] for j in range(target_ctx.nvars)},
                    )
                )
            w = pieces[0]
            for p in pieces[1:]:
                w = w.wedge(p)
            out = out + w.mul_jet(cc)
        return out

    def is_zero_to(self, order: int) -> bool:
        return all(
            c.is_zero_to(min(order, c.valid_order)) for c in self.comps.values()
        )

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm) or self.degree != other.degree:
            return NotImplemented
        keys = set(self.comps) | set(other.comps)
        return all(self.comp(k) == other.comp(k) for k in keys)

    def __repr__(self):
        body = ", ".join(f"{idx}: {c}" for idx, c in sorted(self.comps.items()))
        return f"Form{self.degree}({body})"


def one_form(ctx: TruncationContext, comps: list) -> DifferentialForm:
    return DifferentialForm(ctx, 1, {(j,): c for j, c in enumerate(comps)})


def d(form: DifferentialForm) -> DifferentialForm:
    return form.d()


def _perm_sign(seq: list) -> int:
    sign = 1
    arr = list(seq)
    for i in range(len(arr)):
        for j in range(i + 1, len(arr)):
            if arr[i] > arr[j]:
                sign = -sign
    return sign


def _det(rows: list, ctx: TruncationContext) -> JetPoly:
    k = len(rows)
    if k == 1:
        return rows[0][0]
    out = JetPoly.zero(ctx)
    for j in range(k):
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _det(minor, ctx)
        out = out + (term if j % 2 == 0 else term.scale(-1))
    return out
