"""Truncated polynomial algebra over (z^1..z^n, zbar^1..zbar^n, t).

Monomials are graded by parabolic weight: each z or zbar contributes 1,
each power of t contributes 2.  A jet stores exact Gaussian-rational
coefficients for all tracked monomials of weight <= W together with a
certified validity order: the weight up to which the stored coefficients
are guaranteed to agree with the untruncated object.  A valid order of
EXACT means the jet *is* the object (a genuine polynomial, nothing was
dropped).

Every operation is pure; jets are immutable after construction.
"""

from __future__ import annotations

from gmpy2 import mpq

from .rationals import GR, GaussianRational, gr

__all__ = [
    "EXACT",
    "TruncationContext",
    "JetPoly",
    "weight_decompose",
    "series_invert",
]

# Sentinel validity order for jets that are exactly representable.
EXACT = 1 << 30


class ContextMismatch(ValueError):
    pass


class TruncationContext:
    """Dimension n and maximum tracked parabolic weight W."""

    __slots__ = ("n", "W", "nvars", "_weights")

    def __init__(self, n: int, W: int):
        if n < 1 or W < 1:
            raise ValueError("need n >= 1 and W >= 1")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "nvars", 2 * n + 1)
        # parabolic weight of each coordinate direction
        object.__setattr__(self, "_weights", (1,) * (2 * n) + (2,))

    def __setattr__(self, name, value):
        raise AttributeError("TruncationContext is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, TruncationContext)
            and self.n == other.n
            and self.W == other.W
        )

    def __hash__(self):
        return hash((self.n, self.W))

    def __repr__(self):
        return f"TruncationContext(n={self.n}, W={self.W})"

    # -- monomials -------------------------------------------------------

    def weight(self, mono: tuple) -> int:
        n = self.n
        return sum(mono[: 2 * n]) + 2 * mono[2 * n]

    def var_weight(self, j: int) -> int:
        return self._weights[j]

    def zero_mono(self) -> tuple:
        return (0,) * self.nvars

    def conj_mono(self, mono: tuple) -> tuple:
        n = self.n
        return mono[n : 2 * n] + mono[:n] + (mono[2 * n],)

    def mono_key(self, mono: tuple):
        """Canonical order: graded by weight, ties broken lexicographically."""
        return (self.weight(mono), mono)

    def monomials_of_weight(self, w: int) -> list:
        """All monomials of exact parabolic weight w, canonically ordered."""
        n = self.n
        out = []
        for c in range(w // 2 + 1):
            rest = w - 2 * c
            for zdeg in range(rest + 1):
                for a in _compositions(zdeg, n):
                    for b in _compositions(rest - zdeg, n):
                        out.append(a + b + (c,))
        out.sort()
        return out

    def monomials_up_to(self, w: int) -> list:
        out = []
        for k in range(min(w, self.W) + 1):
            out.extend(self.monomials_of_weight(k))
        return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _check_ctx(a: "JetPoly", b: "JetPoly"):
    if a.ctx != b.ctx:
        raise ContextMismatch(f"{a.ctx} vs {b.ctx}")


class JetPoly:
    """Sparse exact jet.  Zero coefficients are never stored."""

    __slots__ = ("ctx", "coeffs", "valid_order")

    def __init__(self, ctx: TruncationContext, coeffs=None, valid_order: int = EXACT):
        object.__setattr__(self, "ctx", ctx)
        clean = {}
        if coeffs:
            W = ctx.W
            for mono, c in coeffs.items():
                c = gr(c)
                if not c:
                    continue
                if ctx.weight(mono) > W:
                    raise ValueError(f"monomial {mono} exceeds truncation weight {W}")
                clean[mono] = c
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(
            self, "valid_order", valid_order if valid_order >= EXACT else min(valid_order, ctx.W)
        )

    def __setattr__(self, name, value):
        raise AttributeError("JetPoly is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(ctx: TruncationContext) -> "JetPoly":
        return JetPoly(ctx, {})

    @staticmethod
    def one(ctx: TruncationContext) -> "JetPoly":
        return JetPoly(ctx, {ctx.zero_mono(): GR(1)})

    @staticmethod
    def const(ctx: TruncationContext, c) -> "JetPoly":
        return JetPoly(ctx, {ctx.zero_mono(): gr(c)})

    @staticmethod
    def variable(ctx: TruncationContext, kind: str, idx: int = 1) -> "JetPoly":
        """kind in {"z", "zbar", "t"}; idx is 1-based for z/zbar."""
        mono = [0] * ctx.nvars
        if kind == "z":
            mono[idx - 1] = 1
        elif kind == "zbar":
            mono[ctx.n + idx - 1] = 1
        elif kind == "t":
            mono[2 * ctx.n] = 1
        else:
            raise ValueError(kind)
        return JetPoly(ctx, {tuple(mono): GR(1)})

    @staticmethod
    def coordinate(ctx: TruncationContext, j: int) -> "JetPoly":
        mono = [0] * ctx.nvars
        mono[j] = 1
        return JetPoly(ctx, {tuple(mono): GR(1)})

    # -- inspection --------------------------------------------------------

    def coeff(self, mono: tuple) -> GaussianRational:
        return self.coeffs.get(tuple(mono), GR(0))

    def constant(self) -> GaussianRational:
        if self.valid_order < 0:
            raise ValueError("constant term is not certified (valid order < 0)")
        return self.coeffs.get(self.ctx.zero_mono(), GR(0))

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_zero_to(self, order: int) -> bool:
        """Exact vanishing of all stored coefficients of weight <= order."""
        if order > self.valid_order:
            raise ValueError(
                f"vanishing to weight {order} is not certified (valid order {self.valid_order_str()})"
            )
        W = self.ctx.weight
        return all(W(m) > order for m in self.coeffs)

    def min_weight(self) -> int:
        """Certified minimum weight: all lower parts are known to vanish."""
        stored = min((self.ctx.weight(m) for m in self.coeffs), default=None)
        if self.valid_order >= EXACT:
            return stored if stored is not None else EXACT
        cap = self.valid_order + 1
        return min(stored, cap) if stored is not None else cap

    def max_weight(self) -> int:
        return max((self.ctx.weight(m) for m in self.coeffs), default=0)

    def valid_order_str(self) -> str:
        return "exact" if self.valid_order >= EXACT else str(self.valid_order)

    def terms(self):
        """Terms in canonical monomial order."""
        key = self.ctx.mono_key
        return [(m, self.coeffs[m]) for m in sorted(self.coeffs, key=key)]

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, mpq, GaussianRational)):
            other = JetPoly.const(self.ctx, other)
        _check_ctx(self, other)
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            s = out.get(m)
            s = c if s is None else s + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        vo = min(self.valid_order, other.valid_order)
        return JetPoly(self.ctx, out, vo)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, mpq, GaussianRational)):
            other = JetPoly.const(self.ctx, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return JetPoly(
            self.ctx, {m: -c for m, c in self.coeffs.items()}, self.valid_order
        )

    def scale(self, c) -> "JetPoly":
        c = gr(c)
        if not c:
            return JetPoly(self.ctx, {}, self.valid_order)
        return JetPoly(
            self.ctx, {m: c * v for m, v in self.coeffs.items()}, self.valid_order
        )

    def __mul__(self, other):
        if isinstance(other, (int, mpq, GaussianRational)):
            return self.scale(other)
        _check_ctx(self, other)
        ctx = self.ctx
        W = ctx.W
        nv = ctx.nvars
        out = {}
        weight = ctx.weight
        truncated = False
        for m1, c1 in self.coeffs.items():
            w1 = weight(m1)
            for m2, c2 in other.coeffs.items():
                if w1 + weight(m2) > W:
                    truncated = True
                    continue
                m = tuple(m1[i] + m2[i] for i in range(nv))
                p = c1 * c2
                s = out.get(m)
                s = p if s is None else s + p
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        if self.valid_order >= EXACT and other.valid_order >= EXACT and not truncated:
            vo = EXACT
        else:
            vo = min(
                W,
                self.valid_order + other.min_weight(),
                other.valid_order + self.min_weight(),
            )
        return JetPoly(ctx, out, vo)

    __rmul__ = __mul__

    def conj(self) -> "JetPoly":
        cm = self.ctx.conj_mono
        return JetPoly(
            self.ctx,
            {cm(m): c.conj() for m, c in self.coeffs.items()},
            self.valid_order,
        )

    def real(self) -> "JetPoly":
        return (self + self.conj()).scale(mpq(1, 2))

    def imag(self) -> "JetPoly":
        return (self - self.conj()).scale(GR(0, mpq(-1, 2)))

    def is_real(self) -> bool:
        return self == self.conj()

    def __eq__(self, other):
        if isinstance(other, (int, mpq, GaussianRational)):
            other = JetPoly.const(self.ctx, other)
        if not isinstance(other, JetPoly):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))))

    def equals_to_order(self, other: "JetPoly", order: int) -> bool:
        d = self - other
        return d.is_zero_to(min(order, d.valid_order))

    # -- calculus ----------------------------------------------------------

    def derive(self, j: int) -> "JetPoly":
        """Formal partial derivative along coordinate j (0-based)."""
        ctx = self.ctx
        out = {}
        for m, c in self.coeffs.items():
            e = m[j]
            if e == 0:
                continue
            mm = m[:j] + (e - 1,) + m[j + 1 :]
            out[mm] = c * e
        vo = self.valid_order
        if vo < EXACT:
            vo -= ctx.var_weight(j)
        return JetPoly(ctx, out, vo)

    def derive_z(self, alpha: int) -> "JetPoly":
        return self.derive(alpha - 1)

    def derive_zbar(self, alpha: int) -> "JetPoly":
        return self.derive(self.ctx.n + alpha - 1)

    def derive_t(self) -> "JetPoly":
        return self.derive(2 * self.ctx.n)

    def weight_part(self, w: int) -> "JetPoly":
        """Homogeneous part of weight w.  Exact whenever w is certified."""
        ctx = self.ctx
        vo = EXACT if w <= self.valid_order else self.valid_order
        part = {m: c for m, c in self.coeffs.items() if ctx.weight(m) == w}
        return JetPoly(ctx, part, vo)

    def truncate(self, order: int) -> "JetPoly":
        """Drop all monomials of weight > order."""
        ctx = self.ctx
        kept = {m: c for m, c in self.coeffs.items() if ctx.weight(m) <= order}
        return JetPoly(ctx, kept, min(self.valid_order, order))

    def with_valid_order(self, vo: int) -> "JetPoly":
        return JetPoly(self.ctx, self.coeffs, vo)

    def inverse(self) -> "JetPoly":
        """Multiplicative inverse of a jet with nonzero constant term."""
        c0 = self.coeffs.get(self.ctx.zero_mono(), GR(0))
        if not c0:
            raise ZeroDivisionError("jet has zero constant term")
        ctx = self.ctx
        g = self.scale(GR(1) / c0) - JetPoly.one(ctx)  # positive min weight
        acc = JetPoly.one(ctx)
        term = JetPoly.one(ctx)
        for _ in range(ctx.W):
            term = (term * g).scale(-1)
            if term.is_zero():
                break
            acc = acc + term
        inv = acc.scale(GR(1) / c0)
        vo = min(self.valid_order, ctx.W)
        return inv.with_valid_order(vo)

    def exp(self) -> "JetPoly":
        """exp(f) for f with zero constant term, truncated exactly."""
        if self.coeffs.get(self.ctx.zero_mono()):
            raise ValueError("exp requires a vanishing constant term")
        ctx = self.ctx
        acc = JetPoly.one(ctx)
        term = JetPoly.one(ctx)
        k = 0
        while True:
            k += 1
            term = term * self
            if term.is_zero() or k > ctx.W:
                break
            acc = acc + term.scale(mpq(1, _factorial(k)))
        vo = min(self.valid_order, ctx.W)
        return acc.with_valid_order(vo)

    def compose(self, subs: list, target_ctx: TruncationContext | None = None) -> "JetPoly":
        """Substitute subs[j] for coordinate j.  Each substitution must have
        positive certified minimum weight."""
        ctx = self.ctx
        tctx = target_ctx or (subs[0].ctx if subs else ctx)
        if len(subs) != ctx.nvars:
            raise ValueError("need one substitution jet per coordinate")
        min_ratio = None
        for j, s in enumerate(subs):
            if s.ctx != tctx:
                raise ContextMismatch("substitution jets must share one context")
            mw = s.min_weight()
            if mw < 1:
                raise ValueError("substitution requires a vanishing constant term")
            r = mpq(min(mw, tctx.W + 1), ctx.var_weight(j))
            min_ratio = r if min_ratio is None else min(min_ratio, r)
        # cache powers of each substitution jet
        pows = []
        for s in subs:
            row = [JetPoly.one(tctx), s]
            pows.append(row)
        out = JetPoly.zero(tctx)
        for m, c in self.coeffs.items():
            term = JetPoly.const(tctx, c)
            for j, e in enumerate(m):
                if e == 0:
                    continue
                row = pows[j]
                while len(row) <= e:
                    row.append(row[-1] * row[1])
                term = term * row[e]
                if term.is_zero():
                    break
            out = out + term
        if self.valid_order >= EXACT:
            cap = EXACT
        else:
            cap = int(min_ratio * self.valid_order) if min_ratio is not None else self.valid_order
        vo = min(out.valid_order, cap, EXACT)
        if vo < EXACT:
            vo = min(vo, tctx.W)
        return out.with_valid_order(vo)

    # -- display -----------------------------------------------------------

    def __repr__(self):
        return f"JetPoly({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        n = self.ctx.n
        for m, c in self.terms():
            names = []
            for a in range(n):
                if m[a]:
                    names.append(f"z{a+1}" + (f"^{m[a]}" if m[a] > 1 else ""))
            for a in range(n):
                if m[n + a]:
                    names.append(f"zb{a+1}" + (f"^{m[n+a]}" if m[n+a] > 1 else ""))
            if m[2 * n]:
                names.append("t" + (f"^{m[2*n]}" if m[2 * n] > 1 else ""))
            body = "*".join(names) if names else "1"
            parts.append(f"({c})*{body}")
        return " + ".join(parts)


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def weight_decompose(f: JetPoly) -> list:
    """[(m, homogeneous part of weight m)] for the nonzero parts, ascending."""
    ctx = f.ctx
    buckets = {}
    for m, c in f.coeffs.items():
        buckets.setdefault(ctx.weight(m), {})[m] = c
    return [
        (w, JetPoly(ctx, coeffs, EXACT if w <= f.valid_order else f.valid_order))
        for w, coeffs in sorted(buckets.items())
    ]


def identity_map(ctx: TruncationContext) -> list:
    return [JetPoly.coordinate(ctx, j) for j in range(ctx.nvars)]


def compose_map(outer: list, inner: list, target_ctx=None) -> list:
    return [f.compose(inner, target_ctx) for f in outer]


def series_invert(components: list) -> list:
    """Invert a (2n+1)-component map whose leading part is the identity.

    Leading part means: the weight-1 part of each z/zbar component is the
    matching coordinate, and the weight-2 part of the t component is t.
    """
    if not components:
        raise ValueError("empty map")
    ctx = components[0].ctx
    if len(components) != ctx.nvars:
        raise ValueError("component count must match the coordinate count")
    ident = identity_map(ctx)
    for j, (f, x) in enumerate(zip(components, ident)):
        lead = f.weight_part(ctx.var_weight(j))
        if lead != x:
            raise ValueError(f"component {j} does not have identity leading part")
    pert = [f - x for f, x in zip(components, ident)]  # higher-weight tails
    phi = list(ident)
    for _ in range(ctx.W + 1):
        corr = [p.compose(phi) for p in pert]
        phi = [x - c for x, c in zip(ident, corr)]
    # verify both round trips
    check1 = compose_map(components, phi)
    check2 = compose_map(phi, components)
    for chk in (check1, check2):
        for g, x in zip(chk, ident):
            d = g - x
            if not d.is_zero_to(min(ctx.W, d.valid_order)):
                raise ArithmeticError("series inversion failed to certify round trip")
    return phi
