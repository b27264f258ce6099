"""Pseudo-hermitian structure of the hypersurface 2u + |z|^2 + F(z, zbar, t) = 0.

The ambient surface lives in C^{n+1} with coordinates (z^a, w = u + it);
u is eliminated through the defining equation, so every geometric object
becomes a polynomial jet in the surface coordinates (z, zbar, t).

The flat case F = 0 is the Heisenberg group with contact form
dt - (i/2) zbar dz + (i/2) z dzbar and frame Z_a = d/dz^a + (i/2) zbar^a d/dt.
"""

from __future__ import annotations

import json

from gmpy2 import mpq

from .forms import DifferentialForm, VectorField, one_form
from .jets import EXACT, JetPoly, TruncationContext
from .linalg import jet_matrix_inverse, solve_jet_linear
from .rationals import GR, gr, rational_from_string

__all__ = [
    "SpecValidationError",
    "SurfaceSpec",
    "PHStructure",
    "contact_form_from_rho",
    "build_ph_structure",
    "load_spec",
    "flat_spec",
]


class SpecValidationError(ValueError):
    """Raised when a surface description violates its preconditions."""


class SurfaceSpec:
    """Defining-function data: CR dimension, truncation weight, and F."""

    __slots__ = ("n", "W", "F", "ctx")

    def __init__(self, n: int, W: int, F: JetPoly):
        ctx = TruncationContext(n, W)
        if F.ctx != ctx:
            raise SpecValidationError("F does not match the declared context")
        offending = [m for m in F.coeffs if sum(m) <= 2]
        if offending:
            raise SpecValidationError(
                "F must vanish to classical order 3; offending monomials: "
                + ", ".join(map(str, sorted(offending)))
            )
        if F != F.conj():
            bad = sorted(
                m
                for m in set(F.coeffs) | set(F.conj().coeffs)
                if F.coeff(m) != F.conj().coeff(m)
            )
            raise SpecValidationError(
                "F must be real; offending monomials: " + ", ".join(map(str, bad))
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "ctx", ctx)

    def __setattr__(self, name, value):
        raise AttributeError("SurfaceSpec is immutable")

    def to_json_dict(self) -> dict:
        terms = []
        n = self.n
        for m, c in self.F.terms():
            terms.append(
                {
                    "z": list(m[:n]),
                    "zbar": list(m[n : 2 * n]),
                    "t": m[2 * n],
                    "re": str(c.re),
                    "im": str(c.im),
                }
            )
        return {"n": self.n, "W": self.W, "F": terms}


def flat_spec(n: int, W: int) -> SurfaceSpec:
    return SurfaceSpec(n, W, JetPoly.zero(TruncationContext(n, W)))


def load_spec(path_or_dict) -> SurfaceSpec:
    """Load and validate a surface description from JSON."""
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        with open(path_or_dict) as fh:
            data = json.load(fh)
    try:
        n = int(data["n"])
        W = int(data["W"])
        raw_terms = data.get("F", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecValidationError(f"malformed surface description: {exc}") from exc
    ctx = TruncationContext(n, W)
    coeffs = {}
    for item in raw_terms:
        try:
            z = tuple(int(v) for v in item["z"])
            zb = tuple(int(v) for v in item["zbar"])
            te = int(item["t"])
            c = GR(mpq(str(item["re"])), mpq(str(item.get("im", "0"))))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecValidationError(f"malformed F term {item!r}: {exc}") from exc
        if len(z) != n or len(zb) != n or te < 0 or any(e < 0 for e in z + zb):
            raise SpecValidationError(f"bad exponents in F term {item!r}")
        mono = z + zb + (te,)
        if ctx.weight(mono) > W:
            raise SpecValidationError(
                f"F term {mono} has weight {ctx.weight(mono)} > W = {W}"
            )
        coeffs[mono] = coeffs.get(mono, GR(0)) + c
    return SurfaceSpec(n, W, JetPoly(ctx, coeffs))


class PHStructure:
    """Contact form, CR frame, admissible coframe, Levi form and Reeb field."""

    __slots__ = ("ctx", "n", "theta", "frames", "T", "coframe", "h", "hinv", "commutators")

    def __init__(self, ctx, theta, frames, T, coframe, h, hinv=None, commutators=None):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "n", ctx.n)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "frames", tuple(frames))
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "coframe", tuple(coframe))
        object.__setattr__(self, "h", tuple(tuple(row) for row in h))
        object.__setattr__(
            self, "hinv", tuple(tuple(row) for row in (hinv or _invert_h(h, ctx)))
        )
        object.__setattr__(self, "commutators", commutators)

    def __setattr__(self, name, value):
        raise AttributeError("PHStructure is immutable")

    # frame access by typed index: +a holomorphic, -a antiholomorphic, 0 Reeb
    def field(self, I: int) -> VectorField:
        if I == 0:
            return self.T
        if I > 0:
            return self.frames[I - 1]
        return self.frames[-I - 1].conj()

    def coform(self, I: int) -> DifferentialForm:
        if I == 0:
            return self.theta
        if I > 0:
            return self.coframe[I - 1]
        return self.coframe[-I - 1].conj()

    def h_at_origin_is_identity(self) -> bool:
        n = self.n
        for a in range(n):
            for b in range(n):
                want = GR(1) if a == b else GR(0)
                if self.h[a][b].constant() != want:
                    return False
        return True

    def dtheta(self) -> DifferentialForm:
        return self.theta.d()


def _invert_h(h, ctx):
    return jet_matrix_inverse([list(row) for row in h], ctx)


def contact_form_from_rho(spec: SurfaceSpec) -> DifferentialForm:
    """theta = -(i/2)(d - dbar) rho restricted to the surface chart.

    With u eliminated, the coefficients close up as
      theta = dt + sum_a rho_a (-i/2 + F_t/4) dz^a + conj + (1 + F_t^2/4) dt-part,
    where rho_a = zbar^a + dF/dz^a.
    """
    ctx = spec.ctx
    n = spec.n
    F = spec.F
    Ft = F.derive_t()
    half_i = GR(0, mpq(-1, 2))  # -i/2
    quarter = GR(mpq(1, 4))
    comps = [None] * ctx.nvars
    for a in range(1, n + 1):
        rho_a = JetPoly.variable(ctx, "zbar", a) + F.derive_z(a)
        factor = JetPoly.const(ctx, half_i) + Ft.scale(quarter)
        comps[a - 1] = rho_a * factor
    for a in range(1, n + 1):
        comps[n + a - 1] = comps[a - 1].conj()
    comps[2 * n] = JetPoly.one(ctx) + (Ft * Ft).scale(quarter)
    return one_form(ctx, comps)


def build_ph_structure(spec: SurfaceSpec) -> PHStructure:
    """Assemble the full pseudo-hermitian structure for a surface spec."""
    ctx = spec.ctx
    n = spec.n
    theta = contact_form_from_rho(spec)

    # CR frame: W_a = d/dz^a + a_a d/dt with theta(W_a) = 0.
    ct_inv = theta.comp((2 * n,)).inverse()
    frames = []
    zero = JetPoly.zero(ctx)
    for a in range(n):
        a_a = (theta.comp((a,)) * ct_inv).scale(-1)
        comps = [zero] * ctx.nvars
        comps[a] = JetPoly.one(ctx)
        comps[2 * n] = a_a
        frames.append(VectorField(ctx, comps))

    T = reeb_field(theta)
    coframe = dual_coframe(theta, frames, T)
    h = levi_form(theta, frames)

    for a in range(n):
        for b in range(n):
            want = GR(1) if a == b else GR(0)
            if h[a][b].constant() != want:
                raise SpecValidationError(
                    "Levi form is not the identity at the origin; "
                    "renormalize the weight-2 part of the defining function"
                )

    commutators = frame_commutators(frames)
    return PHStructure(ctx, theta, frames, T, coframe, h, commutators=commutators)


def reeb_field(theta: DifferentialForm) -> VectorField:
    """Unique T with theta(T) = 1 and dtheta(T, .) = 0, solved exactly."""
    ctx = theta.ctx
    nv = ctx.nvars
    dtheta = theta.d()
    rows = [[theta.comp((j,)) for j in range(nv)]]
    rhs = [JetPoly.one(ctx)]
    for k in range(nv):
        row = []
        for j in range(nv):
            if j == k:
                row.append(JetPoly.zero(ctx))
            elif j < k:
                row.append(dtheta.comp((j, k)))
            else:
                row.append(dtheta.comp((k, j)).scale(-1))
        rows.append(row)
        rhs.append(JetPoly.zero(ctx))
    comps = solve_jet_linear(rows, rhs, ctx)
    return VectorField(ctx, comps)


def dual_coframe(theta, frames, T) -> list:
    """Admissible coframe dual to (W_a, conj W_a, T); verifies theta duality."""
    ctx = theta.ctx
    n = ctx.n
    fields = list(frames) + [f.conj() for f in frames] + [T]
    M = [[f.comps[k] for k in range(ctx.nvars)] for f in fields]
    Minv = jet_matrix_inverse(M, ctx)
    cof = []
    for i in range(2 * n + 1):
        cof.append(one_form(ctx, [Minv[k][i] for k in range(ctx.nvars)]))
    # the last dual covector must reproduce theta itself
    residual = cof[2 * n] - theta
    if not residual.is_zero_to(_min_form_order(residual)):
        raise ArithmeticError("dual coframe does not close up on theta")
    return cof[:n]


def _min_form_order(form: DifferentialForm) -> int:
    orders = [min(c.valid_order, form.ctx.W) for c in form.comps.values()]
    return min(orders) if orders else form.ctx.W


def levi_form(theta, frames) -> list:
    ctx = theta.ctx
    n = ctx.n
    dtheta = theta.d()
    mi = GR(0, -1)
    h = []
    for a in range(n):
        row = []
        for b in range(n):
            row.append(dtheta(frames[a], frames[b].conj()).scale(mi))
        h.append(row)
    return h


def frame_commutators(frames) -> dict:
    """phi with [conj W_a, conj W_b] = phi^c conj W_c; the graph frame keeps
    commutators inside the span only when they vanish, so phi is stored and
    the residual is certified zero."""
    ctx = frames[0].ctx
    n = ctx.n
    phi = {}
    for a in range(n):
        for b in range(n):
            if a >= b:
                continue
            comm = frames[a].conj().commutator(frames[b].conj())
            # coefficients on the dzbar directions determine phi
            coeffs = [comm.comps[n + c] for c in range(n)]
            residual = comm
            for c in range(n):
                residual = residual - frames[c].conj().mul_jet(coeffs[c])
            for comp in residual.comps:
                if not comp.is_zero_to(min(comp.valid_order, ctx.W)):
                    raise ArithmeticError(
                        "antiholomorphic frame commutator leaves the span"
                    )
            phi[(a + 1, b + 1)] = coeffs
    return phi
