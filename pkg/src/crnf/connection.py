"""Tanaka-Webster connection, torsion, curvature and derived tensors.

The connection is pinned by the two structure equations

    d theta^b = theta^a ^ omega_a^b + A^b_abar theta ^ theta^abar,
    omega_{a bbar} + omega_{bbar a} = d h_{a bbar},

solved constructively: the mixed, Reeb and torsion components are read
off the first equation by evaluating d theta^b on frame pairs, the
holomorphic components come from the metric equation, and both residuals
are then re-expanded and certified to vanish exactly to the validity
order.  Nothing downstream is trusted without that certificate.

Index convention for typed indices: +a is holomorphic (1-based), -a is
antiholomorphic, 0 is the Reeb direction.
"""

from __future__ import annotations

from itertools import permutations, product

from gmpy2 import mpq

from .forms import DifferentialForm, VectorField, one_form
from .jets import EXACT, JetPoly
from .rationals import GR
from .surface import PHStructure

__all__ = [
    "ConnectionData",
    "TensorField",
    "tw_connection",
    "tw_curvature",
    "covariant_derivative",
    "extend_torsion",
    "einstein_tensors",
    "sublaplacian",
    "compute_Q",
    "symmetrized_derivative_at_p",
    "scalar_tensor",
    "torsion_divergence",
    "hinv_entry",
    "StructureEquationError",
]


class StructureEquationError(ArithmeticError):
    pass


class TensorField:
    """Component table over typed index tuples, tied to a base structure."""

    __slots__ = ("ph", "sig", "comps")

    def __init__(self, ph: PHStructure, sig: tuple, comps: dict):
        object.__setattr__(self, "ph", ph)
        object.__setattr__(self, "sig", tuple(sig))
        object.__setattr__(self, "comps", dict(comps))

    def __setattr__(self, name, value):
        raise AttributeError("TensorField is immutable")

    def comp(self, idx) -> JetPoly:
        return self.comps.get(tuple(idx), JetPoly.zero(self.ph.ctx))

    def conj(self) -> "TensorField":
        flip = {"h": "a", "a": "h", "0": "0"}
        sig = tuple(flip[s] for s in self.sig)
        comps = {
            tuple(-i for i in idx): c.conj() for idx, c in self.comps.items()
        }
        return TensorField(self.ph, sig, comps)

    def symmetrize(self) -> "TensorField":
        k = len(self.sig)
        fact = 1
        for i in range(2, k + 1):
            fact *= i
        out = {}
        keys = set()
        for idx in self.comps:
            keys.update(permutations(idx))
        for idx in keys:
            s = JetPoly.zero(self.ph.ctx)
            for p in permutations(idx):
                s = s + self.comp(p)
            out[idx] = s.scale(mpq(1, fact))
        return TensorField(self.ph, self.sig, out)

    def is_zero_to(self, order: int) -> bool:
        return all(
            c.is_zero_to(min(order, c.valid_order)) for c in self.comps.values()
        )


class ConnectionData:
    """Connection one-forms, torsion and (optionally) curvature data."""

    __slots__ = (
        "ph",
        "omega",
        "gamma",
        "A_up",
        "A",
        "R",
        "Ric",
        "Scal",
    )

    def __init__(self, ph, omega, gamma, A_up, A):
        object.__setattr__(self, "ph", ph)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "A_up", A_up)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "R", None)
        object.__setattr__(self, "Ric", None)
        object.__setattr__(self, "Scal", None)

    def __setattr__(self, name, value):
        raise AttributeError("ConnectionData is immutable")

    def _fill_curvature(self, R, Ric, Scal):
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "Ric", Ric)
        object.__setattr__(self, "Scal", Scal)

    # omega_a^b evaluated on the typed frame direction d
    def gamma_at(self, d: int, a: int, b: int) -> JetPoly:
        return self.gamma[d][(a, b)]

    def torsion_tensor(self) -> TensorField:
        n = self.ph.n
        comps = {
            (a, b): self.A[a - 1][b - 1]
            for a in range(1, n + 1)
            for b in range(1, n + 1)
        }
        return TensorField(self.ph, ("h", "h"), comps)

    def ricci_tensor(self) -> TensorField:
        n = self.ph.n
        comps = {
            (a, -b): self.Ric[a - 1][b - 1]
            for a in range(1, n + 1)
            for b in range(1, n + 1)
        }
        return TensorField(self.ph, ("h", "a"), comps)


def _directions(n: int):
    """Typed frame directions in canonical order: 1..n, -1..-n, 0."""
    return list(range(1, n + 1)) + [-a for a in range(1, n + 1)] + [0]


def tw_connection(ph: PHStructure, check: bool = True) -> ConnectionData:
    ctx = ph.ctx
    n = ph.n
    theta = ph.theta
    frames = ph.frames
    T = ph.T
    cof = ph.coframe

    dcof = [cof[b].d() for b in range(n)]

    # first structure equation, read off on frame pairs
    gamma = {d: {} for d in _directions(n)}
    A_up = [[None] * n for _ in range(n)]  # A^b_abar
    for b in range(n):
        for a in range(n):
            for g in range(n):
                gamma[-(g + 1)][(a + 1, b + 1)] = dcof[b](frames[a], frames[g].conj())
            gamma[0][(a + 1, b + 1)] = dcof[b](T, frames[a]).scale(-1)
            A_up[b][a] = dcof[b](T, frames[a].conj())

    # metric equation gives the holomorphic components
    for g in range(n):
        for a in range(n):
            # K_{g a bbar} = W_g h_{a bbar} - conj(Gamma_{gbar b}^m) h_{a mbar}
            K = []
            for bb in range(n):
                s = frames[g](ph.h[a][bb])
                for m in range(n):
                    s = s - gamma[-(g + 1)][(bb + 1, m + 1)].conj() * ph.h[a][m]
                K.append(s)
            for nu in range(n):
                s = JetPoly.zero(ctx)
                for bb in range(n):
                    s = s + K[bb] * hinv_entry(ph, nu + 1, bb + 1)
                gamma[g + 1][(a + 1, nu + 1)] = s

    # assemble the connection one-forms in coordinate components
    omega = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            w = DifferentialForm(ctx, 1, {})
            for g in range(n):
                w = w + cof[g].mul_jet(gamma[g + 1][(a + 1, b + 1)])
                w = w + cof[g].conj().mul_jet(gamma[-(g + 1)][(a + 1, b + 1)])
            w = w + theta.mul_jet(gamma[0][(a + 1, b + 1)])
            omega[a][b] = w

    # lower and conjugate the torsion: A_{ab} = conj(sum_m A^m_abar h_{m bbar})
    A = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            s = JetPoly.zero(ctx)
            for m in range(n):
                s = s + A_up[m][a] * ph.h[m][b]
            A[a][b] = s.conj()

    conn = ConnectionData(ph, omega, gamma, A_up, A)
    if check:
        verify_structure_equations(conn)
    return conn


def hinv_entry(ph: PHStructure, nu: int, b: int) -> JetPoly:
    """h^{nu bbar}: pairs a holomorphic index nu with an antiholomorphic b."""
    return ph.hinv[b - 1][nu - 1]


def verify_structure_equations(conn: ConnectionData):
    """Exact residual check of both structure equations."""
    ph = conn.ph
    ctx = ph.ctx
    n = ph.n
    theta = ph.theta
    cof = ph.coframe
    for b in range(n):
        res = cof[b].d()
        for a in range(n):
            res = res - cof[a].wedge(conn.omega[a][b])
            res = res - theta.wedge(cof[a].conj()).mul_jet(conn.A_up[b][a])
        _certify_form_zero(res, "first structure equation", b + 1)
    for a in range(n):
        for b in range(n):
            lhs = DifferentialForm(ctx, 1, {})
            for m in range(n):
                lhs = lhs + conn.omega[a][m].mul_jet(ph.h[m][b])
                lhs = lhs + conn.omega[b][m].conj().mul_jet(ph.h[a][m])
            res = lhs - _d_scalar(ph.h[a][b])
            _certify_form_zero(res, "metric compatibility", (a + 1, b + 1))


def _d_scalar(f: JetPoly) -> DifferentialForm:
    ctx = f.ctx
    return one_form(ctx, [f.derive(j) for j in range(ctx.nvars)])


def _certify_form_zero(form: DifferentialForm, label, which):
    for idx, c in form.comps.items():
        if not c.is_zero_to(min(c.valid_order, form.ctx.W)):
            raise StructureEquationError(
                f"{label} residual nonzero for {which} at component {idx}"
            )


def tw_curvature(ph: PHStructure, conn: ConnectionData) -> ConnectionData:
    """Fill R, Ric, Scal on the connection (returned for chaining)."""
    ctx = ph.ctx
    n = ph.n
    frames = ph.frames
    R = {}
    for a in range(n):
        for b in range(n):
            Om = conn.omega[a][b].d()
            for g in range(n):
                Om = Om - conn.omega[a][g].wedge(conn.omega[g][b])
            for g in range(n):
                for s in range(n):
                    val = Om(frames[g], frames[s].conj())
                    # lower the upper index with h
                    for bb in range(n):
                        key = (a + 1, -(bb + 1), g + 1, -(s + 1))
                        prev = R.get(key)
                        term = val * ph.h[b][bb]
                        R[key] = term if prev is None else prev + term
    Ric = [[None] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            s = JetPoly.zero(ctx)
            for g in range(n):
                for sg in range(n):
                    s = s + R[(a + 1, -(b + 1), g + 1, -(sg + 1))] * hinv_entry(
                        ph, g + 1, sg + 1
                    )
            Ric[a][b] = s
    Scal = JetPoly.zero(ctx)
    for a in range(n):
        for b in range(n):
            Scal = Scal + Ric[a][b] * hinv_entry(ph, a + 1, b + 1)
    conn._fill_curvature(R, Ric, Scal)
    return conn


def covariant_derivative(T: TensorField, conn: ConnectionData) -> TensorField:
    """Append one covariant-derivative index (all 2n+1 typed directions)."""
    ph = T.ph
    if ph is not conn.ph:
        raise ValueError("tensor and connection live on different structures")
    n = ph.n
    out = {}
    dirs = _directions(n)
    for idx, c in T.comps.items():
        for d in dirs:
            E = ph.field(d)
            val = E(c)
            for pos, i in enumerate(idx):
                if i == 0:
                    continue
                if i > 0:
                    for m in range(1, n + 1):
                        rep = idx[:pos] + (m,) + idx[pos + 1 :]
                        comp = T.comp(rep)
                        g = conn.gamma[d][(i, m)]
                        val = val - g * comp
                else:
                    a = -i
                    for m in range(1, n + 1):
                        rep = idx[:pos] + (-m,) + idx[pos + 1 :]
                        comp = T.comp(rep)
                        g = _gamma_bar(conn, d, a, m)
                        val = val - g * comp
            out[idx + (d,)] = val
    sig = T.sig + ("d",)
    return TensorField(ph, sig, out)


def _gamma_bar(conn: ConnectionData, d: int, a: int, m: int) -> JetPoly:
    """omega_abar^mbar evaluated on typed direction d (conjugate forms)."""
    return conn.gamma[-d if d != 0 else 0][(a, m)].conj()


def scalar_tensor(ph: PHStructure, f: JetPoly) -> TensorField:
    return TensorField(ph, (), {(): f})


def scalar_derivative(ph, conn, f: JetPoly, d: int) -> JetPoly:
    return ph.field(d)(f)


def extend_torsion(ph: PHStructure, conn: ConnectionData) -> TensorField:
    """Symmetric tensor over indices {0..n}: the torsion padded with its
    traced covariant derivatives."""
    ctx = ph.ctx
    n = ph.n
    A2 = conn.torsion_tensor()
    dA = covariant_derivative(A2, conn)
    ddA = covariant_derivative(dA, conn)

    # A_{ab,}{}^b = h^{b sbar} A_{ab, sbar}
    div = [JetPoly.zero(ctx) for _ in range(n)]
    for a in range(1, n + 1):
        s = JetPoly.zero(ctx)
        for b in range(1, n + 1):
            for sb in range(1, n + 1):
                s = s + dA.comp((a, b, -sb)) * hinv_entry(ph, b, sb)
        div[a - 1] = s

    # A_{ab,}{}^{ab} = h^{a gbar} h^{b sbar} A_{ab, gbar sbar}
    ddtrace = JetPoly.zero(ctx)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            for g in range(1, n + 1):
                for sb in range(1, n + 1):
                    ddtrace = ddtrace + ddA.comp((a, b, -g, -sb)) * (
                        hinv_entry(ph, a, g) * hinv_entry(ph, b, sb)
                    )

    ci = GR(0, -1)  # -i
    comps = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            comps[(a, b)] = A2.comp((a, b))
    for a in range(1, n + 1):
        val = div[a - 1].scale(ci).scale(mpq(1, n + 1))
        comps[(a, 0)] = val
        comps[(0, a)] = val
    comps[(0, 0)] = ddtrace.scale(mpq(-1, n * (n + 1)))
    return TensorField(ph, ("I", "I"), comps)


def torsion_divergence(ph, conn) -> list:
    """A_{ab,}{}^b for each a (used by Einstein tensors and Q)."""
    n = ph.n
    A2 = conn.torsion_tensor()
    dA = covariant_derivative(A2, conn)
    out = []
    for a in range(1, n + 1):
        s = JetPoly.zero(ph.ctx)
        for b in range(1, n + 1):
            for sb in range(1, n + 1):
                s = s + dA.comp((a, b, -sb)) * hinv_entry(ph, b, sb)
        out.append(s)
    return out


def einstein_tensors(ph: PHStructure, conn: ConnectionData):
    """(Ein_{a bbar}, Ein_a) as tensor fields; requires curvature."""
    if conn.Scal is None:
        raise ValueError("curvature must be computed first")
    ctx = ph.ctx
    n = ph.n
    e1 = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            e1[(a, -b)] = conn.Ric[a - 1][b - 1] - (
                ph.h[a - 1][b - 1] * conn.Scal
            ).scale(mpq(1, n))
    div = torsion_divergence(ph, conn)
    e2 = {}
    for a in range(1, n + 1):
        scal_a = ph.frames[a - 1](conn.Scal)
        e2[(a,)] = scal_a - div[a - 1].scale(GR(0, n))
    return (
        TensorField(ph, ("h", "a"), e1),
        TensorField(ph, ("h",), e2),
    )


def sublaplacian(ph: PHStructure, conn: ConnectionData, u: JetPoly) -> JetPoly:
    """Delta_b u = u_a{}^a + u^a{}_a (trace of the second derivative)."""
    n = ph.n
    du = covariant_derivative(scalar_tensor(ph, u), conn)
    ddu = covariant_derivative(du, conn)
    out = JetPoly.zero(ph.ctx)
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            out = out + (ddu.comp((a, -b)) + ddu.comp((-b, a))) * hinv_entry(ph, a, b)
    return out


def compute_Q(ph: PHStructure, conn: ConnectionData) -> TensorField:
    """The curvature-normalization tensor over indices {0..n} and conjugates.

    Components: Q_{ab} = (n+2) i A_{ab}; Q_{a bbar} = Ric_{a bbar};
    Q_{0a} = 4 A_{ab,}{}^b + (2i/(n+1)) Scal_a;
    Q_{00} = (16/n) Im A_{ab,}{}^{ab} + (4/(n(n+1))) Delta_b Scal.
    Remaining components follow from symmetry and conjugation.
    """
    if conn.Scal is None:
        raise ValueError("curvature must be computed first")
    ctx = ph.ctx
    n = ph.n
    comps = {}
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            q = conn.A[a - 1][b - 1].scale(GR(0, n + 2))
            comps[(a, b)] = q
            comps[(-a, -b)] = q.conj()
            comps[(a, -b)] = conn.Ric[a - 1][b - 1]
            comps[(-b, a)] = conn.Ric[a - 1][b - 1]
    div = torsion_divergence(ph, conn)
    for a in range(1, n + 1):
        q = div[a - 1].scale(4) + ph.frames[a - 1](conn.Scal).scale(
            GR(0, mpq(2, n + 1))
        )
        comps[(0, a)] = q
        comps[(a, 0)] = q
        comps[(0, -a)] = q.conj()
        comps[(-a, 0)] = q.conj()

    ext = extend_torsion(ph, conn)
    # reuse the traced second derivative through the extension normalization
    ddtrace = ext.comp((0, 0)).scale(-n * (n + 1))
    q00 = ddtrace.imag().scale(mpq(16, n)) + sublaplacian(ph, conn, conn.Scal).scale(
        mpq(4, n * (n + 1))
    )
    comps[(0, 0)] = q00
    return TensorField(ph, ("I", "I"), comps)


def symmetrized_derivative_at_p(
    T: TensorField, conn: ConnectionData, k: int
) -> dict:
    """A_{(I1 I2, I3...Ik)}(0) for every list over {0..n} of length k.

    The tensor must be symmetric with two indices over {0..n}.  Values are
    exact constants; an insufficient validity certificate raises.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    ph = T.ph
    n = ph.n
    cur = T
    for _ in range(k - 2):
        cur = covariant_derivative(cur, conn)
    out = {}
    for lst in product(range(0, n + 1), repeat=k):
        s = GR(0)
        count = 0
        for p in permutations(lst):
            c = cur.comp(p)
            if c.valid_order < 0:
                raise ValueError(
                    f"evaluation at the base point is uncertified for {p}"
                )
            s = s + c.constant()
            count += 1
        out[lst] = s * GR(mpq(1, count))
    return out
