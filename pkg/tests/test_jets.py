"""Jet algebra: arithmetic against brute-force oracles, calculus, inversion."""

import random

import pytest
from gmpy2 import mpq

from crnf.jets import (
    EXACT,
    JetPoly,
    TruncationContext,
    identity_map,
    series_invert,
    weight_decompose,
)
from crnf.rationals import GR, rational_from_string

from conftest import random_jet


def brute_force_product(ctx, f, g):
    """Coefficient-wise convolution computed by a naive double loop."""
    table = {}
    for m1, c1 in f.coeffs.items():
        for m2, c2 in g.coeffs.items():
            m = tuple(a + b for a, b in zip(m1, m2))
            if ctx.weight(m) > ctx.W:
                continue
            table[m] = table.get(m, GR(0)) + c1 * c2
    return {m: c for m, c in table.items() if c}


class TestRationals:
    def test_field_ops(self):
        a = GR(mpq(1, 2), mpq(-1, 3))
        b = GR(2, 5)
        assert (a * b) / b == a
        assert a + (-a) == 0
        assert a.conj().conj() == a
        assert (a * a.conj()).im == 0

    def test_parse_roundtrip(self):
        for s in ["3/4", "-2", "1/2+1/3i", "-1/2-2i", "i", "-i", "5i"]:
            v = rational_from_string(s)
            assert rational_from_string(str(v)) == v


class TestArithmetic:
    def test_monomial_product(self, ctx16):
        z = JetPoly.variable(ctx16, "z", 1)
        zb = JetPoly.variable(ctx16, "zbar", 1)
        p = z * zb
        assert p.coeff((1, 1, 0)) == 1
        assert len(p.coeffs) == 1
        assert ctx16.weight((1, 1, 0)) == 2

    def test_additive_inverse(self, ctx16, rng):
        for _ in range(5):
            f = random_jet(ctx16, rng)
            assert (f + (-f)).is_zero()

    def test_mul_against_convolution_oracle(self, ctx16, rng):
        for _ in range(10):
            f = random_jet(ctx16, rng, nterms=8)
            g = random_jet(ctx16, rng, nterms=8)
            assert (f * g).coeffs == brute_force_product(ctx16, f, g)

    def test_mul_associative_commutative(self, rng):
        for n in (1, 2):
            ctx = TruncationContext(n, 5)
            for _ in range(4):
                f = random_jet(ctx, rng, nterms=5)
                g = random_jet(ctx, rng, nterms=5)
                h = random_jet(ctx, rng, nterms=5)
                assert f * g == g * f
                assert (f * g) * h == f * (g * h)

    def test_conj_is_ring_hom(self, ctx16, rng):
        for _ in range(5):
            f = random_jet(ctx16, rng)
            g = random_jet(ctx16, rng)
            assert (f * g).conj() == f.conj() * g.conj()
            assert f.conj().conj() == f
            assert f.derive_z(1).conj() == f.conj().derive_zbar(1)

    def test_context_mismatch_rejected(self, ctx16):
        other = TruncationContext(1, 5)
        with pytest.raises(Exception):
            JetPoly.one(ctx16) * JetPoly.one(other)


class TestCalculus:
    def test_t_derivative(self, ctx16):
        t = JetPoly.variable(ctx16, "t")
        assert (t * t).derive_t() == t.scale(2)

    def test_z_derivative(self, ctx16):
        z = JetPoly.variable(ctx16, "z", 1)
        cube = z * z * z
        assert cube.derive_z(1) == (z * z).scale(3)

    def test_zbar_kills_holomorphic(self, ctx16, rng):
        pool = [m for m in ctx16.monomials_up_to(6) if m[1] == 0]
        f = JetPoly(ctx16, {m: GR(1, 1) for m in pool[:7]})
        assert f.derive_zbar(1).is_zero()

    def test_weight_decompose(self, ctx16, rng):
        z = JetPoly.variable(ctx16, "z", 1)
        t = JetPoly.variable(ctx16, "t")
        parts = weight_decompose(z + t)
        assert [(w, str(p)) for w, p in parts] == [(1, "(1)*z1"), (2, "(1)*t")]
        zb = JetPoly.variable(ctx16, "zbar", 1)
        parts = weight_decompose(z * zb * t)
        assert len(parts) == 1 and parts[0][0] == 4
        assert weight_decompose(JetPoly.zero(ctx16)) == []

    def test_weight_decompose_euler_identity(self, ctx16, rng):
        # L_X f_(m) = m f_(m) for the dilation generator X
        f = random_jet(ctx16, rng, nterms=10)
        z = 0
        for w, part in weight_decompose(f):
            euler = (
                JetPoly.variable(ctx16, "z", 1) * part.derive_z(1)
                + JetPoly.variable(ctx16, "zbar", 1) * part.derive_zbar(1)
                + JetPoly.variable(ctx16, "t").scale(2) * part.derive_t()
            )
            assert euler == part.scale(w)
        assert sum((p for _, p in weight_decompose(f)), JetPoly.zero(ctx16)) == f


class TestComposeExpInvert:
    def test_identity_substitution(self, ctx16, rng):
        f = random_jet(ctx16, rng)
        assert f.compose(identity_map(ctx16)) == f

    def test_simple_substitution(self, ctx16):
        z = JetPoly.variable(ctx16, "z", 1)
        t = JetPoly.variable(ctx16, "t")
        zb = JetPoly.variable(ctx16, "zbar", 1)
        subs = [z + t, zb, t]
        assert z.compose(subs) == z + t

    def test_compose_against_sympy(self, ctx16, rng):
        sympy = pytest.importorskip("sympy")
        zs, zbs, ts = sympy.symbols("z zb t")
        for _ in range(3):
            f = random_jet(ctx16, rng, nterms=5)
            inner = [
                random_jet(ctx16, rng, nterms=3, min_weight=1),
                random_jet(ctx16, rng, nterms=3, min_weight=1),
                random_jet(ctx16, rng, nterms=3, min_weight=2),
            ]
            got = f.compose(inner)

            def to_sympy(j):
                expr = sympy.Integer(0)
                for (a, b, c), v in j.coeffs.items():
                    coeff = sympy.Rational(str(v.re)) + sympy.I * sympy.Rational(
                        str(v.im)
                    )
                    expr += coeff * zs**a * zbs**b * ts**c
                return sympy.expand(expr)

            composed = to_sympy(f).subs(
                [(zs, to_sympy(inner[0])), (zbs, to_sympy(inner[1])), (ts, to_sympy(inner[2]))],
                simultaneous=True,
            )
            composed = sympy.expand(composed)
            poly = sympy.Poly(composed, zs, zbs, ts)
            expected = {}
            for (a, b, c), coeff in poly.terms():
                if a + b + 2 * c > ctx16.W:
                    continue
                coeff = sympy.expand(coeff)
                re, im = coeff.as_real_imag()
                expected[(a, b, c)] = GR(
                    mpq(sympy.Rational(re).p, sympy.Rational(re).q),
                    mpq(sympy.Rational(im).p, sympy.Rational(im).q),
                )
            expected = {m: c for m, c in expected.items() if c}
            assert got.coeffs == expected

    def test_compose_rejects_constant_term(self, ctx16):
        z = JetPoly.variable(ctx16, "z", 1)
        bad = [z + 1, z.conj(), JetPoly.variable(ctx16, "t")]
        with pytest.raises(ValueError):
            z.compose(bad)

    def test_exp_basics(self, ctx16):
        ctx3 = TruncationContext(1, 3)
        assert JetPoly.zero(ctx3).exp() == JetPoly.one(ctx3)
        z = JetPoly.variable(ctx3, "z", 1)
        e = z.exp()
        assert e.coeff((0, 0, 0)) == 1
        assert e.coeff((1, 0, 0)) == 1
        assert e.coeff((2, 0, 0)) == GR(mpq(1, 2))
        assert e.coeff((3, 0, 0)) == GR(mpq(1, 6))

    def test_exp_inverse_and_homomorphism(self, ctx16, rng):
        for _ in range(4):
            f = random_jet(ctx16, rng, nterms=5, min_weight=1)
            g = random_jet(ctx16, rng, nterms=5, min_weight=1)
            assert f.exp() * (-f).exp() == JetPoly.one(ctx16)
            assert (f + g).exp() == f.exp() * g.exp()

    def test_exp_rejects_constant(self, ctx16):
        with pytest.raises(ValueError):
            (JetPoly.one(ctx16)).exp()

    def test_invert_identity(self, ctx16):
        ident = identity_map(ctx16)
        assert series_invert(ident) == ident

    def test_invert_quadratic(self):
        ctx = TruncationContext(1, 4)
        z = JetPoly.variable(ctx, "z", 1)
        zb = JetPoly.variable(ctx, "zbar", 1)
        t = JetPoly.variable(ctx, "t")
        m = [z + z * z, zb + zb * zb, t]
        phi = series_invert(m)
        # inverse branch starts z - z^2 + 2 z^3 - ...
        assert phi[0].coeff((1, 0, 0)) == 1
        assert phi[0].coeff((2, 0, 0)) == -1
        assert phi[0].coeff((3, 0, 0)) == 2
        # verify by composing to full truncation weight
        for comp, var in zip(
            [f.compose(phi) for f in m], identity_map(ctx)
        ):
            assert comp == var

    def test_invert_involutive(self, ctx16, rng):
        z = JetPoly.variable(ctx16, "z", 1)
        zb = z.conj()
        t = JetPoly.variable(ctx16, "t")
        pert = random_jet(ctx16, rng, nterms=3, min_weight=2, max_weight=4)
        tpert = random_jet(ctx16, rng, nterms=2, min_weight=3, max_weight=5, real=True)
        m = [z + pert, zb + pert.conj(), t + tpert]
        phi = series_invert(m)
        again = series_invert(phi)
        for a, b in zip(again, m):
            assert a == b

    def test_invert_rejects_bad_leading_part(self, ctx16):
        z = JetPoly.variable(ctx16, "z", 1)
        zb = z.conj()
        t = JetPoly.variable(ctx16, "t")
        with pytest.raises(ValueError):
            series_invert([z.scale(2), zb, t])


class TestValidityOrder:
    def test_derivative_costs_weight(self, ctx16):
        f = random_jet(ctx16, random.Random(7), nterms=6).with_valid_order(6)
        assert f.derive_z(1).valid_order == 5
        assert f.derive_t().valid_order == 4

    def test_exact_polynomials_stay_exact_under_derivative(self, ctx16):
        f = JetPoly.variable(ctx16, "z", 1) * JetPoly.variable(ctx16, "t")
        assert f.valid_order >= EXACT
        assert f.derive_t().valid_order >= EXACT

    def test_mul_uses_min_weight_shift(self, ctx16):
        f = random_jet(ctx16, random.Random(3), nterms=4).with_valid_order(4)
        z = JetPoly.variable(ctx16, "z", 1)
        g = (z * z) * f  # multiplying by weight-2 jet shifts the certificate
        assert g.valid_order == min(ctx16.W, 4 + 2)

    def test_uncertified_constant_rejected(self, ctx16):
        f = JetPoly.one(ctx16).with_valid_order(-1)
        with pytest.raises(ValueError):
            f.constant()
