import random

import pytest
from gmpy2 import mpq

from crnf.jets import JetPoly, TruncationContext
from crnf.rationals import GR


@pytest.fixture
def ctx16():
    return TruncationContext(n=1, W=6)


def random_coeff(rng, small=False):
    den = rng.choice([1, 2, 3, 4])
    hi = 3 if small else 6
    re = mpq(rng.randint(-hi, hi), den)
    im = mpq(rng.randint(-hi, hi), den)
    return GR(re, im)


def random_jet(ctx, rng, nterms=8, min_weight=0, max_weight=None, real=False):
    """Random sparse jet; if real, it is symmetrized to satisfy conj(f) = f."""
    max_weight = ctx.W if max_weight is None else max_weight
    pool = [
        m
        for m in ctx.monomials_up_to(max_weight)
        if min_weight <= ctx.weight(m) <= max_weight
    ]
    coeffs = {}
    for _ in range(nterms):
        m = rng.choice(pool)
        c = random_coeff(rng)
        coeffs[m] = coeffs.get(m, GR(0)) + c
    f = JetPoly(ctx, coeffs)
    if real:
        f = f + f.conj()
    return f


@pytest.fixture
def rng():
    return random.Random(20240901)
