"""Exact Gaussian-rational arithmetic.

All coefficient values in this package are Gaussian rationals: complex
numbers with arbitrary-precision rational real and imaginary parts.  No
floating point ever enters the core; zero tests are exact.
"""

from __future__ import annotations

import math
import re

from gmpy2 import mpq

__all__ = ["GaussianRational", "GR", "gr", "rational_from_string", "rational_sqrt"]


def _as_mpq(x) -> mpq:
    if isinstance(x, mpq):
        return x
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, str):
        return mpq(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mpq(x.numerator, x.denominator)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class GaussianRational:
    """A complex number re + im*i with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _as_mpq(re))
        object.__setattr__(self, "im", _as_mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    # -- algebra -----------------------------------------------------------

    def __add__(self, other):
        other = gr(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = gr(other)
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return gr(other).__sub__(self)

    def __mul__(self, other):
        other = gr(other)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = gr(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / d,
            (self.im * other.re - self.re * other.im) / d,
        )

    def __rtruediv__(self, other):
        return gr(other).__truediv__(self)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def conj(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> mpq:
        """|q|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # -- predicates --------------------------------------------------------

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __eq__(self, other):
        if isinstance(other, (int, mpq)):
            return self.im == 0 and self.re == other
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def is_real(self) -> bool:
        return self.im == 0

    # -- display -----------------------------------------------------------

    def __repr__(self):
        return f"GR({self})"

    def __str__(self):
        if self.im == 0:
            return _q_str(self.re)
        if self.re == 0:
            return f"{_q_str(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{_q_str(self.re)}{sign}{_q_str(abs(self.im))}i"

    def to_complex(self) -> complex:
        """Float approximation; only for the numeric cross-check path."""
        return complex(float(self.re), float(self.im))


def _q_str(q: mpq) -> str:
    return str(q)


def gr(x) -> GaussianRational:
    """Coerce ints, rationals, strings or pairs to a GaussianRational."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, complex):
        raise TypeError("refusing to coerce a float complex to exact arithmetic")
    if isinstance(x, tuple) and len(x) == 2:
        return GaussianRational(x[0], x[1])
    if isinstance(x, str):
        return rational_from_string(x)
    return GaussianRational(x)


GR = GaussianRational

_GAUSS_RE = re.compile(
    r"^\s*(?P<re>[+-]?\d+(?:/\d+)?)?\s*"
    r"(?:(?P<sign>[+-])?\s*(?P<im>\d+(?:/\d+)?)?\s*(?P<i>[iI]))?\s*$"
)


def rational_from_string(s: str) -> GaussianRational:
    """Parse "p/q", "p/q+r/si", "-i", "3-2i" style exact literals."""
    m = _GAUSS_RE.match(s)
    if not m or (m.group("re") is None and m.group("i") is None):
        raise ValueError(f"cannot parse Gaussian rational {s!r}")
    re_part = mpq(m.group("re")) if m.group("re") is not None else mpq(0)
    if m.group("i") is None:
        return GaussianRational(re_part, 0)
    if m.group("re") is not None and m.group("sign") is None and m.group("im") is None:
        # A bare "3i": the regex put the coefficient in the re slot.
        return GaussianRational(0, re_part)
    im_part = mpq(m.group("im")) if m.group("im") is not None else mpq(1)
    if m.group("sign") == "-":
        im_part = -im_part
    return GaussianRational(re_part if m.group("re") is not None else 0, im_part)


def rational_sqrt(q: mpq):
    """Exact square root of a nonnegative rational, or None if irrational."""
    q = _as_mpq(q)
    if q < 0:
        return None
    num, den = q.numerator, q.denominator
    rn = _isqrt(num)
    rd = _isqrt(den)
    if rn is None or rd is None:
        return None
    return mpq(rn, rd)


def _isqrt(k: int):
    r = math.isqrt(int(k))
    return r if r * r == int(k) else None
