"""Exact Laurent-polynomial arithmetic over the rationals.

Coefficients stay as ``int``/``fractions.Fraction`` end to end, so identities
such as Bezout cofactor relations hold exactly instead of up to rounding.
Conversion to floating point happens only at unit-circle evaluation.
Complex (float) coefficients are accepted for evaluation-oriented uses such
as polyphase matrices, but the Euclidean routines require exact input.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Number

import numpy as np

__all__ = [
    "LaurentPoly",
    "DiscreteBSpline",
    "CoprimalityError",
    "SymmetryError",
    "PositivityReport",
    "bspline",
    "polyphase_sample",
    "bezout",
    "eval_torus",
    "positivity_certificate",
]


class CoprimalityError(ValueError):
    """Bezout cofactors were requested for a non-coprime pair."""

    def __init__(self, message, common_factor=None):
        super().__init__(message)
        self.common_factor = common_factor


class SymmetryError(ValueError):
    """The operation needs a Hermitian-symmetric polynomial."""


def _conj(c):
    return c.conjugate() if isinstance(c, complex) else c


def _is_exact(c):
    return isinstance(c, (int, Fraction)) and not isinstance(c, bool)


def _to_complex(c):
    if isinstance(c, complex):
        return c
    return complex(float(c))


class LaurentPoly:
    """Finite sum of ``c_k z^k`` over a window of integer exponents.

    The stored window is normalized: leading and trailing coefficients are
    nonzero, and the zero polynomial is ``coeffs == ()`` with ``min_deg == 0``.
    """

    __slots__ = ("min_deg", "coeffs")

    def __init__(self, min_deg=0, coeffs=()):
        coeffs = list(coeffs)
        lo = 0
        while lo < len(coeffs) and coeffs[lo] == 0:
            lo += 1
        hi = len(coeffs)
        while hi > lo and coeffs[hi - 1] == 0:
            hi -= 1
        if lo == hi:
            self.min_deg = 0
            self.coeffs = ()
        else:
            self.min_deg = int(min_deg) + lo
            self.coeffs = tuple(coeffs[lo:hi])

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls(0, (1,))

    @classmethod
    def constant(cls, c):
        return cls(0, (c,))

    @classmethod
    def monomial(cls, k, c=1):
        return cls(k, (c,))

    @classmethod
    def from_terms(cls, terms):
        """Build from a ``{exponent: coefficient}`` mapping."""
        nonzero = {int(k): c for k, c in terms.items() if c != 0}
        if not nonzero:
            return cls()
        lo, hi = min(nonzero), max(nonzero)
        coeffs = [nonzero.get(k, 0) for k in range(lo, hi + 1)]
        return cls(lo, coeffs)

    # -- basic structure ---------------------------------------------------

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def max_deg(self):
        return self.min_deg + len(self.coeffs) - 1

    @property
    def is_monomial(self):
        return len(self.coeffs) == 1

    def coeff(self, k):
        i = k - self.min_deg
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0

    def exponents(self):
        return range(self.min_deg, self.min_deg + len(self.coeffs))

    def shifted(self, k):
        """Multiply by the unit ``z^k``."""
        if self.is_zero:
            return LaurentPoly()
        return LaurentPoly(self.min_deg + k, self.coeffs)

    def conj_reciprocal(self):
        """Return ``sum conj(c_k) z^{-k}``."""
        if self.is_zero:
            return LaurentPoly()
        rev = tuple(_conj(c) for c in reversed(self.coeffs))
        return LaurentPoly(-self.max_deg, rev)

    def has_exact_coeffs(self):
        return all(_is_exact(c) for c in self.coeffs)

    # -- arithmetic --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.min_deg == other.min_deg and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.min_deg, self.coeffs))

    def __neg__(self):
        return LaurentPoly(self.min_deg, tuple(-c for c in self.coeffs))

    def __add__(self, other):
        if isinstance(other, Number):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        lo = min(self.min_deg, other.min_deg)
        hi = max(self.max_deg, other.max_deg)
        coeffs = [0] * (hi - lo + 1)
        for k in self.exponents():
            coeffs[k - lo] += self.coeff(k)
        for k in other.exponents():
            coeffs[k - lo] += other.coeff(k)
        return LaurentPoly(lo, coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Number):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            if other == 0:
                return LaurentPoly()
            return LaurentPoly(self.min_deg, tuple(c * other for c in self.coeffs))
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        if self.is_zero or other.is_zero:
            return LaurentPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, ci in enumerate(self.coeffs):
            if ci == 0:
                continue
            for j, cj in enumerate(other.coeffs):
                out[i + j] += ci * cj
        return LaurentPoly(self.min_deg + other.min_deg, out)

    __rmul__ = __mul__

    # -- evaluation and printing -------------------------------------------

    def eval(self, z):
        """Evaluate at ``z`` (scalar or ndarray) by Horner on the window."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + _to_complex(c)
        acc = acc * z**self.min_deg
        if acc.ndim == 0:
            return complex(acc)
        return acc

    @staticmethod
    def _fmt_coeff(c):
        if isinstance(c, Fraction):
            return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        return str(c)

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for k in self.exponents():
            c = self.coeff(k)
            if c == 0:
                continue
            if isinstance(c, complex):
                sign, mag = "+", str(c)
            else:
                sign = "-" if c < 0 else "+"
                mag = self._fmt_coeff(abs(c))
            if k == 0:
                term = mag
            else:
                zpow = "z" if k == 1 else f"z^{k}"
                term = zpow if mag == "1" else f"{mag}*{zpow}"
            parts.append((sign, term))
        first_sign, first_term = parts[0]
        text = ("-" if first_sign == "-" else "") + first_term
        for sign, term in parts[1:]:
            text += f" {sign} {term}"
        return text

    def __repr__(self):
        return f"LaurentPoly({self.min_deg}, {self.coeffs!r})"


# -- dense polynomial helpers on ascending Fraction lists -------------------


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_add(a, b):
    out = [Fraction(0)] * max(len(a), len(b))
    for i, v in enumerate(a):
        out[i] += v
    for i, v in enumerate(b):
        out[i] += v
    return _trim(out)


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return _trim(out)


def _poly_divmod(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = [Fraction(v) for v in a]
    quo = [Fraction(0)] * max(0, len(rem) - len(b) + 1)
    while len(rem) >= len(b):
        if rem[-1] == 0:
            rem.pop()
            continue
        k = len(rem) - len(b)
        c = rem[-1] / b[-1]
        quo[k] = c
        for i, bi in enumerate(b):
            rem[k + i] -= c * bi
        rem.pop()
    return _trim(quo), _trim(rem)


def _poly_gcdext(a, b):
    """Extended Euclid on ascending coefficient lists: g = u*a + v*b."""
    r0, r1 = [Fraction(v) for v in a], [Fraction(v) for v in b]
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, rem = _poly_divmod(r0, r1)
        r0, r1 = r1, rem
        s0, s1 = s1, _poly_add(s0, [-c for c in _poly_mul(q, s1)])
        t0, t1 = t1, _poly_add(t0, [-c for c in _poly_mul(q, t1)])
    return r0, s0, t0


def _unit_inverse(p):
    # inverse of a Laurent unit c*z^k
    c = p.coeffs[0]
    inv = Fraction(1, c) if _is_exact(c) else 1 / c
    return LaurentPoly.monomial(-p.min_deg, inv)


def bezout(g1, g2):
    """Return ``(h1, h2)`` with ``g1*h1 + g2*h2 == 1`` as an exact identity.

    Runs extended Euclid on the ordinary polynomials obtained by factoring
    out each argument's ``z^{min_deg}`` unit, then shift-corrects.  The pair
    is degree-minimal (``h`` reduced modulo the opposite factor), which fixes
    the representative deterministically.  Inputs must have exact ``int`` or
    ``Fraction`` coefficients.

    Raises ``CoprimalityError`` when the pair shares a nonconstant factor,
    reporting the factor found by the remainder chain.
    """
    for g in (g1, g2):
        if not isinstance(g, LaurentPoly):
            raise TypeError("bezout expects LaurentPoly arguments")
        if not g.has_exact_coeffs():
            raise TypeError("bezout needs exact rational coefficients")
    if g1.is_zero and g2.is_zero:
        raise CoprimalityError("both polynomials are zero")
    if g1.is_monomial:
        return _unit_inverse(g1), LaurentPoly.zero()
    if g2.is_monomial:
        return LaurentPoly.zero(), _unit_inverse(g2)
    if g1.is_zero or g2.is_zero:
        raise CoprimalityError(
            "one polynomial is zero and the other is not a unit",
            common_factor=g2 if g1.is_zero else g1,
        )

    p1 = [Fraction(c) for c in g1.coeffs]
    p2 = [Fraction(c) for c in g2.coeffs]
    g, u, v = _poly_gcdext(p1, p2)
    if len(g) > 1:
        lead = g[-1]
        monic = LaurentPoly(0, [c / lead for c in g])
        raise CoprimalityError(
            f"common factor {monic} divides both polynomials", common_factor=monic
        )
    d = g[0]
    u = [c / d for c in u]
    v = [c / d for c in v]
    # canonical representative: reduce u modulo p2, fold the quotient into v
    q, u = _poly_divmod(u, p2)
    v = _poly_add(v, _poly_mul(q, p1))

    h1 = LaurentPoly(-g1.min_deg, u)
    h2 = LaurentPoly(-g2.min_deg, v)
    identity = g1 * h1 + g2 * h2
    if identity != LaurentPoly.one():
        raise RuntimeError("Bezout identity failed to verify exactly")
    return h1, h2


def eval_torus(p, w):
    """Evaluate ``p`` at ``z = exp(-2*pi*i*w)``; ``w`` may be an array."""
    z = np.exp(-2j * np.pi * np.asarray(w, dtype=float))
    return p.eval(z)


@dataclass(frozen=True)
class PositivityReport:
    min_value: float
    argmin: float
    positive: bool
    grid: int


def positivity_certificate(p, grid):
    """Minimum of a Hermitian-symmetric polynomial over a uniform torus grid.

    Requires ``p(conj(z)^{-1}) == conj(p(z))``, i.e. ``c_{-k} == conj(c_k)``,
    so values on the unit circle are real.  Reports the grid minimum, its
    location in ``[0, 1)`` and whether the minimum is strictly positive.
    """
    if grid < 1:
        raise ValueError("grid must be positive")
    hi = max(abs(p.min_deg), abs(p.max_deg)) if not p.is_zero else 0
    for k in range(hi + 1):
        if p.coeff(-k) != _conj(p.coeff(k)):
            raise SymmetryError(
                f"coefficient at z^{-k} is not the conjugate of the one at z^{k}"
            )
    w = np.arange(grid) / grid
    vals = np.real(eval_torus(p, w))
    i = int(np.argmin(vals))
    mn = float(vals[i])
    return PositivityReport(min_value=mn, argmin=float(w[i]), positive=mn > 0.0, grid=int(grid))


# -- discrete B-splines ------------------------------------------------------


@dataclass(frozen=True)
class DiscreteBSpline:
    """Central discrete B-spline: p-fold self-convolution of ones over ``|n| <= (K-1)/2``."""

    K: int
    p: int
    values: tuple

    @property
    def radius(self):
        return self.p * (self.K - 1) // 2

    def value(self, n):
        i = n + self.radius
        if 0 <= i < len(self.values):
            return self.values[i]
        return 0

    def support(self):
        return range(-self.radius, self.radius + 1)


def _conv_int(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def bspline(K, p):
    """Exact integer values of the order-``p`` central discrete B-spline."""
    K, p = int(K), int(p)
    if K % 2 == 0:
        raise ValueError("node spacing K must be odd")
    if K < 1 or p < 1:
        raise ValueError("K and p must be positive")
    base = [1] * K
    vals = base
    for _ in range(p - 1):
        vals = _conv_int(vals, base)
    return DiscreteBSpline(K=K, p=p, values=tuple(vals))


def polyphase_sample(m, K, i):
    """Stride-``K`` component polynomial ``sum_n m(n*K + i) z^n``."""
    K, i = int(K), int(i)
    if K < 1:
        raise ValueError("stride must be positive")
    if not 0 <= i < K:
        raise ValueError("component index must satisfy 0 <= i < K")
    R = m.radius
    n_lo = -((R + i) // K)
    n_hi = (R - i) // K
    terms = {n: m.value(n * K + i) for n in range(n_lo, n_hi + 1)}
    return LaurentPoly.from_terms(terms)
