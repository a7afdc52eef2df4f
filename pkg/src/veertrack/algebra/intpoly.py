"""Exact integer/rational polynomial arithmetic and Sturm root isolation.

Polynomials are dense coefficient sequences, lowest degree first.  All
arithmetic is over Python ints and fractions.Fraction; nothing here ever
touches floating point, so every sign decision is exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import sympy


class IntPolynomial:
    """Integer polynomial, coefficients lowest degree first.

    The zero polynomial has an empty coefficient tuple and degree -1;
    otherwise the leading coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial([self[i] + other[i] for i in range(n)])

    def __sub__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPolynomial([self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return IntPolynomial([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPolynomial([c * other for c in self.coeffs])
        if self.is_zero() or other.is_zero():
            return IntPolynomial([])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __call__(self, x):
        """Evaluate with Horner; exact for int/Fraction arguments."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self):
        return IntPolynomial([i * c for i, c in enumerate(self.coeffs)][1:])

    def content(self):
        g = 0
        for c in self.coeffs:
            g = gcd(g, abs(c))
        return g

    def primitive(self):
        """Primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        g = self.content()
        cs = [c // g for c in self.coeffs]
        if cs[-1] < 0:
            cs = [-c for c in cs]
        return IntPolynomial(cs)

    def monic_rational(self):
        lead = Fraction(self.coeffs[-1])
        return [Fraction(c) / lead for c in self.coeffs]

    def divides(self, other):
        """True when self divides other exactly over the rationals."""
        if self.is_zero():
            return other.is_zero()
        _, r = qpoly_divmod([Fraction(c) for c in other.coeffs],
                            [Fraction(c) for c in self.coeffs])
        return not r

    def __str__(self):
        if self.is_zero():
            return "0"
        return " ".join(str(c) for c in self.coeffs)

    def __repr__(self):
        return f"IntPolynomial([{', '.join(str(c) for c in self.coeffs)}])"

    @classmethod
    def parse(cls, text):
        return cls([int(tok) for tok in text.split()])


# -- dense Fraction polynomials (lists, lowest degree first) ----------------

def qpoly_trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def qpoly_divmod(num, den):
    """Quotient and remainder over the rationals."""
    num = list(num)
    den = qpoly_trim(list(den))
    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(num) - len(den) + 1, 0)
    lead = den[-1]
    for k in range(len(num) - len(den), -1, -1):
        c = num[k + len(den) - 1] / lead
        if c:
            q[k] = c
            for i, d in enumerate(den):
                num[k + i] -= c * d
    return qpoly_trim(q), qpoly_trim(num)


def qpoly_eval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def sturm_chain(poly: IntPolynomial):
    """Sturm chain of a squarefree polynomial, as Fraction lists."""
    p0 = [Fraction(c) for c in poly.coeffs]
    p1 = [Fraction(c) for c in poly.derivative().coeffs]
    chain = [p0, p1]
    while chain[-1]:
        _, r = qpoly_divmod(chain[-2], chain[-1])
        if not r:
            break
        chain.append([-c for c in r])
    return chain


def _sign_variations(chain, x):
    signs = []
    for p in chain:
        v = qpoly_eval(p, x)
        if v:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def root_bound(poly: IntPolynomial) -> Fraction:
    """Cauchy bound: every real root lies in (-B, B)."""
    lead = abs(poly.coeffs[-1])
    m = max(abs(c) for c in poly.coeffs[:-1]) if poly.degree > 0 else 0
    return 1 + Fraction(m, lead)


def isolate_real_roots(poly: IntPolynomial):
    """Isolating intervals for the real roots of an irreducible polynomial.

    Returns a list of (lo, hi) Fraction pairs in increasing order.  For a
    degree-1 polynomial the single interval is degenerate (lo == hi == root);
    otherwise lo < hi, poly(lo) and poly(hi) are nonzero of opposite sign,
    and each interval contains exactly one root.
    """
    if poly.degree < 1:
        return []
    if poly.degree == 1:
        b, a = poly.coeffs[0], poly.coeffs[1]
        r = Fraction(-b, a)
        return [(r, r)]
    chain = sturm_chain(poly)
    bound = root_bound(poly)
    lo, hi = -bound, bound
    total = _sign_variations(chain, lo) - _sign_variations(chain, hi)
    out = []
    stack = [(lo, hi, total)]
    while stack:
        a, b, count = stack.pop()
        if count == 0:
            continue
        if count == 1:
            out.append((a, b))
            continue
        mid = (a + b) / 2
        # irreducible of degree >= 2 has no rational roots
        assert poly(mid) != 0
        va = _sign_variations(chain, a)
        vm = _sign_variations(chain, mid)
        vb = _sign_variations(chain, b)
        stack.append((a, mid, va - vm))
        stack.append((mid, b, vm - vb))
    out.sort()
    return out


def refine_root(poly: IntPolynomial, lo: Fraction, hi: Fraction):
    """One bisection step on an isolating interval with a sign change."""
    if lo == hi:
        return lo, hi
    mid = (lo + hi) / 2
    vm = poly(mid)
    assert vm != 0
    if (poly(lo) > 0) != (vm > 0):
        return lo, mid
    return mid, hi


_X = sympy.Symbol("x")


def factor_rational(coeffs) -> list[tuple[IntPolynomial, int]]:
    """Irreducible factorization over Q of a polynomial with Fraction or
    int coefficients, as primitive integer factors with positive lead."""
    expr = sympy.Poly(list(reversed([sympy.Rational(c) for c in coeffs])), _X)
    _, factors = expr.factor_list()
    out = []
    for fac, mult in factors:
        cs = [int(c) for c in reversed(fac.all_coeffs())]
        out.append((IntPolynomial(cs).primitive(), int(mult)))
    out.sort(key=lambda fm: (fm[0].degree, fm[0].coeffs))
    return out


def is_irreducible(poly: IntPolynomial) -> bool:
    if poly.degree < 1:
        return False
    factors = factor_rational(poly.coeffs)
    return len(factors) == 1 and factors[0][1] == 1
