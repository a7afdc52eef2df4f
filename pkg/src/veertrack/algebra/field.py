"""The field Q(lambda) for a designated real algebraic number lambda.

A NumberField is an irreducible integer minimal polynomial together with an
isolating rational interval selecting one real root.  Elements are stored as
rational-coefficient polynomials in lambda of degree < deg(minpoly); equality
is equality of canonical representations, and order is decided by refining
the isolating interval until an interval evaluation excludes zero.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import FieldError, FieldMismatch
from .intpoly import (
    IntPolynomial,
    factor_rational,
    is_irreducible,
    isolate_real_roots,
    qpoly_divmod,
    refine_root,
)


def _as_fraction(x):
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to a rational")


def _interval_add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _interval_mul(a, b):
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(ps), max(ps))


class NumberField:
    """Shared field descriptor: minimal polynomial + isolating interval.

    The interval is refined in place as comparisons demand more precision;
    refinement never changes which root is designated, so elements remain
    immutable values.
    """

    def __init__(self, minpoly: IntPolynomial, lo, hi, check=True):
        self.minpoly = minpoly.primitive()
        lo, hi = Fraction(lo), Fraction(hi)
        if check:
            if not is_irreducible(self.minpoly):
                raise FieldError(f"minimal polynomial {minpoly} is reducible")
            if lo == hi:
                if self.minpoly.degree != 1 or self.minpoly(lo) != 0:
                    raise FieldError("degenerate interval must pin a rational root")
            else:
                if self.minpoly(lo) == 0 or self.minpoly(hi) == 0:
                    raise FieldError("interval endpoints must not be roots")
                if (self.minpoly(lo) > 0) == (self.minpoly(hi) > 0):
                    raise FieldError("interval does not isolate a root")
                inside = [r for r in isolate_real_roots(self.minpoly)
                          if lo < r[1] and r[0] < hi]
                if len(inside) != 1:
                    raise FieldError("interval must contain exactly one real root")
        self._lo = lo
        self._hi = hi
        self.degree = self.minpoly.degree

    def interval(self):
        return (self._lo, self._hi)

    def refine(self):
        self._lo, self._hi = refine_root(self.minpoly, self._lo, self._hi)

    def same_descriptor(self, other):
        if self is other:
            return True
        if self.minpoly != other.minpoly:
            return False
        # same root iff the isolating intervals overlap
        return self._lo <= other._hi and other._lo <= self._hi

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.same_descriptor(other)

    def __hash__(self):
        return hash(self.minpoly)

    def __repr__(self):
        return f"NumberField({self.minpoly}, ({self._lo}, {self._hi}))"

    # -- constructors for elements -------------------------------------

    def zero(self):
        return FieldElement(self, ())

    def one(self):
        return FieldElement(self, (Fraction(1),))

    def generator(self):
        if self.degree == 1:
            # lambda itself is rational: -c0/c1
            return self.from_rational(Fraction(-self.minpoly[0], self.minpoly[1]))
        return FieldElement(self, (Fraction(0), Fraction(1)))

    def from_rational(self, q):
        return FieldElement(self, (_as_fraction(q),))

    def element(self, coeffs):
        cs = [_as_fraction(c) for c in coeffs]
        if len(cs) >= self.degree and self.degree > 0:
            cs = _reduce_mod(cs, self.minpoly)
        return FieldElement(self, tuple(cs))


def _reduce_mod(coeffs, minpoly: IntPolynomial):
    _, r = qpoly_divmod(coeffs, [Fraction(c) for c in minpoly.coeffs])
    return r


class FieldElement:
    """Element of Q(lambda), canonically reduced mod the minimal polynomial."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)

    # -- helpers ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if not self.field.same_descriptor(other.field):
                raise FieldMismatch("elements live in different fields")
            return other
        return self.field.from_rational(other)

    def is_zero(self):
        return not self.coeffs

    def is_rational(self):
        return len(self.coeffs) <= 1

    def as_rational(self) -> Fraction:
        if not self.coeffs:
            return Fraction(0)
        if len(self.coeffs) == 1:
            return self.coeffs[0]
        raise FieldError("element is irrational")

    # -- ring/field operations --------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        return FieldElement(self.field, [
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
            for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return self.field.zero()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return FieldElement(self.field, _reduce_mod(out, self.field.minpoly))

    __rmul__ = __mul__

    def inverse(self):
        """Extended Euclid modulo the minimal polynomial."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        if len(self.coeffs) == 1:
            return self.field.from_rational(1 / self.coeffs[0])
        # r0 = minpoly, r1 = self; track s with s*self = r (mod minpoly)
        r0 = [Fraction(c) for c in self.field.minpoly.coeffs]
        r1 = list(self.coeffs)
        s0, s1 = [], [Fraction(1)]
        while r1:
            q, r = qpoly_divmod(r0, r1)
            s = _qpoly_sub(s0, _qpoly_mul(q, s1))
            r0, r1, s0, s1 = r1, r, s1, s
        # r0 is a nonzero constant gcd (minpoly irreducible)
        assert len(r0) == 1
        inv = [c / r0[0] for c in s0]
        return FieldElement(self.field, _reduce_mod(inv, self.field.minpoly))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        acc = self.field.one()
        base = self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    # -- order ------------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, FieldElement)):
            try:
                return (self - other).is_zero()
            except FieldMismatch:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.field.minpoly, self.coeffs))

    def sign(self):
        """Exact sign in {-1, 0, 1} of the real value."""
        if self.is_zero():
            return 0
        if len(self.coeffs) == 1:
            return 1 if self.coeffs[0] > 0 else -1
        while True:
            lo, hi = self._interval_value()
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            self.field.refine()

    def _interval_value(self):
        """Interval Horner evaluation over the field's current interval."""
        iv = self.field.interval()
        acc = (Fraction(0), Fraction(0))
        for c in reversed(self.coeffs):
            acc = _interval_mul(acc, iv)
            acc = _interval_add(acc, (c, c))
        return acc

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def approx(self, bits=53):
        """Rational interval of width < 2**-bits containing the value."""
        if bits < 1:
            raise ValueError("bits must be >= 1")
        if self.is_rational():
            q = self.as_rational()
            return (q, q)
        eps = Fraction(1, 2 ** bits)
        while True:
            lo, hi = self._interval_value()
            if hi - lo < eps:
                return (lo, hi)
            self.field.refine()

    def __float__(self):
        lo, hi = self.approx(60)
        return float((lo + hi) / 2)

    def decimal(self, digits=10):
        lo, hi = self.approx(int(digits * 3.33) + 8)
        mid = (lo + hi) / 2
        scaled = mid * 10 ** digits
        n = scaled.numerator // scaled.denominator
        sign = "-" if n < 0 else ""
        n = abs(n)
        whole, frac = divmod(n, 10 ** digits)
        return f"{sign}{whole}.{str(frac).zfill(digits)}"

    def __repr__(self):
        if self.is_zero():
            return "0"
        return " + ".join(f"{c}*L^{i}" if i else f"{c}"
                          for i, c in enumerate(self.coeffs) if c)


def _qpoly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _qpoly_sub(a, b):
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)
           for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def compare(a: FieldElement, b) -> int:
    """Exact trichotomy: -1, 0 or 1 as a < b, a == b, a > b."""
    return (a - b).sign()


def minimal_polynomial(a: FieldElement) -> IntPolynomial:
    """Minimal polynomial of the element over Q (primitive, positive lead).

    Computed as the irreducible factor of the characteristic polynomial of
    the multiplication-by-a matrix that annihilates a.
    """
    if a.is_rational():
        q = a.as_rational()
        return IntPolynomial([-q.numerator, q.denominator]).primitive()
    d = a.field.degree
    # columns: a * lambda^j expressed in the power basis
    cols = []
    lam = a.field.generator()
    cur = a
    for _ in range(d):
        col = list(cur.coeffs) + [Fraction(0)] * (d - len(cur.coeffs))
        cols.append(col)
        cur = cur * lam
    charpoly = _char_poly_rational(cols, d)
    for fac, _ in factor_rational(charpoly):
        val = _evaluate_intpoly(fac, a)
        if val.is_zero():
            return fac
    raise AssertionError("no factor annihilates the element")


def _char_poly_rational(cols, d):
    """Faddeev-LeVerrier char poly of a rational matrix given by columns.

    Returns coefficients lowest degree first (monic).
    """
    a = [[cols[j][i] for j in range(d)] for i in range(d)]
    m = [[Fraction(1) if i == j else Fraction(0) for j in range(d)]
         for i in range(d)]
    coeffs = [Fraction(1)]  # leading
    for k in range(1, d + 1):
        am = [[sum(a[i][t] * m[t][j] for t in range(d)) for j in range(d)]
              for i in range(d)]
        tr = sum(am[i][i] for i in range(d))
        ck = -tr / k
        coeffs.append(ck)
        m = [[am[i][j] + (ck if i == j else 0) for j in range(d)]
             for i in range(d)]
    return list(reversed(coeffs))


def _evaluate_intpoly(poly: IntPolynomial, a: FieldElement) -> FieldElement:
    acc = a.field.zero()
    for c in reversed(poly.coeffs):
        acc = acc * a + c
    return acc


def root_index(a: FieldElement):
    """(minpoly, k): a is the k-th real root of its minimal polynomial."""
    mp = minimal_polynomial(a)
    roots = list(isolate_real_roots(mp))
    bits = 8
    while True:
        lo, hi = a.approx(bits)
        hits = [k for k, (rl, rh) in enumerate(roots)
                if lo <= rh and rl <= hi]
        if len(hits) == 1:
            return mp, hits[0]
        roots = [refine_root(mp, rl, rh) for rl, rh in roots]
        bits += 8


def same_real_number(a: FieldElement, b: FieldElement) -> bool:
    """Exact equality of elements possibly living in different fields."""
    try:
        return compare(a, b) == 0
    except FieldMismatch:
        pass
    mpa, ka = root_index(a)
    mpb, kb = root_index(b)
    return mpa == mpb and ka == kb


def compare_real(a: FieldElement, b: FieldElement) -> int:
    """Exact order between elements of possibly different fields."""
    try:
        return compare(a, b)
    except FieldMismatch:
        pass
    if same_real_number(a, b):
        return 0
    bits = 16
    while True:
        alo, ahi = a.approx(bits)
        blo, bhi = b.approx(bits)
        if ahi < blo:
            return -1
        if bhi < alo:
            return 1
        bits *= 2
