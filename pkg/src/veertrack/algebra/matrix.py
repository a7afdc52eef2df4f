"""Nonnegative integer matrices and exact Perron-Frobenius eigenpairs."""

from __future__ import annotations

from fractions import Fraction

from ..errors import NotPrimitive
from .field import FieldElement, NumberField, compare_real
from .intpoly import IntPolynomial, factor_rational, isolate_real_roots, refine_root


class IntegerMatrix:
    """Square matrix of arbitrary-precision integers, row-major."""

    __slots__ = ("n", "rows")

    def __init__(self, rows):
        rows = tuple(tuple(int(x) for x in r) for r in rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.n = n
        self.rows = rows

    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __eq__(self, other):
        return isinstance(other, IntegerMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __matmul__(self, other):
        n = self.n
        ot = list(zip(*other.rows))
        return IntegerMatrix(
            [[sum(a * b for a, b in zip(row, col)) for col in ot]
             for row in self.rows])

    def __pow__(self, k):
        acc = IntegerMatrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                acc = acc @ base
            base = base @ base
            k >>= 1
        return acc

    def entry_sum(self):
        return sum(sum(r) for r in self.rows)

    def is_nonnegative(self):
        return all(x >= 0 for r in self.rows for x in r)

    def is_primitive(self):
        """Some power is entrywise positive.

        Decided on the boolean support pattern (positivity of m^k depends
        only on the digraph of nonzero entries); Wielandt's bound
        (n-1)^2 + 1 caps the exponent.
        """
        n = self.n
        if n == 1:
            return self.rows[0][0] > 0
        b = [[bool(x) for x in r] for r in self.rows]
        cur = b
        for _ in range((n - 1) ** 2 + 1):
            if all(all(r) for r in cur):
                return True
            cur = [[any(cur[i][t] and b[t][j] for t in range(n))
                    for j in range(n)] for i in range(n)]
        return False

    def apply(self, vec):
        return [sum(a * x for a, x in zip(row, vec)) for row in self.rows]

    def __repr__(self):
        return f"IntegerMatrix({[list(r) for r in self.rows]})"


def char_poly(m: IntegerMatrix) -> IntPolynomial:
    """det(xI - m) by Faddeev-LeVerrier; every division is exact."""
    n = m.n
    a = [list(r) for r in m.rows]
    mk = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    coeffs = [1]
    for k in range(1, n + 1):
        am = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)]
              for i in range(n)]
        tr = sum(am[i][i] for i in range(n))
        assert tr % k == 0
        ck = -(tr // k)
        coeffs.append(ck)
        mk = [[am[i][j] + (ck if i == j else 0) for j in range(n)]
              for i in range(n)]
    return IntPolynomial(list(reversed(coeffs)))


def _largest_real_root(poly: IntPolynomial):
    """(lo, hi) isolating the largest real root, or None."""
    roots = isolate_real_roots(poly)
    return roots[-1] if roots else None


def perron_root_field(m: IntegerMatrix) -> NumberField:
    """Field generated by the spectral radius of a primitive matrix.

    The spectral radius of a primitive nonnegative matrix is its largest
    real eigenvalue and a simple root of the characteristic polynomial, so
    it is found by comparing the largest real roots of the irreducible
    factors.
    """
    cp = char_poly(m)
    best = None  # (factor, mult, (lo, hi))
    for fac, mult in factor_rational(cp.coeffs):
        iso = _largest_real_root(fac)
        if iso is None:
            continue
        if best is None:
            best = (fac, mult, iso)
            continue
        bf, bm, biso = best
        # distinct irreducible factors share no roots: refine to strict order
        a, b = iso, biso
        while not (a[1] < b[0] or b[1] < a[0]):
            a = refine_root(fac, *a)
            b = refine_root(bf, *b)
        if b[1] < a[0]:
            best = (fac, mult, a)
    if best is None:
        raise NotPrimitive("matrix has no real eigenvalue")
    fac, mult, iso = best
    assert mult == 1, "Perron root must be a simple eigenvalue"
    return NumberField(fac, iso[0], iso[1], check=False)


def _kernel_vector(rows, field):
    """A nonzero kernel vector of a singular matrix over the field.

    rows: list of lists of FieldElement.  Asserts the kernel is 1-dim.
    """
    n = len(rows)
    a = [list(r) for r in rows]
    pivots = []  # (row, col)
    row = 0
    for col in range(n):
        piv = None
        for r in range(row, n):
            if not a[r][col].is_zero():
                piv = r
                break
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = a[row][col].inverse()
        a[row] = [x * inv for x in a[row]]
        for r in range(n):
            if r != row and not a[r][col].is_zero():
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
        pivots.append((row, col))
        row += 1
    free = [c for c in range(n) if c not in {c for _, c in pivots}]
    assert len(free) == 1, f"kernel dimension {len(free)}, expected 1"
    fc = free[0]
    v = [field.zero()] * n
    v[fc] = field.one()
    for r, c in pivots:
        v[c] = -a[r][fc]
    return v


def pf_eigenpair(m: IntegerMatrix):
    """Exact Perron-Frobenius eigenvalue and eigenvector of a primitive
    nonnegative integer matrix.

    Returns (lam, v) with lam a FieldElement generating Q(lam), v a list of
    strictly positive FieldElements normalized so v[0] == 1, and
    m @ v == lam * v holding exactly.
    """
    if not m.is_nonnegative():
        raise ValueError("matrix must be nonnegative")
    if not m.is_primitive():
        raise NotPrimitive(
            "no power of the matrix is positive; the input does not come "
            "from a filling folding cycle")
    field = perron_root_field(m)
    lam = field.generator()
    n = m.n
    rows = [[field.from_rational(Fraction(m.rows[i][j])) - (lam if i == j else 0)
             for j in range(n)] for i in range(n)]
    v = _kernel_vector(rows, field)
    v0 = v[0]
    assert not v0.is_zero()
    v = [x / v0 for x in v]
    for x in v:
        assert x.sign() > 0, "Perron eigenvector must be positive"
    for i in range(n):
        lhs = field.zero()
        for j in range(n):
            lhs = lhs + v[j] * Fraction(m.rows[i][j])
        assert (lhs - lam * v[i]).is_zero(), "eigen relation must hold exactly"
    return lam, v


def pf_dilatation_data(m: IntegerMatrix):
    """(lam, v, minpoly) convenience wrapper."""
    lam, v = pf_eigenpair(m)
    return lam, v, lam.field.minpoly


def same_eigenvalue(a: FieldElement, b: FieldElement) -> bool:
    return compare_real(a, b) == 0
