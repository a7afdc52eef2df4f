"""Quantitative checks tied to the dilatation: the 2m+1 <= lambda^e
inequality, membership in the bounded-dilatation families, and the
tetrahedron-count bound, all decided exactly."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import FieldElement, IntPolynomial, NumberField, compare_real
from .errors import BoundViolated, VeertrackError


@dataclass
class BoundReport:
    branch_count: int
    fold_count: int
    dilatation_decimal: str
    inequality_margin: tuple      # rational interval for lambda^e - (2m+1)
    psi_exponent: Fraction        # 2g - 2 + (2/3) n
    entry_sums: tuple             # per fold factor
    branch_bound: int             # 18g - 18 + 6n
    branch_bound_tight: bool


def verify_inequality(cert, genus, punctures) -> BoundReport:
    """Check 2m+1 <= lambda^e and the per-fold entry sums on a certified run.

    A failure falsifies the implementation, not the theorem, so it raises
    BoundViolated rather than reporting.
    """
    e = len(cert.branch_order)
    m = cert.splits
    lam = cert.dilatation
    diff = lam ** e - (2 * m + 1)
    if diff.sign() < 0:
        raise BoundViolated(f"2m+1 = {2*m+1} > lambda^{e}")
    sums = tuple(f.entry_sum() for f in cert.factors)
    for s in sums:
        if s != e + 2:
            raise BoundViolated(f"fold factor entry sum {s} != {e + 2}")
    bb = 18 * genus - 18 + 6 * punctures
    if e > bb:
        raise BoundViolated(f"branch count {e} exceeds 18g-18+6n = {bb}")
    return BoundReport(
        branch_count=e,
        fold_count=m,
        dilatation_decimal=lam.decimal(10),
        inequality_margin=diff.approx(32),
        psi_exponent=Fraction(2 * genus - 2) + Fraction(2 * punctures, 3),
        entry_sums=sums,
        branch_bound=bb,
        branch_bound_tight=(e == bb),
    )


def psi_membership(lam: FieldElement, genus: int, punctures: int, cap) -> bool:
    """Whether lambda <= P**(1/(2g-2+2n/3)), decided in integer powers.

    Clearing the fractional exponent, this is lambda**(6g-6+2n) <= P**3.
    cap may be a rational or a FieldElement (any field).
    """
    k = 6 * genus - 6 + 2 * punctures
    if k <= 0:
        raise VeertrackError("psi membership needs 2g-2+2n/3 > 0")
    if isinstance(cap, FieldElement):
        if compare_real(cap, cap.field.from_rational(1)) <= 0:
            raise VeertrackError("cap must exceed 1")
        return compare_real(lam ** k, cap ** 3) <= 0
    cap = Fraction(cap)
    if cap <= 1:
        raise VeertrackError("cap must exceed 1")
    return compare_real(lam ** k, lam.field.from_rational(cap ** 3)) <= 0


def tetrahedra_bound(cap) -> int:
    """floor((P**9 - 1)/2), the tetrahedron bound for the family of cap P.

    cap may be rational or a FieldElement; irrational values are floored by
    interval refinement, which terminates because the ninth power of an
    irrational element either is rational (then handled exactly) or has an
    irrational half-offset.
    """
    if not isinstance(cap, FieldElement):
        q = (Fraction(cap) ** 9 - 1) / 2
        return math.floor(q)
    y = (cap ** 9 - 1) / 2
    if y.is_rational():
        return math.floor(y.as_rational())
    bits = 16
    while True:
        lo, hi = y.approx(bits)
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
        bits *= 2


def sqrt3_field() -> NumberField:
    return NumberField(IntPolynomial([-3, 0, 1]), Fraction(1), Fraction(2))


def hironaka_kin_cap() -> FieldElement:
    """(2 + sqrt(3))**2, the family cap for closed-surface minimal
    dilatations via delta_g**(g-1) <= 2 + sqrt(3)."""
    f = sqrt3_field()
    return (f.from_rational(2) + f.generator()) ** 2


def genus_hypothesis_holds(delta, genus: int) -> bool:
    """delta**(g-1) <= 2 + sqrt(3), exactified across fields."""
    if genus < 2:
        raise VeertrackError("needs a closed surface of genus >= 2")
    f = sqrt3_field()
    rhs = f.from_rational(2) + f.generator()
    if not isinstance(delta, FieldElement):
        lhs = f.from_rational(Fraction(delta) ** (genus - 1))
        return compare_real(lhs, rhs) <= 0
    return compare_real(delta ** (genus - 1), rhs) <= 0
