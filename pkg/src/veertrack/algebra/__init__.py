from .intpoly import IntPolynomial, factor_rational, is_irreducible, isolate_real_roots
from .field import (
    FieldElement,
    NumberField,
    compare,
    compare_real,
    minimal_polynomial,
    root_index,
    same_real_number,
)
from .matrix import IntegerMatrix, char_poly, perron_root_field, pf_eigenpair

__all__ = [
    "IntPolynomial",
    "factor_rational",
    "is_irreducible",
    "isolate_real_roots",
    "FieldElement",
    "NumberField",
    "compare",
    "compare_real",
    "minimal_polynomial",
    "root_index",
    "same_real_number",
    "IntegerMatrix",
    "char_poly",
    "perron_root_field",
    "pf_eigenpair",
]
