"""Values of symplectic forms on integer tuples: counting, volumes, random lattices, density."""

from .errors import CapacityError, FormatError, SympvalError, TruncationWarning
from .forms import SymplecticForm, form_from_json, pair_values, rationality_test
from .enumeration import count_tuples, enum_ball, fit_exponent, main_term
from .volume import direct_volume, estimate_cg
from .density import integer_approx_search, real_solution

__all__ = [
    "CapacityError", "FormatError", "SympvalError", "TruncationWarning",
    "SymplecticForm", "form_from_json", "pair_values", "rationality_test",
    "count_tuples", "enum_ball", "fit_exponent", "main_term",
    "direct_volume", "estimate_cg",
    "integer_approx_search", "real_solution",
]
