"""Generalized Kloosterman sums, complete sum-product sums, and the
stratification / bound experiments built on top of them."""

__version__ = "0.1.0"

from .field import PrimeField, MultChar, build_field, eval_char, eval_additive, gauss_sum
from .chartuples import CharTuple, classify_tuple, is_kummer_induced
from .kloosterman import KlTable, kl_table_fast, kl_table_naive, kl_pointwise
from .sums import sigma_I, sigma_II, eval_KR
from .strata import is_diagonal, singular_polynomial, z_fiber_count, stratum_scan

__all__ = [
    "PrimeField",
    "MultChar",
    "build_field",
    "eval_char",
    "eval_additive",
    "gauss_sum",
    "CharTuple",
    "classify_tuple",
    "is_kummer_induced",
    "KlTable",
    "kl_table_fast",
    "kl_table_naive",
    "kl_pointwise",
    "sigma_I",
    "sigma_II",
    "eval_KR",
    "is_diagonal",
    "singular_polynomial",
    "z_fiber_count",
    "stratum_scan",
    "__version__",
]
