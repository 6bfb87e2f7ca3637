"""Filling norms and filling-volume functions of group cell complexes.

Finite windows of universal covers, exact minimal-norm fillings by rational
simplex and branch-and-bound, and the tables and comparison checks built on
them.
"""

__version__ = "0.1.0"

from .builtins import catalog, chain_map, complex_spec, presentation
from .chains import Chain, boundary, chain_from_literal, enumerate_cycles, l1_norm
from .complexes import instantiate_map, instantiate_window
from .filling import escalate_until_stable, fill
from .functions import (
    check_norm_equivalence,
    dehn_consistency,
    fv_table,
    linear_equiv_fit,
    operator_bound,
    subgroup_inequality_check,
)
