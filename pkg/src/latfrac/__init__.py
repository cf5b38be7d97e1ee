"""Discrete fractional series operators, Riesz potentials, maximal functions
and Hardy-space atoms on the lattice Z^n."""

from .atoms import Atom, atom_operator_norm, atomic_synthesis, domination_check, make_atom, region_geometry, sample_in_R, validate_atom
from .errors import BudgetExceeded, CannotConstruct, InvalidParameter, LatfracError, OutOfRange, SingularMatrix, SpecError
from .hardy import DilationGrid, dilated_kernel, hardy_maximal, hp_quasinorm
from .lattice import (
    CubeWindow,
    FractionalSpec,
    IntegerMatrix,
    LatticeSequence,
    atom_degree,
    conjugate_exponent,
    lp_norm,
    matrix_exact_inverse,
    matrix_norm_bounds,
    validate_spec,
)
from .operators import (
    apply_riesz,
    apply_T,
    fractional_maximal,
    fractional_maximal_fast,
    lemma_tail_bound,
    region_decompose_alpha0,
    tail_sum,
    tail_sum_certified,
    truncated_lq_norm,
)
from .report import ExperimentReport

__all__ = [
    "Atom",
    "BudgetExceeded",
    "CannotConstruct",
    "CubeWindow",
    "DilationGrid",
    "ExperimentReport",
    "FractionalSpec",
    "IntegerMatrix",
    "InvalidParameter",
    "LatfracError",
    "LatticeSequence",
    "OutOfRange",
    "SingularMatrix",
    "SpecError",
    "apply_T",
    "apply_riesz",
    "atom_degree",
    "atom_operator_norm",
    "atomic_synthesis",
    "conjugate_exponent",
    "dilated_kernel",
    "domination_check",
    "fractional_maximal",
    "fractional_maximal_fast",
    "hardy_maximal",
    "hp_quasinorm",
    "lemma_tail_bound",
    "lp_norm",
    "make_atom",
    "matrix_exact_inverse",
    "matrix_norm_bounds",
    "region_decompose_alpha0",
    "region_geometry",
    "sample_in_R",
    "tail_sum",
    "tail_sum_certified",
    "truncated_lq_norm",
    "validate_atom",
    "validate_spec",
]
