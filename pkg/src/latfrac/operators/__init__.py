from .kernel import (
    OperatorResult,
    TailBound,
    TruncatedNorm,
    apply_riesz,
    apply_T,
    default_window,
    evaluate_T,
    lq_tail_bound,
    truncated_lq_norm,
)
from .maximal import fractional_maximal, fractional_maximal_fast, maximal_at
from .regions import RegionDiagnostic, i1_constant, region_decompose_alpha0
from .tails import TailEstimate, TailSum, lemma_tail_bound, tail_sum, tail_sum_certified, tail_sum_upper

__all__ = [
    "OperatorResult",
    "RegionDiagnostic",
    "TailBound",
    "TailEstimate",
    "TailSum",
    "TruncatedNorm",
    "apply_T",
    "apply_riesz",
    "default_window",
    "evaluate_T",
    "fractional_maximal",
    "fractional_maximal_fast",
    "i1_constant",
    "lemma_tail_bound",
    "lq_tail_bound",
    "maximal_at",
    "region_decompose_alpha0",
    "tail_sum",
    "tail_sum_certified",
    "tail_sum_upper",
    "truncated_lq_norm",
]
