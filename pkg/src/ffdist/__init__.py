"""Exact distance sets and incidence counts over finite fields."""

from .counting import (
    ChainReport,
    DistanceSpectrum,
    chain_report,
    quadruple_count,
    spectrum_fft,
    spectrum_naive,
    triple_count,
    union_triple_count,
)
from .errors import CapacityError, ConsistencyError, UsageError
from .field import Field, FieldElement, fe_add, fe_mul, fe_pow
from .geometry import (
    NormSpec,
    PairSet,
    PointSet,
    Space,
    distance_set,
    fibers,
    norm_s,
    sphere,
    two_param_distance_set,
)
from .proof_engine import Certificate, certify, coverage_ratio, default_tau, heavy_fibers

__all__ = [
    "CapacityError", "Certificate", "ChainReport", "ConsistencyError", "DistanceSpectrum",
    "Field", "FieldElement", "NormSpec", "PairSet", "PointSet", "Space", "UsageError",
    "certify", "chain_report", "coverage_ratio", "default_tau", "distance_set", "fe_add",
    "fe_mul", "fe_pow", "fibers", "heavy_fibers", "norm_s", "quadruple_count", "sphere",
    "spectrum_fft", "spectrum_naive", "triple_count", "two_param_distance_set",
    "union_triple_count",
]
