"""Parseval frames for the left regular representation of free groups.

Words, finitely supported vectors, exact frame sums, the coset construction
of strongly disjoint tuples, row parametrizations and Riesz certificates.
"""
__version__ = "0.1.0"

from .group import CosetStructure, FreeGroup, ball, format_word, inv, mul, parse_word, reduce_word
from .l2 import ConvKernel, L2Vector, char_mult, character, inner, kernel_apply, lambda_act, rho_act
from .frame import FrameWindow, GramReport, disjointness_residual, equivalence_residual, gram, parseval_residual
from .construction import (
    DisjointTuple,
    SpectralKernel,
    apply_spectral_projection,
    build_disjoint_tuple,
    character_orthogonality,
    combine_alpha_beta,
    orthogonalize_translates,
)
from .parametrize import KernelRow, rows_disjoint, rows_equivalent, synthesize, verify_row
from .riesz import FeichtingerParams, RieszCertificate, feichtinger_report, riesz_bounds
from .config import RunConfig, validate_config
