"""Common and individual feature analysis of linked multi-block data."""

from .cobe import CobeConfig, CommonBasis, cobe
from .cobec import CobecConfig, cobec
from .features import AmuseSeparator, cnfe, linked_bss, split
from .multiblock import MultiBlock, SyntheticSpec, generate_synthetic, validate
from .preprocess import detect_common_count, estimate_rank, preprocess
from .scaling import projected_common_basis

__all__ = [
    "AmuseSeparator",
    "CobeConfig",
    "CobecConfig",
    "CommonBasis",
    "MultiBlock",
    "SyntheticSpec",
    "cnfe",
    "cobe",
    "cobec",
    "detect_common_count",
    "estimate_rank",
    "generate_synthetic",
    "linked_bss",
    "preprocess",
    "projected_common_basis",
    "split",
    "validate",
]
