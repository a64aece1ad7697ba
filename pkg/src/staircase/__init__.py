"""Exact arithmetic for infinite staircases, generating triples and ATF mutations of H_b."""
from .atf import (
    DecoratedQuad,
    associate,
    limit_run,
    mutate,
    mutate_step,
    q0,
    verify_association_base,
    verify_association_step,
    vy_decomposition,
)
from .classes import QuasiPerfect, acc_of_b, from_center, is_blocked, obstruction_mu
from .scalars import IMat2, IVec2, LinFormB, QuadExt
from .triples import (
    GeneratingTriple,
    base_triple,
    blocked_interval,
    mutate_x,
    mutate_y,
    seed_quasi_triple,
    staircase_limits,
    tree_enumerate,
)

__all__ = [
    "DecoratedQuad", "GeneratingTriple", "IMat2", "IVec2", "LinFormB", "QuadExt", "QuasiPerfect",
    "acc_of_b", "associate", "base_triple", "blocked_interval", "from_center", "is_blocked",
    "limit_run", "mutate", "mutate_step", "mutate_x", "mutate_y", "obstruction_mu", "q0",
    "seed_quasi_triple", "staircase_limits", "tree_enumerate", "verify_association_base",
    "verify_association_step", "vy_decomposition",
]
