"""SVD-based NMF initializations (NNSVD-LRC, NNDSVD, SVD-NMF) and solvers."""

from ._core import (
    ConvergenceFailure,
    InputError,
    ahals_solve,
    ahals_solve_lowrank,
    low_rank_error,
    make_synthetic,
    mu_solve,
    nndsvd,
    nnls_update_h,
    nnsvd_lrc,
    random_init,
    relative_error,
    sparsity,
    svd_nmf,
    truncated_svd,
)

__all__ = [
    "ConvergenceFailure",
    "InputError",
    "ahals_solve",
    "ahals_solve_lowrank",
    "low_rank_error",
    "make_synthetic",
    "mu_solve",
    "nndsvd",
    "nnls_update_h",
    "nnsvd_lrc",
    "random_init",
    "relative_error",
    "sparsity",
    "svd_nmf",
    "truncated_svd",
]
