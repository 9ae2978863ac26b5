"""Common basis extraction with a given number of common components.

Alternates the exact minimizers of ``sum_n ||Q_n Z_n - A||_F^2`` over
``Z_n`` (``Z_n = Q_n^T A``) and over column-orthonormal ``A`` (the polar
factor of ``P = sum_n Q_n Z_n``).
"""

from dataclasses import dataclass

import numpy as np

from .cobe import CommonBasis, as_factors
from .errors import DegenerateP
from .linalg import column_signs
from .multiblock import make_rng

MAX_RESTARTS = 5
RANK_TOL = 1e-12


@dataclass(frozen=True)
class CobecConfig:
    c: int
    max_iter: int = 500
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.c < 1:
            raise ValueError("c must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")


def update_z(q, a_bar):
    return q.T @ a_bar


def procrustes_basis(p):
    """Column-orthonormal ``A`` maximizing ``trace(P^T A)``.

    With the thin SVD ``P = E diag(lam) V^T`` the maximizer is ``E V^T`` and
    the maximum equals ``sum(lam)``.
    """
    p = np.asarray(p, dtype=float)
    e, lam, vt = np.linalg.svd(p, full_matrices=False)
    if lam.size < p.shape[1] or lam[-1] <= RANK_TOL * max(lam[0], 1e-300):
        raise DegenerateP(f"P has rank < {p.shape[1]} (singular values {lam})")
    return e @ vt


def objective(q_list, z_list, a_bar):
    return float(sum(np.sum((q @ z - a_bar) ** 2) for q, z in zip(q_list, z_list)))


def _initial_basis(q_list, c, rng):
    for _ in range(MAX_RESTARTS):
        z_list = [rng.standard_normal((q.shape[1], c)) for q in q_list]
        try:
            return procrustes_basis(sum(q @ z for q, z in zip(q_list, z_list)))
        except DegenerateP:
            continue
    raise DegenerateP(f"no full-rank P after {MAX_RESTARTS} random starts")


def cobec(blocks, cfg, trace=None):
    """Common basis of exactly ``cfg.c`` columns.

    ``blocks`` are :class:`~cifa.preprocess.OrthoFactor` (or raw matrices).
    Iterates until the relative objective change drops below ``cfg.tol``.
    Columns are returned in ascending order of their residual
    ``f_k = sum_n ||Q_n z_{n,k} - a_k||^2``.  If ``trace`` is a list, the
    objective after each full alternation is appended to it.
    """
    factors = as_factors(blocks)
    q_list = [fac.q for fac in factors]
    min_rank = min(fac.rank for fac in factors)
    if cfg.c > min_rank:
        raise ValueError(f"c={cfg.c} exceeds the smallest block rank {min_rank}")
    rng = make_rng(cfg.seed)

    a_bar = _initial_basis(q_list, cfg.c, rng)
    z_list = [update_z(q, a_bar) for q in q_list]
    prev = objective(q_list, z_list, a_bar)
    if trace is not None:
        trace.append(prev)
    iters = 0
    converged = False
    for iters in range(1, cfg.max_iter + 1):
        p = sum(q @ z for q, z in zip(q_list, z_list))
        try:
            a_bar = procrustes_basis(p)
        except DegenerateP:
            if iters > MAX_RESTARTS:
                raise
            a_bar = _initial_basis(q_list, cfg.c, rng)
        z_list = [update_z(q, a_bar) for q in q_list]
        cur = objective(q_list, z_list, a_bar)
        if trace is not None:
            trace.append(cur)
        if abs(prev - cur) <= cfg.tol * max(prev, RANK_TOL):
            converged = True
            break
        prev = cur

    per_column = sum(np.sum((q @ z - a_bar) ** 2, axis=0) for q, z in zip(q_list, z_list))
    order = np.argsort(per_column, kind="stable")
    a_bar = a_bar[:, order]
    signs = column_signs(a_bar)
    a_bar = a_bar * signs
    return CommonBasis(
        a_bar=a_bar,
        residuals=tuple(per_column[order].tolist()),
        loadings=tuple(z[:, order] * signs for z in z_list),
        iterations=(iters,),
        diagnostics={"mode": "cobec", "converged": converged, "residual_convention": "per-column f_k at the fixed point"},
    )
