"""Random-projection front end for blocks with a very large row count.

The blocks are compressed to ``P @ Y_n`` with a short Gaussian ``P``, the
common basis is found there, and the per-block weights ``w_n`` are carried
back to the full blocks, where every lifted feature is checked: a feature
that only looked common because the mismatch fell in the null space of ``P``
shows a large residual ``max_n ||Y_n w_n - a||^2``.
"""

from dataclasses import dataclass

import numpy as np

from .cobe import CobeConfig, CommonBasis, cobe, loadings_for
from .cobec import CobecConfig, cobec, procrustes_basis
from .errors import DegenerateLift, DimensionMismatch
from .multiblock import make_rng, validate
from .preprocess import preprocess

LIFT_MIN_NORM = 1e-14


@dataclass(frozen=True)
class ProjectionPlan:
    p: np.ndarray

    @property
    def i_p(self):
        return self.p.shape[0]


def make_plan(rows, i_p, seed, max_rank=None):
    """Gaussian ``i_p x rows`` projection with entries N(0, 1/i_p).

    ``max_rank`` (largest block rank) enforces ``max_rank < i_p <= rows``.
    """
    if not 1 <= i_p <= rows:
        raise ValueError(f"projected dimension {i_p} must be in [1, {rows}]")
    if max_rank is not None and i_p <= max_rank:
        raise ValueError(f"projected dimension {i_p} must exceed the largest block rank {max_rank}")
    p = make_rng(seed).standard_normal((i_p, rows)) / np.sqrt(i_p)
    return ProjectionPlan(p)


def project_blocks(data, plan):
    data = validate(data)
    if plan.p.shape[1] != data.shared_rows:
        raise DimensionMismatch(f"plan expects {plan.p.shape[1]} rows, blocks have {data.shared_rows}")
    return validate([plan.p @ y for y in data])


def verify_common(blocks, w_k, a_k, tol):
    """``(residual <= tol, residual)`` with ``residual = max_n ||Y_n w_{n,k} - a_k||^2``."""
    a_k = np.asarray(a_k, dtype=float)
    residual = max(float(np.sum((np.asarray(y) @ w - a_k) ** 2)) for y, w in zip(blocks, w_k))
    return residual <= tol, residual


def lift_common(blocks, w, tol=np.inf):
    """Carry projected-space weights back to the full blocks.

    ``w[n]`` is the ``J_n x c`` weight matrix of block ``n``.  Each feature
    is the block average of ``Y_n w_{n,k}``, scaled to unit norm (the weights
    are rescaled with it); ``residuals`` are the :func:`verify_common`
    values and ``diagnostics["accepted"]`` flags those within ``tol``.  The
    returned ``a_bar`` is the nearest column-orthonormal matrix to the
    unit-norm features.
    """
    data = validate(blocks)
    c = w[0].shape[1]
    if c == 0:
        return CommonBasis(np.zeros((data.shared_rows, 0)), (), tuple(np.zeros((j, 0)) for j in data.cols), (), diagnostics={"accepted": ()})
    feats, scaled, residuals, accepted = [], [], [], []
    for k in range(c):
        cands = [y @ wn[:, k] for y, wn in zip(data, w)]
        mean = sum(cands) / len(cands)
        norm = np.linalg.norm(mean)
        if norm < LIFT_MIN_NORM:
            raise DegenerateLift(f"lifted feature {k} vanishes")
        w_k = [wn[:, k] / norm for wn in w]
        ok, res = verify_common(data, w_k, mean / norm, tol)
        feats.append(mean / norm)
        scaled.append(w_k)
        residuals.append(res)
        accepted.append(ok)
    a_bar = procrustes_basis(np.column_stack(feats))
    loadings = tuple(np.column_stack([scaled[k][n] for k in range(c)]) for n in range(len(data)))
    return CommonBasis(a_bar, tuple(residuals), loadings, (), diagnostics={"accepted": tuple(accepted)})


@dataclass(frozen=True)
class ProjectedRun:
    basis: CommonBasis
    projected: CommonBasis
    plan: ProjectionPlan


def projected_common_basis(data, i_p, rank=None, cfg=None, tol=None, seed=0):
    """Full pipeline: project, clean at ``rank``, extract, lift, verify.

    ``cfg`` is a :class:`CobeConfig` (default) or :class:`CobecConfig`.  The
    verification tolerance defaults to the extraction threshold:
    ``auto_ceiling`` in auto mode, ``epsilon`` otherwise, and no limit for
    COBEc.  Only accepted features are kept in ``basis``.
    """
    data = validate(data)
    cfg = CobeConfig(seed=seed) if cfg is None else cfg
    max_rank = None if rank is None else int(np.max(rank))
    plan = make_plan(data.shared_rows, i_p, seed, max_rank)
    factors = preprocess(project_blocks(data, plan), rank)
    if isinstance(cfg, CobecConfig):
        projected = cobec(factors, cfg)
        default_tol = np.inf
    else:
        projected = cobe(factors, cfg)
        default_tol = cfg.auto_ceiling if cfg.auto_stop and cfg.auto_ceiling is not None else cfg.epsilon
    tol = default_tol if tol is None else tol
    w = [np.zeros((j, projected.c)) for j in data.cols]
    for k in range(projected.c):
        for n, wn in enumerate(loadings_for(factors, projected.a_bar[:, k]).w):
            w[n][:, k] = wn
    lifted = lift_common(data, w, tol)
    keep = np.flatnonzero(lifted.diagnostics.get("accepted", ()))
    if keep.size < lifted.c:
        lifted = lift_common(data, [wn[:, keep] for wn in w], tol)
    return ProjectedRun(lifted, projected, plan)
