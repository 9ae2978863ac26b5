"""Sequential common orthogonal basis extraction (number of common components unknown).

Each component is found by alternating least squares on

    min_{a, z_n}  sum_n ||Q_n z_n - a||^2   s.t. ||a|| = 1,

where ``Q_n`` are the orthonormal factors of the cleaned blocks; after a
component is accepted every ``Q_n`` is deflated by the unit direction of its
loading ``z_n`` and the next component is sought in what remains.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateSum
from .linalg import column_signs
from .multiblock import make_rng
from .preprocess import OrthoFactor, detect_common_count, preprocess

MAX_RESTARTS = 5
DEGENERATE_NORM = 1e-14


@dataclass(frozen=True)
class CobeConfig:
    """Settings for :func:`cobe`.

    ``epsilon`` is compared against ``f_k / N`` (mean per-block residual),
    which lies in [0, 1] and does not grow with the block count.  With
    ``auto_stop`` the count is picked by :func:`detect_common_count` over all
    candidates instead; ``auto_ceiling`` (optional) then rejects a detected
    prefix whose first value is above it.
    """

    epsilon: float = 1e-6
    max_components: Optional[int] = None
    inner_max_iter: int = 200
    inner_tol: float = 1e-10
    auto_stop: bool = False
    auto_ceiling: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.inner_tol <= 0:
            raise ValueError("inner_tol must be > 0")


@dataclass(frozen=True)
class CommonBasis:
    """Extracted common basis.

    ``loadings[n]`` is the ``r_n x c`` matrix whose column ``k`` is
    ``z_{n,k}``, so ``Q_n @ loadings[n] ~= a_bar``.  ``candidate_residuals``
    keeps every ``f`` value computed, including rejected candidates.
    """

    a_bar: np.ndarray
    residuals: tuple
    loadings: tuple
    iterations: tuple
    candidate_residuals: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def c(self):
        return self.a_bar.shape[1]


@dataclass(frozen=True)
class Extraction:
    a: np.ndarray
    z: list
    f: float
    iters: int
    objective_trace: tuple


@dataclass(frozen=True)
class ComponentLoadings:
    w: tuple
    residuals: tuple


class _Stacked:
    """The factors side by side, so one sweep is two matrix products."""

    def __init__(self, q_list):
        self.q = np.hstack(q_list)
        self.offsets = np.cumsum([0] + [q.shape[1] for q in q_list])[:-1]
        self.n = len(q_list)
        self.owner = np.repeat(np.arange(self.n), [q.shape[1] for q in q_list])

    def split(self, z_all):
        return np.split(z_all, self.offsets[1:])

    def objective(self, z_all, a):
        z_mat = np.zeros((self.q.shape[1], self.n))
        z_mat[np.arange(self.q.shape[1]), self.owner] = z_all
        return float(np.sum((self.q @ z_mat - a[:, None]) ** 2))


def _start(stack, rng):
    for _ in range(MAX_RESTARTS + 1):
        v = rng.standard_normal(stack.q.shape[1])
        for part in stack.split(v):
            part /= np.linalg.norm(part)
        s = stack.q @ v
        norm = np.linalg.norm(s)
        if norm >= DEGENERATE_NORM:
            return s / norm
    raise DegenerateSum(f"sum of Q_n z_n stayed below {DEGENERATE_NORM} after {MAX_RESTARTS} restarts")


def extract_component(q_list, cfg=CobeConfig(), rng=None, record_trace=False):
    """Find one common unit vector of the (possibly deflated) factors ``q_list``.

    Alternates ``a <- normalize(sum_n Q_n z_n)`` and ``z_n <- Q_n^T a`` until
    ``||a_new - a_old|| < inner_tol`` (after sign alignment) or
    ``inner_max_iter`` sweeps.  With ``record_trace`` the objective after
    every ``z`` update is kept in ``objective_trace``; the final value is
    always its last entry.
    """
    if any(q.shape[1] < 1 for q in q_list):
        raise ValueError("every factor needs at least one column")
    rng = make_rng(cfg.seed) if rng is None else rng
    stack = _Stacked(q_list)
    a = _start(stack, rng)
    trace = []
    iters = 0
    for iters in range(1, cfg.inner_max_iter + 1):
        z_all = stack.q.T @ a
        if record_trace:
            trace.append(stack.objective(z_all, a))
        s = stack.q @ z_all
        norm = np.linalg.norm(s)
        if norm < DEGENERATE_NORM:
            a = _start(stack, rng)
            continue
        a_new = s / norm
        if a_new @ a < 0:
            a_new = -a_new
        change = np.linalg.norm(a_new - a)
        a = a_new
        if change < cfg.inner_tol:
            break
    z_all = stack.q.T @ a
    f = stack.objective(z_all, a)
    trace.append(f)
    return Extraction(a=a, z=stack.split(z_all), f=f, iters=iters, objective_trace=tuple(trace))


def deflate(q, z):
    """Remove the direction ``Q z`` from ``Q``: ``Q (I - u u^T)`` with ``u = z / ||z||``.

    ``z = 0`` leaves ``Q`` unchanged.
    """
    norm = np.linalg.norm(z)
    if norm == 0:
        return np.array(q, copy=True)
    u = z / norm
    return q - np.outer(q @ u, u)


def as_factors(blocks):
    """Pass :class:`OrthoFactor` lists through; orthonormalize anything else."""
    blocks = list(blocks)
    if all(isinstance(b, OrthoFactor) for b in blocks):
        return blocks
    return preprocess(blocks)


def cobe(blocks, cfg=CobeConfig()):
    """Extract common orthogonal basis vectors one at a time.

    ``blocks`` is a list of :class:`OrthoFactor` or raw matrices (then
    orthonormalized at their numerical rank).  At most
    ``min(max_components, min_n r_n)`` candidates are tried.  In fixed mode
    extraction stops at the first candidate with ``f/N > epsilon``; in auto
    mode every candidate is extracted and the count is cut at the detected gap.
    """
    factors = as_factors(blocks)
    n_blocks = len(factors)
    q_list = [fac.q for fac in factors]
    limit = min(fac.rank for fac in factors)
    if cfg.max_components is not None:
        limit = min(limit, cfg.max_components)
    rng = make_rng(cfg.seed)

    found = []
    candidates = []
    for _ in range(limit):
        ext = extract_component(q_list, cfg, rng)
        candidates.append(ext.f)
        if not cfg.auto_stop and ext.f / n_blocks > cfg.epsilon:
            break
        found.append(ext)
        q_list = [deflate(q, zn) for q, zn in zip(q_list, ext.z)]

    if cfg.auto_stop:
        c = detect_common_count(candidates, n_blocks, cfg.auto_ceiling)
        found = found[:c]

    diagnostics = {
        "mode": "auto" if cfg.auto_stop else "fixed",
        "candidate_limit": limit,
        "exhausted": len(found) == min(fac.rank for fac in factors),
    }
    return _assemble(found, factors, candidates, diagnostics)


def _assemble(found, factors, candidates, diagnostics):
    rows = factors[0].q.shape[0]
    if not found:
        return CommonBasis(
            a_bar=np.zeros((rows, 0)),
            residuals=(),
            loadings=tuple(np.zeros((fac.rank, 0)) for fac in factors),
            iterations=(),
            candidate_residuals=tuple(candidates),
            diagnostics=diagnostics,
        )
    a_bar = np.column_stack([e.a for e in found])
    signs = column_signs(a_bar)
    loadings = tuple(np.column_stack([e.z[n] for e in found]) * signs for n in range(len(factors)))
    return CommonBasis(
        a_bar=a_bar * signs,
        residuals=tuple(e.f for e in found),
        loadings=loadings,
        iterations=tuple(e.iters for e in found),
        candidate_residuals=tuple(candidates),
        diagnostics=diagnostics,
    )


def loadings_for(blocks, a):
    """Least-squares weights ``w_n = argmin ||Y_n w - a||`` for each block."""
    a = np.asarray(a, dtype=float)
    ws, res = [], []
    for y in blocks:
        y = y.cleaned if isinstance(y, OrthoFactor) else np.asarray(y, dtype=float)
        w = np.linalg.lstsq(y, a, rcond=None)[0]
        ws.append(w)
        res.append(float(np.linalg.norm(y @ w - a)))
    return ComponentLoadings(w=tuple(ws), residuals=tuple(res))
