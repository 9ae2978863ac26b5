"""Per-block rank reduction, orthonormalization and gap-based count detection."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import RankTooLarge, TooShort, ZeroMatrix
from .multiblock import check_block

RANK_REL_TOL = 1e-10
GAP_FLOOR = 1e-12
# best gap smaller than the mean of the values past it
LOW_CONFIDENCE_SCORE = 1.0


@dataclass(frozen=True)
class OrthoFactor:
    """``block ~= q @ r_factor`` with ``q`` column-orthonormal."""

    q: np.ndarray
    r_factor: np.ndarray

    @property
    def rank(self):
        return self.q.shape[1]

    @property
    def cleaned(self):
        return self.q @ self.r_factor


@dataclass(frozen=True)
class RankEstimate:
    rank: int
    gap_scores: tuple
    method: str = "gap-ratio"
    low_confidence: bool = False


def reduce_rank(block, r):
    """Best rank-``r`` Frobenius approximation ``left @ right.T`` (truncated SVD).

    ``left`` has orthonormal columns; ``right`` carries the singular values.
    """
    block = check_block(block)
    if not 1 <= r <= min(block.shape):
        raise RankTooLarge(f"rank {r} outside [1, {min(block.shape)}] for a {block.shape} block")
    u, s, vt = np.linalg.svd(block, full_matrices=False)
    return u[:, :r], vt[:r].T * s[:r]


def orthonormalize(block, r=None):
    """Factor a block as ``q @ r_factor`` with orthonormal ``q``.

    With ``r`` given this is the rank-``r`` truncated SVD (the "cleaned"
    block).  Otherwise singular values below ``1e-10 * sigma_max`` are
    dropped, which reveals the numerical rank.
    """
    block = check_block(block)
    u, s, vt = np.linalg.svd(block, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise ZeroMatrix("all singular values are zero")
    if r is None:
        r = int(np.count_nonzero(s > RANK_REL_TOL * s[0]))
    elif not 1 <= r <= s.size:
        raise RankTooLarge(f"rank {r} outside [1, {s.size}] for a {block.shape} block")
    return OrthoFactor(q=u[:, :r], r_factor=s[:r, None] * vt[:r])


def preprocess(data, ranks=None):
    """Orthonormalize every block; ``ranks`` is None, an int or one int per block."""
    if ranks is None or np.isscalar(ranks):
        ranks = [ranks] * len(data)
    return [orthonormalize(y, r) for y, r in zip(data, ranks)]


def gap_ratios(values):
    """``g_k = (v_k - v_{k+1}) / (mean(v_{k+1:}) + floor)`` for k = 1 .. L-1."""
    v = np.asarray(values, dtype=float)
    tails = np.cumsum(v[::-1])[::-1][1:] / np.arange(len(v) - 1, 0, -1)
    return (v[:-1] - v[1:]) / (tails + GAP_FLOOR)


def _last_argmax(x):
    return int(np.flatnonzero(x == x.max())[-1])


def estimate_rank(singular_values, fixed=None):
    """Number of dominant components from a descending spectrum.

    Returns the ``k`` maximizing the gap ratio (ties go to the larger ``k``).
    ``low_confidence`` is set when the best gap is smaller than the mean of
    the values after it, e.g. for a flat spectrum.  Passing ``fixed``
    short-circuits the choice but still reports the scores.
    """
    sv = np.asarray(singular_values, dtype=float)
    if sv.ndim != 1 or sv.size < 3:
        raise TooShort("need at least 3 singular values")
    if np.any(sv < 0) or np.any(np.diff(sv) > 1e-12 * max(sv[0], 1.0)):
        raise ValueError("singular values must be non-negative and non-increasing")
    scores = gap_ratios(sv)
    k = _last_argmax(scores) + 1
    low = bool(scores.max() < LOW_CONFIDENCE_SCORE)
    if fixed is not None:
        return RankEstimate(int(fixed), tuple(scores.tolist()), "fixed", low)
    return RankEstimate(k, tuple(scores.tolist()), "gap-ratio", low)


def detect_common_count(f_values, n_blocks, epsilon=None):
    """Number of common components from the extraction residuals ``f_i``.

    The values are normalized to ``f_i / N``.  If ``epsilon`` is given, a
    first value above it means no common component (0) and all values at or
    below it means every candidate is common.  Otherwise the break is the gap
    ratio of :func:`estimate_rank` applied to the reversed (descending)
    sequence, so the denominator is the mean of the small, common-side values.
    """
    f = np.asarray(f_values, dtype=float) / n_blocks
    if f.size == 0:
        return 0
    if epsilon is not None:
        if f[0] > epsilon:
            return 0
        if np.all(f <= epsilon):
            return int(f.size)
    if f.size == 1:
        return 1
    scores = gap_ratios(f[::-1])
    return int(f.size - (_last_argmax(scores) + 1))
