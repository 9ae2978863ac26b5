"""Common/individual space splitting and feature extraction on each part."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cobe import CommonBasis, as_factors
from .errors import SeparatorFailure
from .multiblock import make_rng

DENOM_FLOOR = 1e-12


@dataclass(frozen=True)
class CifaDecomposition:
    """Per-block split ``Y_n = A_bar B_bar_n^T + Y_ind_n``.

    ``individual_basis[n] @ individual_coeffs[n].T`` is the rank
    ``r_n - c`` truncated SVD of ``individual_space[n]``.
    """

    common_basis: np.ndarray
    common_coeffs: tuple
    common_space: tuple
    individual_space: tuple
    individual_basis: tuple
    individual_coeffs: tuple
    cleaned: tuple
    empty_individual: tuple

    @property
    def c(self):
        return self.common_basis.shape[1]


def split(blocks, a_bar):
    """Split cleaned blocks into common and individual spaces.

    Blocks whose rank equals ``c`` get an empty individual basis; they are
    listed in ``empty_individual`` rather than raising.
    """
    factors = as_factors(blocks)
    a = a_bar.a_bar if isinstance(a_bar, CommonBasis) else np.asarray(a_bar, dtype=float)
    c = a.shape[1]
    if c > min(f.rank for f in factors):
        raise ValueError(f"{c} common columns exceed the smallest block rank")
    coeffs, commons, indiv, bases, icoeffs, cleaned, empty = [], [], [], [], [], [], []
    for n, fac in enumerate(factors):
        y = fac.cleaned
        b = y.T @ a
        common = a @ b.T
        resid = y - common
        k = fac.rank - c
        if k > 0:
            u, s, vt = np.linalg.svd(resid, full_matrices=False)
            bases.append(u[:, :k])
            icoeffs.append(vt[:k].T * s[:k])
        else:
            bases.append(np.zeros((y.shape[0], 0)))
            icoeffs.append(np.zeros((y.shape[1], 0)))
            empty.append(n)
        coeffs.append(b)
        commons.append(common)
        indiv.append(resid)
        cleaned.append(y)
    return CifaDecomposition(a, tuple(coeffs), tuple(commons), tuple(indiv), tuple(bases), tuple(icoeffs), tuple(cleaned), tuple(empty))


@dataclass(frozen=True)
class AmuseSeparator:
    """Second-order separator: whiten, then diagonalize one lagged covariance.

    Rows are samples (time), columns are mixtures.  Sources are identifiable
    only if their normalized autocorrelations at ``lag`` differ; eigenvalues
    closer than ``gap_tol`` raise :class:`SeparatorFailure`.
    """

    lag: int = 1
    gap_tol: float = 1e-6

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        t, c = x.shape
        if self.lag < 1 or self.lag >= t:
            raise SeparatorFailure(f"lag {self.lag} invalid for {t} samples")
        x = x - x.mean(axis=0)
        u, s, _ = np.linalg.svd(x, full_matrices=False)
        if s[-1] <= 1e-12 * s[0]:
            raise SeparatorFailure("mixtures are linearly dependent")
        white = u * np.sqrt(t)
        lagged = white[self.lag:].T @ white[:-self.lag] / (t - self.lag)
        evals, rot = np.linalg.eigh((lagged + lagged.T) / 2)
        if c > 1 and np.min(np.diff(evals)) < self.gap_tol:
            raise SeparatorFailure(f"lagged-covariance eigenvalues too close: {evals}")
        return white @ rot[:, ::-1]


def linked_bss(a_bar, separator: Callable = AmuseSeparator()):
    """Separate the common basis into latent sources (up to order and scale)."""
    a = a_bar.a_bar if isinstance(a_bar, CommonBasis) else np.asarray(a_bar, dtype=float)
    if a.shape[1] <= 1:
        return a.copy()
    out = separator(a)
    if out.shape != a.shape:
        raise SeparatorFailure(f"separator returned shape {out.shape}, expected {a.shape}")
    return out


@dataclass(frozen=True)
class NonnegativeCommonFeatures:
    f_bar: np.ndarray
    m_bars: tuple
    objective_trace: tuple
    iterations: int


def cnfe_objective(a_bar, b_bars, f_bar, m_bars):
    """``sum_n ||F M_n^T - A B_n^T||_F^2`` evaluated without forming ``I x J_n`` products."""
    af = a_bar.T @ f_bar
    ff = f_bar.T @ f_bar
    total = 0.0
    for b, m in zip(b_bars, m_bars):
        total += np.sum(b * b) - 2.0 * np.sum(af * (b.T @ m)) + np.sum(ff * (m.T @ m))
    return float(max(total, 0.0))


def cnfe_relative_error(decomp, result):
    """``sqrt(sum_n ||F M_n^T - A B_n^T||^2 / sum_n ||A B_n^T||^2)``."""
    ref = sum(float(np.sum(b * b)) for b in decomp.common_coeffs)
    err = cnfe_objective(decomp.common_basis, decomp.common_coeffs, result.f_bar, result.m_bars)
    return float(np.sqrt(err / ref)) if ref > 0 else float(np.sqrt(err))


def _pos(x):
    return np.maximum(x, 0.0)


def cnfe(decomp, r, max_iter=2000, seed=0, nonnegative_mixing=False, tol=1e-9):
    """Nonnegative common features ``F >= 0`` with ``F M_n^T ~= A_bar B_bar_n^T``.

    Default (semi) mode keeps only ``F`` nonnegative: each column of ``F``
    gets its exact nonnegative least-squares update in turn (HALS) and each
    ``M_n`` its exact least-squares value, so the objective never increases.
    ``nonnegative_mixing=True`` runs the multiplicative rules

        F   <- F   * [A sum_n(B_n^T M_n)]_+ / (F sum_n M_n^T M_n)
        M_n <- M_n * [B_n (A^T F)]_+       / (M_n F^T F)

    with denominators floored at 1e-12.  Both start from seeded
    uniform(0, 1) factors and stop after ``max_iter`` cycles or when the
    relative objective change falls below ``tol``.
    """
    a = decomp.common_basis
    b_bars = decomp.common_coeffs
    if r < 1 or r > a.shape[1]:
        raise ValueError(f"r must be in [1, c={a.shape[1]}]")
    rng = make_rng(seed)
    f = rng.uniform(size=(a.shape[0], r))
    m_bars = [rng.uniform(size=(b.shape[0], r)) for b in b_bars]
    trace = [cnfe_objective(a, b_bars, f, m_bars)]
    it = 0
    for it in range(1, max_iter + 1):
        g = a @ sum(b.T @ m for b, m in zip(b_bars, m_bars))
        h = sum(m.T @ m for m in m_bars)
        if nonnegative_mixing:
            f = f * _pos(g) / np.maximum(f @ h, DENOM_FLOOR)
            af = a.T @ f
            ff = f.T @ f
            m_bars = [m * _pos(b @ af) / np.maximum(m @ ff, DENOM_FLOOR) for b, m in zip(b_bars, m_bars)]
        else:
            for k in range(r):
                if h[k, k] > DENOM_FLOOR:
                    f[:, k] = _pos(f[:, k] + (g[:, k] - f @ h[:, k]) / h[k, k])
            af = a.T @ f
            inv = np.linalg.pinv(f.T @ f)
            m_bars = [b @ af @ inv for b in b_bars]
        trace.append(cnfe_objective(a, b_bars, f, m_bars))
        if abs(trace[-2] - trace[-1]) <= tol * trace[-2]:
            break
    return NonnegativeCommonFeatures(f, tuple(m_bars), tuple(trace), it)
