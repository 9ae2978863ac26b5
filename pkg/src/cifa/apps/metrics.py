"""Evaluation metrics: signal-to-interference ratio, clustering accuracy and NMI."""

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..errors import LengthMismatch, ZeroVariance

SIR_CAP_DB = 300.0


def _standardize(x):
    x = np.asarray(x, dtype=float)
    x = x - x.mean()
    sd = x.std()
    if x.size < 2 or sd == 0:
        raise ZeroVariance("signal has zero variance")
    return x / sd


def sir(s, s_hat):
    """SIR in dB between a true signal and its estimate.

    Both are standardized to zero mean and unit variance and the estimate's
    sign is aligned with the truth.  Perfect recovery is reported as
    ``SIR_CAP_DB`` instead of infinity.
    """
    s = _standardize(s)
    s_hat = _standardize(s_hat)
    if len(s) != len(s_hat):
        raise LengthMismatch(f"{len(s)} vs {len(s_hat)} samples")
    if s @ s_hat < 0:
        s_hat = -s_hat
    err = np.sum((s - s_hat) ** 2)
    if err == 0:
        return SIR_CAP_DB
    return float(min(10 * np.log10(np.sum(s**2) / err), SIR_CAP_DB))


def match_sources(sources, estimates):
    """Pair each true source (column) with one estimate by maximal |corr|.

    Returns the per-source SIR in the order of ``sources``.
    """
    k = sources.shape[1]
    corr = np.abs(np.corrcoef(sources.T, estimates.T)[:k, k:])
    rows, cols = linear_sum_assignment(-corr)
    return np.array([sir(sources[:, i], estimates[:, j]) for i, j in zip(rows, cols)])


def _check_lengths(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise LengthMismatch(f"{pred.shape} vs {truth.shape}")
    return pred, truth


def contingency(pred, truth):
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    table = np.zeros((p.max() + 1, t.max() + 1), dtype=np.int64)
    np.add.at(table, (p, t), 1)
    return table


def accuracy(pred, truth):
    """Percentage of samples correct under the best one-to-one relabeling."""
    pred, truth = _check_lengths(pred, truth)
    if pred.size == 0:
        return 100.0
    table = contingency(pred, truth)
    rows, cols = linear_sum_assignment(-table)
    return 100.0 * table[rows, cols].sum() / pred.size


def nmi(pred, truth, with_flag=False):
    """Normalized mutual information in percent (natural log, geometric mean).

    If either labeling has a single cluster the score is 0; with
    ``with_flag=True`` the return value is ``(score, degenerate)``.
    """
    pred, truth = _check_lengths(pred, truth)
    table = contingency(pred, truth).astype(float)
    n = table.sum()
    pxy = table / n
    px = pxy.sum(axis=1)
    py = pxy.sum(axis=0)
    # decided on counts: a lone cluster's entropy is only zero up to round-off
    degenerate = min(table.shape) < 2
    hx = -np.sum(px * np.log(px))
    hy = -np.sum(py * np.log(py))
    if degenerate:
        score = 0.0
    else:
        nz = pxy > 0
        mi = np.sum(pxy[nz] * np.log(pxy[nz] / np.outer(px, py)[nz]))
        score = float(100.0 * max(mi, 0.0) / np.sqrt(hx * hy))
    return (score, degenerate) if with_flag else score
