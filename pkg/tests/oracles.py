"""Naive reference computations, written independently of the package code."""

import itertools
import math
from collections import Counter

import numpy as np


def orth(a):
    """Orthonormal basis of the column space via Gram-Schmidt (twice)."""
    basis = []
    for col in np.asarray(a, dtype=float).T:
        v = col.copy()
        for _ in range(2):
            for b in basis:
                v = v - (b @ v) * b
        n = np.linalg.norm(v)
        if n > 1e-10 * max(1.0, np.linalg.norm(col)):
            basis.append(v / n)
    return np.array(basis).T if basis else np.zeros((a.shape[0], 0))


def max_angle(a, b):
    """Largest principal angle from the smallest singular value of Qa^T Qb.

    Near zero the arccos is ill-conditioned, so the sine route is used:
    sin(theta_max) = ||(I - Qa Qa^T) Qb||_2.
    """
    qa, qb = orth(a), orth(b)
    if qa.shape[1] != qb.shape[1]:
        return math.pi / 2
    resid = qb - qa @ (qa.T @ qb)
    s = np.linalg.norm(resid, 2) if resid.size else 0.0
    return float(np.arcsin(min(s, 1.0)))


def gap_position(values):
    """Brute-force gap-ratio argmax (1-based), ties to the larger index."""
    best, best_k = -np.inf, None
    for k in range(1, len(values)):
        tail = sum(values[k:]) / (len(values) - k)
        g = (values[k - 1] - values[k]) / (tail + 1e-12)
        if g >= best:
            best, best_k = g, k
    return best_k


def snr_db(signal, noisy):
    noise = noisy - signal
    return 10 * math.log10(float(np.sum(signal**2)) / float(np.sum(noise**2)))


def projector_residual(y, a):
    """Distance from ``a`` to the column space of ``y`` via the explicit projector."""
    p = y @ np.linalg.pinv(y.T @ y) @ y.T
    return float(np.linalg.norm(a - p @ a))


def brute_force_common_vector(q_list, restarts, rng, sweeps=2000):
    """Best ``f = sum ||Q_n Q_n^T a - a||^2`` over random-start power sweeps."""
    best = np.inf
    for _ in range(restarts):
        a = rng.standard_normal(q_list[0].shape[0])
        a /= np.linalg.norm(a)
        for _ in range(sweeps):
            s = sum(q @ (q.T @ a) for q in q_list)
            s /= np.linalg.norm(s)
            if np.linalg.norm(s - a) < 1e-14:
                a = s
                break
            a = s
        f = sum(float(np.sum((q @ (q.T @ a) - a) ** 2)) for q in q_list)
        best = min(best, f)
    return best


def dot_loop(q, a):
    out = np.zeros((q.shape[1], a.shape[1]))
    for i in range(q.shape[1]):
        for j in range(a.shape[1]):
            out[i, j] = sum(q[k, i] * a[k, j] for k in range(q.shape[0]))
    return out


def random_orthonormal(rows, cols, rng):
    return orth(rng.standard_normal((rows, cols)))


def cosine(x, y):
    return float(x @ y / (np.linalg.norm(x) * np.linalg.norm(y)))


def pearson(x, y):
    x = x - x.mean()
    y = y - y.mean()
    return float(x @ y / math.sqrt(float(x @ x) * float(y @ y)))


def accuracy_by_permutation(pred, truth):
    """Accuracy maximized over every relabeling (small label sets only)."""
    pl = sorted(set(pred))
    tl = sorted(set(truth))
    labels = tl + [None] * max(0, len(pl) - len(tl))
    best = 0
    for perm in itertools.permutations(labels, len(pl)):
        m = dict(zip(pl, perm))
        best = max(best, sum(m[p] == t for p, t in zip(pred, truth)))
    return 100.0 * best / len(pred)


def nmi_by_counting(pred, truth):
    n = len(pred)
    cp, ct, cj = Counter(pred), Counter(truth), Counter(zip(pred, truth))
    hp = -sum(v / n * math.log(v / n) for v in cp.values())
    ht = -sum(v / n * math.log(v / n) for v in ct.values())
    mi = sum(v / n * math.log((v / n) / ((cp[p] / n) * (ct[t] / n))) for (p, t), v in cj.items())
    return 100.0 * mi / math.sqrt(hp * ht)


def sir_direct(s, s_hat):
    s = (s - s.mean()) / s.std()
    s_hat = (s_hat - s_hat.mean()) / s_hat.std()
    if pearson(s, s_hat) < 0:
        s_hat = -s_hat
    return 10 * math.log10(float(np.sum(s**2)) / float(np.sum((s - s_hat) ** 2)))


def leading_vector(m, iters=5000):
    """Dominant left singular vector by power iteration on ``m m^T``."""
    v = np.ones(m.shape[0])
    for _ in range(iters):
        v = m @ (m.T @ v)
        v /= np.linalg.norm(v)
    return v


def project_naive(y, f):
    """Projection of ``y`` onto span(f) through the normal equations."""
    coef = np.linalg.solve(f.T @ f, f.T @ y)
    return f @ coef
