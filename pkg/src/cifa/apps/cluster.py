"""Clustering on individual features: split, remove common part, embed, k-means."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..cobe import CobeConfig, cobe
from ..multiblock import make_rng
from ..preprocess import estimate_rank, preprocess
from .metrics import accuracy, nmi


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float


def _plus_plus(x, k, rng):
    n = x.shape[0]
    idx = [int(rng.integers(n))]
    d2 = np.sum((x - x[idx[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            free = np.setdiff1d(np.arange(n), idx)
            nxt = int(rng.choice(free))
        idx.append(nxt)
        d2 = np.minimum(d2, np.sum((x - x[nxt]) ** 2, axis=1))
    return x[idx].copy()


def _assign(x, centers):
    d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(len(x)), labels]


def _fill_empty(x, labels, dist, k):
    """Give every empty cluster the point farthest from its own center,
    taken from a cluster that keeps at least one member."""
    for j in range(k):
        counts = np.bincount(labels, minlength=k)
        if counts[j] > 0:
            continue
        movable = counts[labels] > 1
        i = int(np.flatnonzero(movable)[np.argmax(dist[movable])])
        labels[i] = j
        dist[i] = 0.0
    return labels


def _lloyd(x, centers, max_iter):
    k = centers.shape[0]
    labels = None
    for _ in range(max_iter):
        new, dist = _assign(x, centers)
        new = _fill_empty(x, new, dist, k)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.array([x[labels == j].mean(axis=0) for j in range(k)])
    inertia = float(sum(np.sum((x[labels == j] - centers[j]) ** 2) for j in range(k)))
    return KMeansResult(labels, centers, inertia)


def kmeans(points, k, replicates=20, seed=0, max_iter=300):
    """Lloyd's algorithm from k-means++ starts; the lowest-inertia replicate wins.

    Empty clusters are re-seeded, so every label in ``range(k)`` is used.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if not 1 <= k <= x.shape[0]:
        raise ValueError(f"k={k} must be in [1, {x.shape[0]}]")
    best = None
    for rep in range(replicates):
        res = _lloyd(x, _plus_plus(x, k, make_rng(seed, rep)), max_iter)
        if best is None or res.inertia < best.inertia:
            best = res
    return best


@dataclass(frozen=True)
class ClusterConfig:
    """``K=1`` is accepted and yields a single cluster.

    ``rank`` is the per-block cleaning rank used to find the common part
    (None: the gap-ratio estimate, raised to at least ``c``).
    """

    n_groups: int
    K: int
    c: int = 2
    embed_dim: int = 2
    kmeans_replicates: int = 20
    rank: Optional[int] = None
    remove_common: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.n_groups < 2:
            raise ValueError("n_groups must be >= 2")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.c < 0 or self.embed_dim < 1 or self.kmeans_replicates < 1:
            raise ValueError("c >= 0, embed_dim >= 1 and kmeans_replicates >= 1 required")


def _cleaning_rank(block, cfg):
    if cfg.rank is not None:
        return cfg.rank
    sv = np.linalg.svd(block, compute_uv=False)
    est = estimate_rank(sv).rank if sv.size >= 3 else sv.size
    return min(max(est, cfg.c), sv.size)


def pca_embed(x, dim):
    """Scores of the rows of ``x`` on its top ``dim`` principal axes."""
    x = x - x.mean(axis=0)
    u, s, _ = np.linalg.svd(x, full_matrices=False)
    dim = min(dim, s.size)
    return u[:, :dim] * s[:dim]


def cluster_pipeline(samples, truth=None, cfg=None):
    """Cluster samples (columns of an ``I x T`` matrix, or a list of vectors).

    Samples are first put in a canonical (lexicographic) order so the result
    does not depend on the input order; the seeded split into ``n_groups``
    blocks is applied to that order.  The common part ``A A^T Y_n`` is
    removed, the individual parts are embedded by PCA and clustered.
    Returns ``(labels, report)`` with labels in the caller's sample order.
    """
    x = np.column_stack(samples) if isinstance(samples, (list, tuple)) else np.asarray(samples, dtype=float)
    n_samples = x.shape[1]
    if n_samples < 2 * cfg.K:
        raise ValueError(f"need at least {2 * cfg.K} samples for K={cfg.K}")
    order = np.lexsort(x[::-1])
    xs = x[:, order]
    perm = make_rng(cfg.seed, 0).permutation(n_samples)
    groups = np.array_split(perm, cfg.n_groups)
    blocks = [xs[:, g] for g in groups]

    c = 0
    f_values = ()
    parts = blocks
    if cfg.remove_common and cfg.c > 0:
        factors = preprocess(blocks, [_cleaning_rank(y, cfg) for y in blocks])
        basis = cobe(factors, CobeConfig(epsilon=np.inf, max_components=cfg.c, seed=cfg.seed))
        a = basis.a_bar
        c = basis.c
        f_values = basis.residuals
        parts = [y - a @ (a.T @ y) for y in blocks]

    embedded = np.empty((n_samples, cfg.embed_dim))
    emb = pca_embed(np.hstack(parts).T, cfg.embed_dim)
    embedded[:, : emb.shape[1]] = emb
    embedded[:, emb.shape[1]:] = 0.0
    km = kmeans(embedded, cfg.K, cfg.kmeans_replicates, seed=cfg.seed)

    sorted_pos = np.concatenate(groups)
    labels_sorted = np.empty(n_samples, dtype=int)
    labels_sorted[sorted_pos] = km.labels
    labels = np.empty(n_samples, dtype=int)
    labels[order] = labels_sorted
    coords_sorted = np.empty_like(embedded)
    coords_sorted[sorted_pos] = embedded
    coords = np.empty_like(embedded)
    coords[order] = coords_sorted

    report = {"c_removed": c, "common_residuals": tuple(f_values), "inertia": km.inertia, "embedding": coords}
    if truth is not None:
        report["accuracy"] = accuracy(labels, truth)
        report["nmi"] = nmi(labels, truth)
    return labels, report
