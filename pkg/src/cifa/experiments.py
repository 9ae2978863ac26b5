"""Synthetic scenarios and single-run benchmarks shared by the CLI, scripts and tests.

Every runner takes a seed and returns plain dicts of numbers; timings are
kept under a separate ``"time"`` key so the metric part is reproducible.
"""

import time

import numpy as np
from scipy.optimize import linear_sum_assignment

from .apps.classify import classify, train_classifier
from .apps.cluster import ClusterConfig, cluster_pipeline
from .apps.metrics import match_sources
from .cobe import CobeConfig, cobe
from .cobec import CobecConfig, cobec
from .features import AmuseSeparator, cnfe, cnfe_relative_error, linked_bss, split
from .linalg import principal_angles
from .multiblock import SyntheticSpec, generate_synthetic, linked_bss_scenario, make_rng, validate
from .preprocess import detect_common_count, preprocess
from .scaling import projected_common_basis

METHODS = ("COBE", "COBEc", "PCA")


def _timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


def stacked_pca_basis(data, c):
    """Top ``c`` left singular vectors of all blocks side by side."""
    u, _, _ = np.linalg.svd(np.hstack(list(data)), full_matrices=False)
    return u[:, :c]


def linked_bss_run(seed, snr_db=20.0, I=1000, rank=10, n_common=4, separator=None):
    """SIR of each shared source after COBE, COBEc or stacked PCA, then separation."""
    separator = AmuseSeparator() if separator is None else separator
    sc = linked_bss_scenario(I=I, n_common=n_common, snr_db=snr_db, seed=seed)
    factors, t_pre = _timed(preprocess, sc.data, rank)
    bases = {}
    times = {}
    bases["COBE"], times["COBE"] = _timed(lambda: cobe(factors, CobeConfig(epsilon=np.inf, max_components=n_common, seed=seed)).a_bar)
    bases["COBEc"], times["COBEc"] = _timed(lambda: cobec(factors, CobecConfig(c=n_common, seed=seed)).a_bar)
    bases["PCA"], times["PCA"] = _timed(stacked_pca_basis, sc.data, n_common)
    times["COBE"] += t_pre
    times["COBEc"] += t_pre
    sir = {m: match_sources(sc.sources, linked_bss(a, separator)) for m, a in bases.items()}
    return {"sir": sir, "time": times}


def gap_run(seed, snr_db, I=1000, rank=10, n_common=4):
    """Normalized candidate residuals ``f_i / N`` and the detected common count."""
    sc = linked_bss_scenario(I=I, n_common=n_common, snr_db=snr_db, seed=seed)
    factors = preprocess(sc.data, rank)
    basis = cobe(factors, CobeConfig(auto_stop=True, seed=seed))
    f = np.asarray(basis.candidate_residuals) / sc.data.n_blocks
    return {"f": f, "detected": detect_common_count(basis.candidate_residuals, sc.data.n_blocks)}


def projection_fixture(seed, I=5000, n_blocks=5, J=30, c=3, R=8, snr_db=20.0):
    return generate_synthetic(SyntheticSpec(I=I, J=[J] * n_blocks, c=c, R=[R] * n_blocks, snr_db=snr_db, seed=seed))


def span_correlations(a, b):
    """Canonical correlations (cosines of principal angles) between two spans."""
    if a.shape[1] != b.shape[1]:
        return np.zeros(max(a.shape[1], b.shape[1]))
    return np.cos(principal_angles(a, b))


def projection_run(seed, i_p_values=(50, 100, 200), rank=8, auto_ceiling=0.5):
    """Compare the lifted common basis at each ``I_P`` with the unprojected one."""
    data, _ = projection_fixture(seed)
    cfg = CobeConfig(auto_stop=True, auto_ceiling=auto_ceiling, seed=seed)
    full, t_full = _timed(lambda: cobe(preprocess(data, rank), cfg))
    out = {"c_full": full.c, "corr": {}, "c": {}, "time": {"full": t_full}}
    for i_p in i_p_values:
        run, t = _timed(projected_common_basis, data, i_p, rank, cfg, None, seed)
        out["corr"][i_p] = span_correlations(run.basis.a_bar, full.a_bar)
        out["c"][i_p] = run.basis.c
        out["time"][i_p] = t
    return out


def xray_sources(size=32):
    """Two nonnegative overlaid images: a soft blob and a periodic rib pattern.

    Each image has pixels where the other is exactly zero, which makes the
    nonnegative factorization identifiable up to scaling and order.
    """
    y, x = np.mgrid[0:size, 0:size] / (size - 1)
    tissue = np.clip(np.exp(-((x - 0.5) ** 2 + (y - 0.55) ** 2) / (2 * 0.22**2)) - 0.2, 0, None)
    ribs = np.clip(np.sin(2 * np.pi * (5 * y + 0.3 * x)), 0, None) * (0.3 + x * (1 - x))
    return np.column_stack([tissue.ravel(), ribs.ravel()])


def xray_scenario(seed, size=32, n_blocks=4, J=20, n_individual=8):
    """Blocks ``S C_n^T + U_n D_n^T`` sharing the nonnegative images ``S``.

    ``C_n`` is uniform(0, 1) with its first rows set to the identity (one
    pure observation per image); ``U_n`` is Gaussian and orthogonal to ``S``.
    """
    s = xray_sources(size)
    qs = np.linalg.qr(s)[0]
    blocks = []
    for n in range(n_blocks):
        rng = make_rng(seed, 3, n)
        u = rng.standard_normal((s.shape[0], n_individual))
        u -= qs @ (qs.T @ u)
        mix = rng.uniform(size=(J, s.shape[1]))
        mix[: s.shape[1]] = np.eye(s.shape[1])
        blocks.append(s @ mix.T + u @ rng.standard_normal((J, n_individual)).T)
    return validate(blocks), s


def nonnegative_recovery_error(f, s):
    """Relative error of ``f`` against ``s`` after best column matching and scaling."""
    fn = f / np.maximum(np.linalg.norm(f, axis=0), 1e-300)
    sn = s / np.linalg.norm(s, axis=0)
    rows, cols = linear_sum_assignment(-np.abs(sn.T @ fn))
    matched = np.empty_like(s)
    for i, j in zip(rows, cols):
        col = f[:, j]
        matched[:, i] = col * (col @ s[:, i]) / max(col @ col, 1e-300)
    return float(np.linalg.norm(matched - s) / np.linalg.norm(s))


def cnfe_run(seed, nonnegative_mixing=False, rank=10, epsilon=1e-8, max_iter=2000):
    data, s = xray_scenario(seed)
    factors = preprocess(data, rank)
    basis = cobe(factors, CobeConfig(epsilon=epsilon, seed=seed))
    decomp = split(factors, basis)
    res = cnfe(decomp, s.shape[1], max_iter=max_iter, seed=seed, nonnegative_mixing=nonnegative_mixing)
    trace = np.asarray(res.objective_trace)
    return {
        "c": basis.c,
        "rel_error": cnfe_relative_error(decomp, res),
        "source_error": nonnegative_recovery_error(res.f_bar, s),
        "min_entry": float(res.f_bar.min()),
        "max_increase": float(np.max(np.diff(trace), initial=0.0)),
        "iterations": res.iterations,
        "final_objective": float(trace[-1]),
    }


def clustering_scenario(seed, I=100, K=3, per_cluster=40, n_common=2, common_sd=10.0, separation=4.0, noise=0.3):
    """Samples ``C alpha_t + mu_k + noise``: a dominant shared part plus cluster signatures."""
    rng = make_rng(seed, 4)
    q, _ = np.linalg.qr(rng.standard_normal((I, n_common + K)))
    common = q[:, :n_common]
    centers = separation * q[:, n_common:]
    labels = np.repeat(np.arange(K), per_cluster)
    alpha = common_sd * rng.standard_normal((n_common, labels.size))
    x = common @ alpha + centers[:, labels] + noise * rng.standard_normal((I, labels.size))
    return x, labels


def clustering_run(seed, c_values=(0, 2, 3), n_groups=3, **scenario):
    """Accuracy and NMI of the clustering pipeline for each number of removed components."""
    x, truth = clustering_scenario(seed, **scenario)
    k = int(truth.max()) + 1
    out = {}
    for c in c_values:
        _, rep = cluster_pipeline(x, truth, ClusterConfig(n_groups=n_groups, K=k, c=c, seed=seed))
        out[c] = {"accuracy": rep["accuracy"], "nmi": rep["nmi"]}
    return out


def classification_scenario(seed, I=100, n_classes=2, per_class=20, rank=3, noise=0.9, mean_scale=3.0):
    """Each class: a random mean plus a class-specific rank-``rank`` subspace plus noise."""
    rng = make_rng(seed, 5)
    classes = {}
    for k in range(n_classes):
        u = np.linalg.qr(rng.standard_normal((I, rank)))[0]
        mu = mean_scale * rng.standard_normal(I) / np.sqrt(I)
        coef = rng.standard_normal((rank, per_class))
        classes[k] = mu[:, None] + u @ coef + noise * rng.standard_normal((I, per_class)) / np.sqrt(I)
    return classes


def train_test_split(classes, train_fraction, seed):
    rng = make_rng(seed, 6)
    train, test = {}, []
    for k, x in classes.items():
        perm = rng.permutation(x.shape[1])
        n_train = max(4, int(round(train_fraction * x.shape[1])))
        train[k] = x[:, perm[:n_train]]
        test.extend((x[:, i], k) for i in perm[n_train:])
    return train, test


def classification_run(seed, train_fraction=0.5, c_fraction=0.8, method="correlation", classes=None):
    classes = classification_scenario(seed) if classes is None else classes
    train, test = train_test_split(classes, train_fraction, seed)
    model = train_classifier(train, c_fraction, method, seed)
    per_class = {k: [] for k in classes}
    for y, k in test:
        per_class[k].append(classify(y, model) == k)
    hits = [h for v in per_class.values() for h in v]
    return {
        "accuracy": 100.0 * float(np.mean(hits)) if hits else float("nan"),
        "per_class": {k: 100.0 * float(np.mean(v)) if v else float("nan") for k, v in per_class.items()},
    }
