"""Classification by matching a sample against per-class common features."""

from dataclasses import dataclass, field

import numpy as np

from ..cobec import CobecConfig, cobec
from ..errors import TooFewSamples
from ..multiblock import make_rng
from ..preprocess import preprocess

METHODS = ("correlation", "euclidean")
TIE_TOL = 1e-12


@dataclass(frozen=True)
class ClassModel:
    labels: tuple
    features: tuple
    match_method: str = "correlation"
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.match_method not in METHODS:
            raise ValueError(f"match_method must be one of {METHODS}")
        if len(self.labels) != len(self.features) or not self.labels:
            raise ValueError("need one feature matrix per label and at least one class")


def _as_columns(samples):
    if isinstance(samples, np.ndarray) and samples.ndim == 2:
        return np.asarray(samples, dtype=float)
    return np.column_stack([np.asarray(s, dtype=float) for s in samples])


def class_features(x, c_fraction=0.8, seed=0):
    """Common basis of two random halves of one class's samples (columns of ``x``)."""
    n = x.shape[1]
    if n < 4:
        raise TooFewSamples(f"{n} samples; need at least 4")
    perm = make_rng(seed).permutation(n)
    halves = [x[:, perm[: n // 2]], x[:, perm[n // 2:]]]
    factors = preprocess(halves)
    c = int(np.floor(min(h.shape[1] for h in halves) * c_fraction))
    c = max(1, min(c, min(f.rank for f in factors)))
    return cobec(factors, CobecConfig(c=c, seed=seed)).a_bar


def train_classifier(classes, c_fraction=0.8, match_method="correlation", seed=0):
    """``classes`` maps label -> samples (``I x T`` matrix or list of vectors)."""
    labels = tuple(classes)
    feats = tuple(class_features(_as_columns(classes[k]), c_fraction, make_rng(seed, i).integers(2**63)) for i, k in enumerate(labels))
    return ClassModel(labels, feats, match_method, {"c": tuple(f.shape[1] for f in feats)})


def match_score(y, f_k, method="correlation"):
    """Correlation: ``||proj(y)|| / ||y||``; euclidean: ``-||y - proj(y)||``."""
    y = np.asarray(y, dtype=float)
    coef = np.linalg.lstsq(f_k, y, rcond=None)[0]
    proj = f_k @ coef
    if method == "correlation":
        return float(min(np.linalg.norm(proj) / np.linalg.norm(y), 1.0))
    if method == "euclidean":
        return float(-np.linalg.norm(y - proj))
    raise ValueError(f"unknown method {method!r}")


def classify(y, model, return_tie=False):
    """Label with the highest match score; ties go to the earliest label."""
    scores = np.array([match_score(y, f, model.match_method) for f in model.features])
    best = scores.max()
    winners = np.flatnonzero(scores >= best - TIE_TOL * max(1.0, abs(best)))
    label = model.labels[int(winners[0])]
    return (label, winners.size > 1) if return_tie else label
