"""Applications: classification with common features, clustering with individual ones."""

from .classify import ClassModel, classify, match_score, train_classifier
from .cluster import ClusterConfig, cluster_pipeline, kmeans
from .metrics import accuracy, nmi, sir

__all__ = [
    "ClassModel",
    "ClusterConfig",
    "accuracy",
    "classify",
    "cluster_pipeline",
    "kmeans",
    "match_score",
    "nmi",
    "sir",
    "train_classifier",
]
