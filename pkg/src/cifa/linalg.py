"""Small linear-algebra helpers shared by the algorithms and the tests."""

import numpy as np
from scipy.linalg import subspace_angles


def principal_angles(a, b):
    """Principal angles (radians, descending) between ``span(a)`` and ``span(b)``.

    Empty inputs give an empty result.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros(0)
    return subspace_angles(a, b)


def max_principal_angle(a, b):
    angles = principal_angles(a, b)
    return float(angles.max()) if angles.size else 0.0


def column_signs(a):
    """+-1 per column so that ``a * signs`` has its largest-magnitude entries positive."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return np.ones(a.shape[1])
    signs = np.sign(a[np.argmax(np.abs(a), axis=0), np.arange(a.shape[1])])
    signs[signs == 0] = 1.0
    return signs


def orthonormal_columns(x):
    """Orthonormal basis of ``span(x)`` via a reduced QR (two passes)."""
    q, _ = np.linalg.qr(x)
    q, _ = np.linalg.qr(q)
    return q


def pearson(x, y):
    x = np.asarray(x, dtype=float) - np.mean(x)
    y = np.asarray(y, dtype=float) - np.mean(y)
    return float(x @ y / (np.linalg.norm(x) * np.linalg.norm(y)))
