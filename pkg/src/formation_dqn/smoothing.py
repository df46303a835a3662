"""Savitzky-Golay smoothing for reported learning curves.

Interior points use the classic least-squares polynomial convolution weights.
Near the boundaries the window is truncated to the available samples and the
polynomial is refitted on that asymmetric window (with the fit degree capped
by the number of points), so the output always has the input's length.
"""

from __future__ import annotations

import numpy as np


def _fit_weights(offsets: np.ndarray, poly_order: int) -> np.ndarray:
    """Linear weights of the least-squares polynomial fit evaluated at 0."""
    design = np.vander(offsets.astype(float), poly_order + 1, increasing=True)
    return np.linalg.pinv(design)[0]


def savitzky_golay(series, window: int, poly_order: int) -> np.ndarray:
    y = np.asarray(series, dtype=float)
    if y.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if window % 2 == 0 or window < 1:
        raise ValueError(f"window must be a positive odd integer, got {window}")
    if poly_order < 0:
        raise ValueError(f"poly_order must be >= 0, got {poly_order}")
    if window <= poly_order:
        raise ValueError(f"window ({window}) must exceed poly_order ({poly_order})")
    n = y.shape[0]
    if n < window:
        raise ValueError(f"series length {n} is shorter than window {window}")

    half = window // 2
    out = np.empty(n)
    interior = _fit_weights(np.arange(-half, half + 1), poly_order)
    out[half: n - half] = np.correlate(y, interior, mode="valid")
    for i in list(range(half)) + list(range(n - half, n)):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        degree = min(poly_order, hi - lo - 1)
        weights = _fit_weights(np.arange(lo, hi) - i, degree)
        out[i] = weights @ y[lo:hi]
    return out
