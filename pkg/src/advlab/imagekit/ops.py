"""Grayscale conversion, histogram statistics, thresholding, dilation, masking.

Images are float arrays of shape (H, W, C) with values in [0, 1], C in {1, 3}.
Grayscale images are integer arrays of shape (H, W) quantized to `bins` levels.
Binary masks are boolean arrays of shape (H, W).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateImageError, DimensionMismatchError


def validate_image(img: np.ndarray) -> np.ndarray:
    """Check the (H, W, C) layout and [0, 1] value range; returns img."""
    if img.ndim != 3 or img.shape[2] not in (1, 3):
        raise DimensionMismatchError(
            f"expected (H, W, C) image with C in {{1, 3}}, got shape {img.shape}"
        )
    if img.size == 0:
        raise DimensionMismatchError("image has zero pixels")
    lo, hi = float(img.min()), float(img.max())
    if lo < 0.0 or hi > 1.0:
        raise ValueError(f"pixel values outside [0, 1]: min={lo}, max={hi}")
    return img


def to_grayscale(img: np.ndarray, bins: int = 256) -> np.ndarray:
    """Collapse channels by unweighted mean and quantize to `bins` levels.

    Quantization maps v in [0, 1] to floor(v * (bins - 1) + 0.5), so 0 maps
    to level 0 and 1 maps to level bins - 1.
    """
    validate_image(img)
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    lum = img.mean(axis=2)
    return np.floor(lum * (bins - 1) + 0.5).astype(np.int64)


@dataclass
class Histogram:
    """Intensity histogram plus the class moments used by Otsu thresholding.

    `p[i]` is the probability of level i. When built from pixel counts the
    integer counts are kept alongside, which lets the threshold search
    compare candidates in exact arithmetic. For a split at threshold t,
    class 0 is [0, t) and class 1 is [t, L).
    """

    p: np.ndarray
    counts: np.ndarray | None = None
    bins: int = field(init=False)

    def __post_init__(self):
        self.p = np.asarray(self.p, dtype=float)
        self.bins = int(self.p.size)
        if self.bins < 2:
            raise ValueError("histogram needs at least 2 bins")
        total = float(self.p.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        if self.counts is not None:
            self.counts = np.asarray(self.counts, dtype=np.int64)
            if self.counts.size != self.bins:
                raise ValueError("counts and p must have equal length")

    @property
    def mean_total(self) -> float:
        return float(np.arange(self.bins) @ self.p)

    @property
    def variance_total(self) -> float:
        levels = np.arange(self.bins, dtype=float)
        return float(((levels - self.mean_total) ** 2) @ self.p)

    def class_probabilities(self, t: int) -> tuple[float, float]:
        """(w0, w1) for threshold t: mass below t and mass at/above t."""
        w0 = float(self.p[:t].sum())
        return w0, float(self.p[t:].sum())

    def class_means(self, t: int) -> tuple[float, float]:
        """(m0, m1) conditional means of the two classes split at t."""
        levels = np.arange(self.bins, dtype=float)
        w0, w1 = self.class_probabilities(t)
        m0 = float(levels[:t] @ self.p[:t]) / w0 if w0 > 0 else 0.0
        m1 = float(levels[t:] @ self.p[t:]) / w1 if w1 > 0 else 0.0
        return m0, m1

    def between_class_variance(self, t: int) -> float:
        w0, w1 = self.class_probabilities(t)
        m0, m1 = self.class_means(t)
        return w0 * w1 * (m0 - m1) ** 2

    def within_class_variance(self, t: int) -> float:
        levels = np.arange(self.bins, dtype=float)
        w0, w1 = self.class_probabilities(t)
        m0, m1 = self.class_means(t)
        v0 = float(((levels[:t] - m0) ** 2) @ self.p[:t]) / w0 if w0 > 0 else 0.0
        v1 = float(((levels[t:] - m1) ** 2) @ self.p[t:]) / w1 if w1 > 0 else 0.0
        return w0 * v0 + w1 * v1


def compute_histogram(gray: np.ndarray, bins: int = 256) -> Histogram:
    """Count intensity levels of a quantized grayscale image into `bins`."""
    if gray.ndim != 2:
        raise DimensionMismatchError(f"expected (H, W) grayscale, got {gray.shape}")
    if gray.min() < 0 or gray.max() >= bins:
        raise ValueError(f"grayscale values must lie in [0, {bins - 1}]")
    counts = np.bincount(gray.ravel(), minlength=bins)
    return Histogram(counts / gray.size, counts=counts)


def otsu_threshold(hist: Histogram) -> int:
    """Threshold maximizing the between-class variance.

    Runs the incremental moment-update sweep: class-0 mass and first moment
    are accumulated one level at a time, so every candidate threshold costs
    O(1). Count-backed histograms are compared in exact integer arithmetic
    (the variance ratio is cross-multiplied), so ties resolve to the
    smallest maximizing t with no floating-point ambiguity. Raises
    DegenerateImageError when only one bin is populated.
    """
    p = hist.p
    populated = (
        int(np.count_nonzero(hist.counts))
        if hist.counts is not None
        else int(np.count_nonzero(p))
    )
    if populated < 2:
        raise DegenerateImageError("histogram has a single populated bin")

    if hist.counts is not None:
        return _otsu_exact(hist.counts)

    mu_total = hist.mean_total
    w0 = 0.0
    m0_sum = 0.0
    best_t, best_var = 0, -1.0
    for t in range(1, hist.bins):
        w0 += p[t - 1]
        m0_sum += (t - 1) * p[t - 1]
        w1 = 1.0 - w0
        if w0 <= 0.0 or w1 <= 0.0:
            continue
        mu0 = m0_sum / w0
        mu1 = (mu_total - m0_sum) / w1
        var_b = w0 * w1 * (mu0 - mu1) ** 2
        if var_b > best_var:
            best_var = var_b
            best_t = t
    return best_t


def _otsu_exact(counts: np.ndarray) -> int:
    """Exact integer sweep: maximize (S0*C1 - S1*C0)^2 / (C0*C1).

    This equals n^2 * between-class variance, so the argmax is identical;
    candidates are ranked by cross-multiplication over Python integers.
    """
    counts = [int(c) for c in counts]
    n = sum(counts)
    s_total = sum(i * c for i, c in enumerate(counts))
    c0 = 0
    s0 = 0
    best_t = 0
    best_num, best_den = -1, 1  # value = num / den, den > 0
    for t in range(1, len(counts)):
        c0 += counts[t - 1]
        s0 += (t - 1) * counts[t - 1]
        c1 = n - c0
        if c0 == 0 or c1 == 0:
            continue
        a = s0 * c1 - (s_total - s0) * c0
        num, den = a * a, c0 * c1
        if num * best_den > best_num * den:
            best_num, best_den = num, den
            best_t = t
    return best_t


def binarize(gray: np.ndarray, t: int, invert: bool = False) -> np.ndarray:
    """Foreground mask: intensity >= t (or < t when invert is set)."""
    if gray.ndim != 2:
        raise DimensionMismatchError(f"expected (H, W) grayscale, got {gray.shape}")
    mask = gray >= t
    return ~mask if invert else mask


def square_kernel(size: int = 5) -> np.ndarray:
    """All-true square structuring element with an odd side and center anchor."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd and positive, got {size}")
    return np.ones((size, size), dtype=bool)


def dilate(mask: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Binary max-filter: output true where any kernel-covered pixel is true.

    The kernel anchor is its center; pixels outside the image count as
    background, so foreground never grows past what the kernel reaches.
    """
    if mask.ndim != 2 or mask.dtype != np.bool_:
        raise DimensionMismatchError("mask must be a 2-D boolean array")
    if kernel.ndim != 2 or kernel.shape[0] % 2 == 0 or kernel.shape[1] % 2 == 0:
        raise ValueError(f"kernel must be odd-sized, got {kernel.shape}")
    kh, kw = kernel.shape
    ch, cw = kh // 2, kw // 2
    h, w = mask.shape
    out = np.zeros_like(mask)
    for di in range(-ch, ch + 1):
        for dj in range(-cw, cw + 1):
            if not kernel[di + ch, dj + cw]:
                continue
            src_r = slice(max(0, di), min(h, h + di))
            dst_r = slice(max(0, -di), min(h, h - di))
            src_c = slice(max(0, dj), min(w, w + dj))
            dst_c = slice(max(0, -dj), min(w, w - dj))
            out[dst_r, dst_c] |= mask[src_r, src_c]
    return out


def apply_mask(img: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Zero every pixel outside the mask, across all channels."""
    validate_image(img)
    if mask.shape != img.shape[:2]:
        raise DimensionMismatchError(
            f"mask shape {mask.shape} does not match image {img.shape[:2]}"
        )
    return img * mask[:, :, None]
