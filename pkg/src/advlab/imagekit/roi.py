"""Region-of-interest extraction: threshold, dilate, trace, fill.

The extractor assumes the region of interest is brighter than its
surroundings after normalization; pass invert=True for dark-on-light
regions. When several components survive binarization, the outer contour
enclosing the largest area wins (ties go to the first in raster order).
"""

from __future__ import annotations

import numpy as np

from ..errors import NoContourError
from .contours import build_region_tree, trace_borders
from .ops import (
    binarize,
    compute_histogram,
    dilate,
    otsu_threshold,
    square_kernel,
    to_grayscale,
    validate_image,
)


def roi_mask(
    img: np.ndarray,
    kernel: np.ndarray | None = None,
    bins: int = 256,
    invert: bool = False,
    threshold: int | None = None,
) -> np.ndarray:
    """Extract the region-of-interest mask of an image.

    Pipeline: grayscale -> automatic threshold (unless `threshold` is
    given) -> binarize -> dilate -> trace borders -> fill the outer
    contour with the largest enclosed area. The returned boolean mask
    contains the contour pixels and everything inside the contour.

    Raises DegenerateImageError for single-intensity images and
    NoContourError when binarization leaves no foreground.
    """
    validate_image(img)
    if kernel is None:
        kernel = square_kernel(5)
    gray = to_grayscale(img, bins)
    if threshold is None:
        threshold = otsu_threshold(compute_histogram(gray, bins))
    fg = binarize(gray, threshold, invert=invert)
    fg = dilate(fg, kernel)
    if not fg.any():
        raise NoContourError("binarization produced no foreground pixels")
    contours = trace_borders(fg)
    outers = [c for c in contours if c.kind == "outer"]
    if not outers:
        raise NoContourError("no outer contour found")

    tree = build_region_tree(fg)
    best = None
    best_area = -1
    for contour in outers:
        r, c = contour.points[0]
        comp = int(tree.fg_labels[r, c])
        area = tree.enclosed_counts[comp]
        if area > best_area:
            best_area = area
            best = comp
    return tree.enclosed_mask(best)
