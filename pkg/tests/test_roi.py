"""RoI extraction pipeline on synthetic shapes with known ground truth."""

import numpy as np
import pytest

from advlab.errors import DegenerateImageError, NoContourError
from advlab.imagekit import roi_mask, square_kernel


def disk_image(size=48, center=(24, 24), radius=10, fg=0.9, bg=0.1):
    """Bright disk on dark background; returns (image, disk pixel mask)."""
    yy, xx = np.mgrid[0:size, 0:size]
    disk = (yy - center[0]) ** 2 + (xx - center[1]) ** 2 <= radius**2
    img = np.full((size, size, 1), bg)
    img[disk] = fg
    return img, disk


class TestRoiMask:
    def test_disk_recovered_within_dilation_margin(self):
        img, disk = disk_image()
        mask = roi_mask(img, square_kernel(3))
        # The extractor must cover the disk; dilation may add a rim of at
        # most the kernel radius around it.
        assert (mask & disk).sum() == disk.sum()
        perimeter = np.count_nonzero(disk) - np.count_nonzero(
            (disk[1:-1, 1:-1])
        )
        assert mask.sum() <= disk.sum() + 8 * max(perimeter, 40)

    def test_constant_image_degenerate(self):
        with pytest.raises(DegenerateImageError):
            roi_mask(np.full((16, 16, 1), 0.5))

    def test_largest_of_two_blobs_wins(self):
        img = np.full((40, 40, 1), 0.05)
        img[4:8, 4:8] = 0.95  # 16 px blob
        img[20:36, 20:36] = 0.95  # 256 px blob
        mask = roi_mask(img, square_kernel(1))
        expected = np.zeros((40, 40), dtype=bool)
        expected[20:36, 20:36] = True
        assert (mask == expected).all()

    def test_mask_fills_dark_core(self):
        # Bright ring with dark core: the fill step recovers the core.
        img, disk = disk_image(radius=12)
        yy, xx = np.mgrid[0:48, 0:48]
        core = (yy - 24) ** 2 + (xx - 24) ** 2 <= 5**2
        img[core] = 0.05
        mask = roi_mask(img, square_kernel(3))
        assert mask[core].all()

    def test_deterministic(self):
        img, _ = disk_image()
        a = roi_mask(img)
        b = roi_mask(img)
        assert (a == b).all()

    def test_no_contour_with_explicit_threshold(self):
        img, _ = disk_image()
        with pytest.raises(NoContourError):
            roi_mask(img, threshold=256)

    def test_invert_selects_dark_region(self):
        img, disk = disk_image(fg=0.1, bg=0.9)  # dark lesion on light skin
        mask = roi_mask(img, square_kernel(3), invert=True)
        assert (mask & disk).sum() == disk.sum()

    def test_area_at_least_one(self):
        img, _ = disk_image(radius=2)
        assert roi_mask(img).sum() >= 1
