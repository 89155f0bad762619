"""PGM/PPM round trips and malformed-file diagnostics."""

import numpy as np
import pytest

from advlab.errors import BadFormatError, MissingFileError
from advlab.imagekit import read_image, read_mask, write_image, write_mask


class TestRoundTrip:
    def test_gray_round_trip(self, tmp_path):
        rng = np.random.default_rng(3)
        img = rng.integers(0, 256, size=(7, 5, 1)) / 255.0
        p = tmp_path / "img.pgm"
        write_image(p, img)
        back = read_image(p)
        assert back.shape == (7, 5, 1)
        assert np.array_equal(back, img)

    def test_rgb_round_trip(self, tmp_path):
        rng = np.random.default_rng(5)
        img = rng.integers(0, 256, size=(4, 6, 3)) / 255.0
        p = tmp_path / "img.ppm"
        write_image(p, img)
        assert np.array_equal(read_image(p), img)

    def test_mask_round_trip(self, tmp_path):
        mask = np.random.default_rng(7).random((9, 9)) < 0.5
        p = tmp_path / "mask.pgm"
        write_mask(p, mask)
        assert np.array_equal(read_mask(p), mask)

    def test_header_comment_tolerated(self, tmp_path):
        p = tmp_path / "c.pgm"
        p.write_bytes(b"P5\n# comment line\n2 2\n255\n\x00\xff\x80\x7f")
        img = read_image(p)
        assert img.shape == (2, 2, 1)
        assert img[0, 1, 0] == 1.0


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFileError):
            read_image(tmp_path / "nope.pgm")

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.pgm"
        p.write_bytes(b"P3\n2 2\n255\n")
        with pytest.raises(BadFormatError, match="bad.pgm"):
            read_image(p)

    def test_truncated_body(self, tmp_path):
        p = tmp_path / "short.pgm"
        p.write_bytes(b"P5\n4 4\n255\n\x00\x01")
        with pytest.raises(BadFormatError, match="16 pixel bytes"):
            read_image(p)

    def test_corrupt_header(self, tmp_path):
        p = tmp_path / "hdr.pgm"
        p.write_bytes(b"P5\nxx yy\n255\n")
        with pytest.raises(BadFormatError):
            read_image(p)
