import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faqpie.image_io import (
    ImageFormatError,
    ImagePlane,
    PadRecord,
    RgbImage,
    crop_and_merge,
    decode_image,
    encode_ppm,
    load_image,
    log2_side_for,
    save_image,
    to_planes,
    zero_pad,
)

from conftest import make_rng, random_rgb


def test_ppm_identity_read_through(tmp_path):
    raw = b"P6\n2 2\n255\n" + bytes([255, 0, 0, 0, 255, 0, 0, 0, 255, 0, 0, 0])
    path = tmp_path / "t.ppm"
    path.write_bytes(raw)
    img = load_image(path)
    assert (img.width, img.height) == (2, 2)
    assert img.data.tobytes() == raw[-12:]


def test_ppm_header_comments_and_whitespace():
    raw = b"P6 # a comment\n# another\n 2\t1 \n255\n" + bytes(6)
    img = decode_image(raw)
    assert (img.width, img.height) == (2, 1)


def test_ppm_short_read_errors():
    raw = b"P6\n2 2\n255\n" + bytes(5)
    with pytest.raises(ImageFormatError, match="short read"):
        decode_image(raw)


def test_ppm_wrong_magic_and_maxval():
    with pytest.raises(ImageFormatError, match="unsupported format"):
        decode_image(b"P5\n2 2\n255\n" + bytes(4))
    with pytest.raises(ImageFormatError, match="maxval"):
        decode_image(b"P6\n1 1\n65535\n" + bytes(6))


def test_load_missing_file(tmp_path):
    with pytest.raises(ImageFormatError, match="unreadable"):
        load_image(tmp_path / "nope.ppm")


def test_ppm_write_read_round_trip(tmp_path):
    img = random_rgb(make_rng(5), 7, 3)
    path = tmp_path / "x.ppm"
    save_image(img, path)
    back = load_image(path)
    assert back.data.tobytes() == img.data.tobytes()


def test_png_round_trip_matches_ppm_bytes(tmp_path):
    img = random_rgb(make_rng(6), 5, 4)
    png_path = tmp_path / "x.png"
    save_image(img, png_path)
    decoded = load_image(png_path)
    assert decoded.data.tobytes() == img.data.tobytes()
    assert encode_ppm(decoded) == encode_ppm(img)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**31 - 1))
def test_ppm_codec_round_trip_property(width, height, seed):
    img = random_rgb(make_rng(seed), width, height)
    assert decode_image(encode_ppm(img)).data.tobytes() == img.data.tobytes()


def test_decode_video_frame_resolution():
    header = b"P6\n1280 720\n255\n"
    img = decode_image(header + bytes(1280 * 720 * 3))
    assert (img.width, img.height) == (1280, 720)


def test_to_planes_gray_symmetry():
    img = RgbImage(2, 2, np.full((2, 2, 3), 128, dtype=np.uint8))
    r, g, b = to_planes(img)
    assert np.array_equal(r, g) and np.array_equal(g, b)
    assert np.all(r == 128.0)


def test_to_planes_pure_red():
    data = np.zeros((2, 3, 3), dtype=np.uint8)
    data[:, :, 0] = 255
    r, g, b = to_planes(RgbImage(3, 2, data))
    assert np.all(r == 255.0) and np.all(g == 0.0) and np.all(b == 0.0)


def test_to_planes_matches_element_loop():
    img = random_rgb(make_rng(7), 4, 4)
    planes = to_planes(img)
    for c in range(3):
        for row in range(4):
            for col in range(4):
                assert planes[c][row, col] == float(img.data[row, col, c])


def test_zero_pad_noop_on_power_of_two():
    grid = make_rng(8).uniform(0, 255, size=(8, 8))
    plane, rec = zero_pad(grid, 3)
    assert np.array_equal(plane.pixels, grid)
    assert rec == PadRecord(original_width=8, original_height=8)


def test_zero_pad_content_and_norm():
    grid = make_rng(9).uniform(0, 255, size=(3, 5))
    plane, rec = zero_pad(grid, 3)
    assert plane.pixels.shape == (8, 8)
    assert np.array_equal(plane.pixels[:3, :5], grid)
    assert np.count_nonzero(plane.pixels[3:, :]) == 0
    assert np.count_nonzero(plane.pixels[:, 5:]) == 0
    assert plane.frobenius_norm == pytest.approx(np.linalg.norm(grid), rel=1e-15)
    assert (rec.original_height, rec.original_width) == (3, 5)


def test_zero_pad_paper_sized_frame():
    grid = np.ones((636, 842))
    plane, rec = zero_pad(grid, 10)
    assert plane.pixels.shape == (1024, 1024)
    assert plane.pixels.sum() == 636 * 842
    assert (rec.original_height, rec.original_width) == (636, 842)


def test_zero_pad_too_large():
    with pytest.raises(ValueError, match="larger than target"):
        zero_pad(np.zeros((9, 2)), 3)


def test_log2_side_for():
    assert log2_side_for(636, 842) == 10
    assert log2_side_for(8, 8) == 3
    assert log2_side_for(1, 1) == 0


def test_crop_and_merge_round_trip():
    img = random_rgb(make_rng(10), 5, 6)
    planes = []
    rec = None
    for grid in to_planes(img):
        plane, rec = zero_pad(grid, 3)
        planes.append(plane.pixels)
    back = crop_and_merge(tuple(planes), rec)
    assert back.data.tobytes() == img.data.tobytes()


def test_crop_and_merge_clamps_and_rounds():
    base = np.zeros((2, 2))
    planes = (base + 255.7, base - 0.3, base + 127.5)
    rec = PadRecord(original_width=2, original_height=2)
    out = crop_and_merge(planes, rec)
    assert np.all(out.data[:, :, 0] == 255)
    assert np.all(out.data[:, :, 1] == 0)
    assert np.all(out.data[:, :, 2] == 128)


def test_crop_and_merge_rejects_mismatched_shapes():
    with pytest.raises(ValueError, match="identical shape"):
        crop_and_merge((np.zeros((2, 2)), np.zeros((2, 2)), np.zeros((4, 4))),
                       PadRecord(2, 2))


def test_image_plane_invariants():
    with pytest.raises(ValueError, match="negative"):
        ImagePlane(n=1, pixels=np.array([[1.0, -2.0], [0.0, 0.0]]))
    with pytest.raises(ValueError, match="not 4x4"):
        ImagePlane(n=2, pixels=np.zeros((2, 2)))
    plane = ImagePlane(n=1, pixels=np.array([[3.0, 4.0], [0.0, 0.0]]))
    assert plane.frobenius_norm == pytest.approx(5.0, rel=1e-12)


def test_rgb_image_shape_validation():
    with pytest.raises(ImageFormatError):
        RgbImage(2, 2, np.zeros((2, 2, 3), dtype=np.float64))
    with pytest.raises(ImageFormatError, match="short read"):
        RgbImage.from_bytes(2, 2, bytes(11))
