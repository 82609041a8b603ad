import math

import numpy as np
import pytest

from qmfcodec.metrics import gaussian_window, luma, mse, psnr, ssim

C1, C2 = (0.01 * 255) ** 2, (0.03 * 255) ** 2


def ssim_reference(a, b):
    """Window-by-window SSIM on luma with explicit weighted sums."""
    x, y = luma(a), luma(b)
    g = gaussian_window()
    w = np.outer(g, g)
    h, wd = x.shape
    vals = []
    for i in range(h - 10):
        for j in range(wd - 10):
            px, py = x[i:i + 11, j:j + 11], y[i:i + 11, j:j + 11]
            mx, my = np.sum(w * px), np.sum(w * py)
            vx = np.sum(w * (px - mx) ** 2)
            vy = np.sum(w * (py - my) ** 2)
            cxy = np.sum(w * (px - mx) * (py - my))
            vals.append((2 * mx * my + C1) * (2 * cxy + C2)
                        / ((mx * mx + my * my + C1) * (vx + vy + C2)))
    return float(np.mean(vals))


def rgb(shape, seed):
    return np.random.default_rng(seed).integers(0, 256, shape, dtype=np.uint8)


# -- PSNR --------------------------------------------------------------------

def test_psnr_identical_is_inf():
    a = rgb((8, 8, 3), 60)
    assert psnr(a, a) == math.inf


def test_psnr_full_scale_difference():
    assert psnr(np.zeros((4, 4, 3), np.uint8), np.full((4, 4, 3), 255, np.uint8)) == 0.0


def test_psnr_unit_mse():
    a = np.zeros((4, 4, 3), np.uint8)
    b = a.copy()
    b[..., 0] = 1
    b[..., 1] = 1
    b[..., 2] = 1
    assert mse(a, b) == 1.0
    assert psnr(a, b) == pytest.approx(48.1308, abs=1e-4)
    assert psnr(a, b) == pytest.approx(20 * math.log10(255), abs=1e-12)


def test_psnr_uses_all_channels():
    a = np.zeros((2, 2, 3), np.uint8)
    b = a.copy()
    b[..., 2] = 3  # only blue differs: MSE = 9 / 3
    assert mse(a, b) == pytest.approx(3.0)


def test_psnr_symmetric_and_shape_check():
    a, b = rgb((9, 7, 3), 61), rgb((9, 7, 3), 62)
    assert psnr(a, b) == psnr(b, a)
    with pytest.raises(ValueError):
        psnr(a, rgb((7, 9, 3), 63))


# -- SSIM --------------------------------------------------------------------

def test_window_normalised_and_symmetric():
    g = gaussian_window()
    assert g.shape == (11,) and g.sum() == pytest.approx(1.0)
    assert np.allclose(g, g[::-1]) and g.argmax() == 5


def test_ssim_identical():
    a = rgb((20, 30, 3), 64)
    assert ssim(a, a) == 1.0


def test_ssim_symmetric():
    a, b = rgb((24, 24, 3), 65), rgb((24, 24, 3), 66)
    assert abs(ssim(a, b) - ssim(b, a)) <= 1e-12


def test_ssim_against_reference():
    a = rgb((16, 19, 3), 67)
    b = np.clip(a.astype(int) + np.random.default_rng(68).integers(-30, 31, a.shape), 0, 255)
    b = b.astype(np.uint8)
    assert ssim(a, b) == pytest.approx(ssim_reference(a, b), abs=1e-10)


def test_ssim_negative_of_checkerboard():
    i, j = np.mgrid[0:32, 0:32]
    board = np.where((i // 4 + j // 4) % 2 == 0, 230, 20).astype(np.uint8)
    a = np.repeat(board[..., None], 3, axis=2)
    b = 255 - a
    assert ssim(a, b) < 0.5
    assert ssim(a, b) == pytest.approx(ssim_reference(a, b), abs=1e-10)


@pytest.mark.parametrize("c1,c2", [(40, 200), (0, 255), (128, 129)])
def test_ssim_constant_images(c1, c2):
    a = np.full((13, 13, 3), c1, np.uint8)
    b = np.full((13, 13, 3), c2, np.uint8)
    # only the luminance term survives
    expect = (2.0 * c1 * c2 + C1) / (c1 * c1 + c2 * c2 + C1)
    assert ssim(a, b) == pytest.approx(expect, abs=1e-9)
    assert ssim(a, b) == pytest.approx(ssim_reference(a, b), abs=1e-9)


def test_ssim_matches_scikit_image():
    skm = pytest.importorskip("skimage.metrics")
    a = rgb((40, 50, 3), 69)
    b = np.clip(a.astype(int) + 25, 0, 255).astype(np.uint8)
    ya, yb = luma(a), luma(b)
    ref = skm.structural_similarity(ya, yb, data_range=255, gaussian_weights=True, sigma=1.5,
                                    use_sample_covariance=False)
    # its border crop of the 'same' map is exactly our valid region
    assert ssim(a, b) == pytest.approx(ref, abs=1e-10)


def test_ssim_too_small():
    with pytest.raises(ValueError):
        ssim(rgb((10, 30, 3), 70), rgb((10, 30, 3), 71))
