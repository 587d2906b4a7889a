import math

import numpy as np
import pytest
from scipy import ndimage

from hpfnav.vision import (
    Kernel,
    contrast_filter,
    convolve,
    detect_edges,
    make_gaussian,
    make_gog,
    make_log,
    zero_cross,
)
from hpfnav.workspace import Disc, VisionConfig, rasterize


def direct_convolve(image, weights):
    """Straight double-loop correlation with replicate padding."""
    r = weights.shape[0] // 2
    padded = np.pad(np.asarray(image, float), r, mode="edge")
    out = np.zeros_like(np.asarray(image, float))
    h, w = out.shape
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for dy in range(-r, r + 1):
                for dx in range(-r, r + 1):
                    acc += weights[dy + r, dx + r] * padded[y + dy + r, x + dx + r]
            out[y, x] = acc
    return out


# -- kernels


def test_gaussian_kernel():
    k = make_gaussian(1.0, 3)
    assert k.weights.shape == (7, 7)
    assert k.weights.sum() == pytest.approx(1.0, abs=1e-15)
    # normalization preserves ratios from the closed form
    assert k.weights[3, 4] / k.weights[3, 3] == pytest.approx(math.exp(-0.5), abs=1e-12)
    assert k.weights[3, 3] == pytest.approx(1.0 / (2 * math.pi), rel=1e-3)


def test_log_kernel():
    k = make_log(1.0, 3)
    assert abs(k.weights.sum()) <= 1e-12
    assert k.weights[3, 3] < 0
    assert k.weights[3, 3] == pytest.approx(-1.0 / math.pi, rel=1e-2)
    np.testing.assert_allclose(k.weights, np.rot90(k.weights), atol=1e-15)


def test_kernel_radius_guard():
    with pytest.raises(ValueError):
        make_log(2.0, 3)
    with pytest.raises(ValueError):
        make_gaussian(2.0, 5)


def test_log_zeroes_constant_image():
    k = make_log(1.5, 5)
    out = convolve(np.full((20, 20), 137.0), k)
    np.testing.assert_allclose(out, 0.0, atol=1e-9)


def test_gog_ramp_response():
    kx, ky = make_gog(2.0, 6)
    s = 3.7
    img = np.tile(s * np.arange(40.0), (30, 1))
    gx = convolve(img, kx)
    gy = convolve(img, ky)
    inner = (slice(8, -8), slice(8, -8))
    np.testing.assert_allclose(gx[inner], s, atol=1e-6)
    np.testing.assert_allclose(gy[inner], 0.0, atol=1e-6)


def test_gog_axis_swap():
    kx, ky = make_gog(1.0, 3)
    rng = np.random.default_rng(3)
    img = rng.uniform(0, 255, (25, 25))
    np.testing.assert_allclose(convolve(img, kx), convolve(img.T, ky).T, atol=1e-10)


# -- convolution


def test_convolve_identity():
    w = np.zeros((5, 5))
    w[2, 2] = 1.0
    rng = np.random.default_rng(0)
    img = rng.uniform(0, 255, (18, 23))
    np.testing.assert_allclose(convolve(img, Kernel(w)), img, atol=1e-12)


def test_convolve_average_interior():
    rng = np.random.default_rng(1)
    img = rng.uniform(0, 255, (5, 5))
    out = convolve(img, Kernel(np.full((3, 3), 1.0 / 9.0)))
    assert out[2, 2] == pytest.approx(img[1:4, 1:4].mean())


def test_convolve_matches_direct_loop():
    rng = np.random.default_rng(42)
    img = rng.uniform(-10, 250, (9, 11))
    w = rng.normal(size=(5, 5))
    np.testing.assert_allclose(convolve(img, Kernel(w)), direct_convolve(img, w), atol=1e-10)


def test_convolve_linearity():
    rng = np.random.default_rng(5)
    a, b = rng.uniform(0, 255, (2, 16, 16))
    k = make_log(1.0, 3)
    lhs = convolve(2.0 * a - 0.5 * b, k)
    rhs = 2.0 * convolve(a, k) - 0.5 * convolve(b, k)
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


# -- zero crossings


def test_zero_cross_all_positive():
    assert not zero_cross(np.ones((10, 10))).any()


def test_zero_cross_sign_rule():
    # 1-D pattern [+3, -1, -2] tiled so only horizontal pairs matter:
    # the -1 cell is the smaller magnitude side of the sign change
    g = np.tile(np.array([3.0, -1.0, -2.0]), (3, 1))
    zc = zero_cross(g)
    np.testing.assert_array_equal(zc[1], [False, True, False])


def test_zero_cross_exact_zero():
    g = np.tile(np.array([2.0, 0.0, 5.0]), (3, 1))
    assert zero_cross(g)[1, 1]
    assert not zero_cross(np.zeros((5, 5))).any()


# -- contrast filter


def test_contrast_filter_extremes():
    rng = np.random.default_rng(9)
    cand = rng.random((20, 20)) > 0.6
    gx = rng.normal(scale=30, size=(20, 20))
    gy = rng.normal(scale=30, size=(20, 20))
    keep_all = contrast_filter(cand, (gx, gy), 0.0)
    np.testing.assert_array_equal(keep_all.cells, cand)
    keep_none = contrast_filter(cand, (gx, gy), math.inf)
    assert not keep_none.cells.any()


def _components(cells):
    lab, n = ndimage.label(cells, structure=np.ones((3, 3)))
    return n


def _encloses(cells, inside, outside=(0, 0)):
    """True when `inside` cannot be flood-filled from `outside` through ~cells."""
    free, _ = ndimage.label(~cells)  # 4-connected
    return free[inside[1], inside[0]] != free[outside[1], outside[0]]


def test_detect_edges_uniform_image():
    img = rasterize([], 32, 32, background=128)
    assert detect_edges(img).cells.sum() == 0


def test_detect_edges_disc_contour_closed():
    img = rasterize([Disc(24, 24, 8, intensity=20)], 48, 48, background=200)
    edges = detect_edges(img, VisionConfig(sigma=2.0, radius=6, zeta=20.0))
    assert edges.cells.any()
    assert edges.density() <= 0.15
    assert _encloses(edges.cells, (24, 24))


def test_detect_edges_two_obstacles_two_contours():
    img = rasterize(
        [Disc(14, 16, 5, intensity=20), Disc(40, 32, 6, intensity=20)], 56, 48, background=200
    )
    edges = detect_edges(img, VisionConfig(sigma=2.0, radius=6, zeta=20.0))
    assert _components(edges.cells) == 2
    assert _encloses(edges.cells, (14, 16))
    assert _encloses(edges.cells, (40, 32))


def test_contrast_filter_suppresses_noise():
    """Noisy flat background: candidates abound, the gradient gate kills them."""
    rng = np.random.default_rng(123)
    scene = rasterize([Disc(24, 24, 8, intensity=20)], 48, 48, background=200)
    noisy = scene.pixels.astype(float) + rng.normal(0.0, 5.0, scene.pixels.shape)

    cfg = VisionConfig(sigma=2.0, radius=6, zeta=20.0)
    k_log = make_log(cfg.sigma, cfg.radius)
    kx, ky = make_gog(cfg.sigma, cfg.radius)
    cand = zero_cross(convolve(noisy, k_log))
    kept = contrast_filter(cand, (convolve(noisy, kx), convolve(noisy, ky)), cfg.zeta).cells

    yy, xx = np.mgrid[0:48, 0:48]
    ring = np.abs(np.hypot(xx - 24, yy - 24) - 8) <= 3
    noise_cand = cand & ~ring
    assert noise_cand.sum() > 50  # the experiment is only meaningful with candidates
    survivors = (kept & ~ring).sum()
    assert survivors <= 0.05 * noise_cand.sum()
    # and the contour itself survives filtering
    assert _encloses(kept, (24, 24))
