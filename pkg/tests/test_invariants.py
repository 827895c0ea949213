import numpy as np
import pytest

from momentkit import (FeatureVector, FlusserRecipe, Image, MethodSpec,
                       MomentSet, OrderIndex, add_gaussian_noise, decompose,
                       flusser_invariant, magnitude_features, nn_classify,
                       order_set, rotate_image)
from momentkit.errors import DomainError
from momentkit.geometry import Scheme
from momentkit.harness import gallery_image

POLAR = Scheme("polar", "gauss:5", "recursive")


def synthetic_moments(method, K, values):
    coeffs = {OrderIndex(n, m): values.get((n, m), 0.0 + 0.0j)
              for n, m in order_set(method, K).indices}
    return MomentSet(method, K, POLAR, coeffs)


def phase_rotated(ms, phi):
    out = {k: v * np.exp(1j * k.m * phi) for k, v in ms.coefficients.items()}
    return MomentSet(ms.method, ms.K, ms.scheme, out)


def test_magnitude_features_zero_set():
    ms = synthetic_moments(MethodSpec("ZM"), 4, {})
    fv = magnitude_features(ms)
    assert np.all(fv.values == 0.0) and len(fv) == len(order_set(MethodSpec("ZM"), 4))


def test_magnitude_features_phase_blind():
    ms = synthetic_moments(MethodSpec("PCT"), 3,
                           {(1, 2): 0.3 - 0.4j, (2, -1): 1.0j})
    rot = phase_rotated(ms, 1.23)
    assert np.max(np.abs(magnitude_features(ms).values
                         - magnitude_features(rot).values)) < 1e-15


def test_magnitude_features_90_degree_rotation():
    # disk-supported image: right-angle rotation permutes pixels exactly
    img = gallery_image(64, 3)
    spec = MethodSpec("ZM")
    v0 = magnitude_features(decompose(img, spec, 8, POLAR)).values
    v90 = magnitude_features(decompose(rotate_image(img, 90), spec, 8, POLAR)).values
    rel = np.linalg.norm(v0 - v90) / np.linalg.norm(v0)
    assert rel < 1e-6


def test_flusser_recipe_validation():
    FlusserRecipe(((2, 1, 1), (2, -1, 1)))
    with pytest.raises(DomainError):
        FlusserRecipe(((2, 1, 1), (2, -1, 2)))


def test_flusser_simple_cases():
    ms = synthetic_moments(MethodSpec("PCT"), 3,
                           {(2, 0): 0.7 + 0.1j, (2, 1): 0.3 - 0.4j,
                            (2, -1): 0.3 + 0.4j})
    assert flusser_invariant(ms, FlusserRecipe(((2, 0, 1),))) == 0.7 + 0.1j
    inv = flusser_invariant(ms, FlusserRecipe(((2, 1, 1), (2, -1, 1))))
    assert inv == pytest.approx(abs(0.3 - 0.4j) ** 2)
    assert inv.imag == pytest.approx(0.0)


def test_flusser_invariant_under_phase_map():
    ms = synthetic_moments(MethodSpec("PCT"), 3,
                           {(1, 2): 0.5 + 0.2j, (2, -1): -0.3 + 0.8j,
                            (3, 0): 1.1 + 0.0j})
    recipe = FlusserRecipe(((1, 2, 1), (2, -1, 2)))
    a = flusser_invariant(ms, recipe)
    b = flusser_invariant(phase_rotated(ms, 0.7), recipe)
    assert abs(a - b) < 1e-12


def test_flusser_errors():
    ms = synthetic_moments(MethodSpec("PCT"), 2, {(1, 1): 0.0})
    with pytest.raises(DomainError):
        flusser_invariant(ms, FlusserRecipe(((1, 1, -1), (1, -1, 1))))
    with pytest.raises(DomainError):
        flusser_invariant(ms, FlusserRecipe(((9, 0, 1),)))


def test_rotate_basics(random_image64):
    img = random_image64
    assert np.array_equal(rotate_image(img, 0).pixels, img.pixels)
    assert np.array_equal(rotate_image(img, 360, "bilinear").pixels, img.pixels)
    twice = rotate_image(rotate_image(img, 90), 90)
    once = rotate_image(img, 180)
    assert np.array_equal(twice.pixels, once.pixels)
    r190 = rotate_image(img, 89.9999, "bilinear")
    r90 = rotate_image(img, 90)
    assert np.max(np.abs(r190.pixels - r90.pixels)) < 1e-3


def test_rotate_fills_exterior_with_zero():
    img = Image(np.ones((32, 32)))
    rot = rotate_image(img, 45, "bilinear")
    assert rot.pixels[0, 0] == 0.0
    rot_n = rotate_image(img, 45, "nearest")
    assert rot_n.pixels[0, 0] == 0.0


def test_noise_properties():
    img = Image(np.full((128, 128), 0.5))
    assert np.array_equal(add_gaussian_noise(img, 0.0, 1).pixels, img.pixels)
    a = add_gaussian_noise(img, 0.05, 42)
    b = add_gaussian_noise(img, 0.05, 42)
    assert np.array_equal(a.pixels, b.pixels)
    sample_var = float(np.var(a.pixels - img.pixels))
    assert abs(sample_var - 0.05) / 0.05 < 0.05
    with pytest.raises(DomainError):
        add_gaussian_noise(img, -0.1, 0)


def fv(vals):
    return FeatureVector(np.asarray(vals, dtype=float), MethodSpec("ZM"), 1)


def test_nn_classify():
    gallery = [("A", fv([0.0, 0.0])), ("B", fv([1.0, 1.0]))]
    assert nn_classify(fv([0.1, 0.1]), gallery) == "A"
    assert nn_classify(fv([1.0, 1.0]), gallery) == "B"
    # equidistant tie breaks to the earlier entry
    assert nn_classify(fv([0.5, 0.5]), gallery) == "A"
    with pytest.raises(DomainError):
        nn_classify(fv([1.0]), gallery)
    with pytest.raises(DomainError):
        nn_classify(fv([1.0]), [])


def test_argmax_rotation_invariance_90s():
    gallery_imgs = [(f"g{i}", gallery_image(64, i)) for i in range(4)]
    spec = MethodSpec("CHFM")
    gal = [(lbl, magnitude_features(decompose(img, spec, 6, POLAR)))
           for lbl, img in gallery_imgs]
    for lbl, img in gallery_imgs:
        for ang in (90, 180, 270):
            q = magnitude_features(decompose(rotate_image(img, ang), spec, 6, POLAR))
            assert nn_classify(q, gal) == lbl


def test_arbitrary_angle_feature_drift_small():
    img = gallery_image(128, 1)
    spec = MethodSpec("PCT")
    sch = Scheme("polar", "gauss:5", "naive")
    v0 = magnitude_features(decompose(img, spec, 12, sch)).values
    worst = 0.0
    for ang in (33.0, 140.0, 261.5):
        v = magnitude_features(decompose(rotate_image(img, ang, "bilinear"),
                                         spec, 12, sch)).values
        worst = max(worst, np.linalg.norm(v - v0) / np.linalg.norm(v0))
    assert worst < 0.05
