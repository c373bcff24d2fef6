import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgpca.errors import (
    CenterFrequencyTooHigh,
    DimensionMismatch,
    EmptyResponseList,
    InvalidParams,
)
from lgpca.frameio import GrayFrame
from lgpca.loggabor import (
    LogGaborBankParams,
    LogGaborFilterSpec,
    angular_component,
    apply_bank,
    apply_bank_complex,
    build_bank,
    extract_features,
    frequency_grid,
    octave_bandwidth,
    radial_component,
)
from oracles import circular_convolve

SPEC = LogGaborFilterSpec(f0=0.2, theta0=0.7, sigma_ratio=0.55, sigma_theta=0.5)
DEFAULT = LogGaborBankParams()


def test_radial_examples():
    assert radial_component(0.0, SPEC) == 0.0
    assert radial_component(SPEC.f0, SPEC) == 1.0
    assert radial_component(SPEC.f0 * SPEC.sigma_ratio, SPEC) == pytest.approx(math.exp(-0.5), abs=1e-12)
    assert radial_component(SPEC.f0 * SPEC.sigma_ratio, SPEC) == pytest.approx(0.60653, abs=1e-5)


@given(a=st.floats(0.01, 3.0), b=st.floats(0.01, 3.0))
def test_radial_monotone_in_log_distance(a, b):
    # gain depends only on |ln(f/f0)| and decreases with it
    fa, fb = SPEC.f0 * math.exp(a), SPEC.f0 * math.exp(-b)
    ga, gb = radial_component(fa, SPEC), radial_component(fb, SPEC)
    if a < b:
        assert ga >= gb
    elif a > b:
        assert ga <= gb


def test_angular_examples():
    assert angular_component(SPEC.theta0, SPEC) == 1.0
    assert angular_component(SPEC.theta0 + SPEC.sigma_theta, SPEC) == pytest.approx(math.exp(-0.5))
    assert angular_component(SPEC.theta0 + math.pi, SPEC) == pytest.approx(1.0, abs=1e-12)


@given(d=st.floats(-3.0, 3.0))
def test_angular_symmetric(d):
    assert angular_component(SPEC.theta0 + d, SPEC) == pytest.approx(
        angular_component(SPEC.theta0 - d, SPEC), abs=1e-12)


def test_filter_spec_validation():
    with pytest.raises(InvalidParams):
        LogGaborFilterSpec(0.6, 0.0, 0.5, 0.3)
    with pytest.raises(InvalidParams):
        LogGaborFilterSpec(0.2, math.pi, 0.5, 0.3)
    with pytest.raises(InvalidParams):
        LogGaborFilterSpec(0.2, 0.0, 1.0, 0.3)


def test_bank_single_filter():
    bank = build_bank(LogGaborBankParams(1, 1, 4, 2.0), 16, 16)
    assert len(bank) == 1
    spec = bank.filters[0].spec
    assert spec.f0 == 0.25 and spec.theta0 == 0.0
    # 16x16 grid has a bin at (u, v) = (0.25, 0): peak gain exactly 1
    assert bank.filters[0].gains.max() == pytest.approx(1.0, abs=1e-12)


def test_bank_center_frequencies():
    bank = build_bank(LogGaborBankParams(4, 6, 3, 2.1), 32, 32)
    f0s = [bank.filters[s * 6].spec.f0 for s in range(4)]
    np.testing.assert_allclose(f0s, [1 / 3, 1 / 6.3, 1 / 13.23, 1 / 27.783], rtol=1e-12)
    thetas = [f.spec.theta0 for f in bank.filters[:6]]
    np.testing.assert_allclose(thetas, [o * math.pi / 6 for o in range(6)])
    assert bank.filters[0].spec.sigma_theta == pytest.approx(1.2 * math.pi / 6)


@pytest.mark.parametrize("shape", [(16, 16), (17, 12), (64, 64)])
def test_bank_dc_null_and_range(shape):
    bank = build_bank(DEFAULT, shape[1], shape[0])
    for f in bank.filters:
        assert f.gains.shape == shape
        assert f.gains[0, 0] == 0.0
        assert f.gains.min() >= 0.0 and f.gains.max() <= 1.0 + 1e-12


def test_bank_errors():
    with pytest.raises(CenterFrequencyTooHigh):
        build_bank(LogGaborBankParams(min_wavelength=1.5), 16, 16)
    with pytest.raises(InvalidParams):
        build_bank(LogGaborBankParams(scale_mult=1.0), 16, 16)
    with pytest.raises(InvalidParams):
        build_bank(LogGaborBankParams(num_scales=0), 16, 16)
    with pytest.raises(InvalidParams):
        build_bank(DEFAULT, 3, 16)


def test_frequency_grid_layout():
    radius, theta = frequency_grid(8, 6)
    assert radius[0, 0] == 0.0
    assert radius[0, 1] == pytest.approx(1 / 8)
    assert radius[1, 0] == pytest.approx(1 / 6)
    assert radius[0, 4] == pytest.approx(0.5)  # -W/2 bin
    assert theta.min() >= 0.0 and theta.max() < math.pi


def test_octave_bandwidth_closed_form():
    # numeric half-gain search agrees with the closed form
    for ratio in (0.55, 0.65, 0.745):
        spec = LogGaborFilterSpec(0.1, 0.0, ratio, 0.3)
        f = np.exp(np.linspace(math.log(1e-4), math.log(0.5), 400001))
        g = radial_component(f, spec)
        above = f[g >= 0.5]
        numeric = math.log2(above.max() / above.min())
        assert numeric == pytest.approx(octave_bandwidth(ratio), abs=1e-3)
    assert octave_bandwidth(0.745) == pytest.approx(1.0, abs=0.1)
    assert octave_bandwidth(0.55) == pytest.approx(2.0310, abs=1e-4)


def test_apply_zero_and_constant():
    bank = build_bank(DEFAULT, 32, 32)
    for r in apply_bank(np.zeros((32, 32)), bank):
        assert not r.any()
    for r in apply_bank(GrayFrame(np.full((32, 32), 0.7)), bank):
        assert r.max() <= 1e-10


def test_apply_dimension_mismatch():
    bank = build_bank(DEFAULT, 32, 32)
    with pytest.raises(DimensionMismatch):
        apply_bank(np.zeros((16, 32)), bank)


def test_impulse_matches_spatial_convolution():
    bank = build_bank(LogGaborBankParams(2, 3, 3, 2.0), 16, 16)
    img = np.zeros((16, 16))
    img[5, 9] = 1.0
    fft_path = apply_bank_complex(img, bank)
    for f, resp in zip(bank.filters, fft_path):
        oracle = circular_convolve(img, f.spatial_kernel())
        assert np.max(np.abs(resp - oracle)) < 1e-9
        assert np.max(np.abs(np.abs(resp) - np.abs(oracle))) < 1e-9


def test_linearity(rng):
    bank = build_bank(DEFAULT, 24, 24)
    x, y = rng.random((24, 24)), rng.random((24, 24))
    a, b = 1.7, -0.4
    lhs = apply_bank_complex(a * x + b * y, bank)
    rhs = a * apply_bank_complex(x, bank) + b * apply_bank_complex(y, bank)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_extract_features_examples():
    out = extract_features([np.full((4, 4), 2.0)], pool=2)
    np.testing.assert_allclose(out, [0.5, 0.5, 0.5, 0.5])
    bank = build_bank(DEFAULT, 16, 16)
    zero = extract_features(apply_bank(np.full((16, 16), 0.3), bank), 4)
    assert zero.shape == (24 * 16,) and not zero.any()
    with pytest.raises(EmptyResponseList):
        extract_features([], 2)


def test_extract_features_padding_and_layout():
    a = np.ones((5, 3))
    b = np.zeros((5, 3))
    b[0, 0] = 4.0
    out = extract_features([a, b], pool=2)
    # 5x3 padded to 6x4 -> 3x2 pooled maps, concatenated in input order
    pooled_a = np.array([[1, 0.5], [1, 0.5], [0.5, 0.25]])
    pooled_b = np.array([[1, 0], [0, 0], [0, 0]])
    expected = np.concatenate([pooled_a.ravel(), pooled_b.ravel()])
    np.testing.assert_allclose(out, expected / np.linalg.norm(expected))


@pytest.mark.parametrize("c", [0.5, 2.0, 10.0])
def test_feature_scale_invariance(rng, c):
    bank = build_bank(DEFAULT, 32, 32)
    img = rng.random((32, 32)) * 0.09
    base = extract_features(apply_bank(img, bank), 4)
    scaled = extract_features(apply_bank(img * c, bank), 4)
    assert np.linalg.norm(base) == pytest.approx(1.0)
    np.testing.assert_allclose(scaled, base, atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_features_unit_or_zero(seed):
    bank = build_bank(LogGaborBankParams(2, 4, 3, 2.0), 16, 16)
    img = np.random.default_rng(seed).random((16, 16))
    v = extract_features(apply_bank(img, bank), 4)
    n = np.linalg.norm(v)
    assert n == pytest.approx(1.0) or n == 0.0
