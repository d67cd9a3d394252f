import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slepmoments import (
    AliasingError,
    InvariantVector,
    MomentSet,
    ParameterError,
    PolarImage,
    compute_moments,
    feature_vector,
    invariants,
    invariants_to_csv,
    moments_from_json,
    moments_to_json,
    reconstruct,
    rotate_image,
    smooth_test_image,
)
from slepmoments.dpss import radial_basis


def polar(samples):
    s = np.asarray(samples)
    return PolarImage(n_radial=s.shape[0], n_angular=s.shape[1], samples=s)


def brute_force_moments(img, basis, max_radial, max_angular):
    """Direct O(R*T*M*L) double sum; oracle for the FFT path."""
    n_r, n_t = img.n_radial, img.n_angular
    r = (np.arange(n_r) + 0.5) / n_r
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    psi = radial_basis(basis, r)
    out = np.zeros((max_radial, 2 * max_angular + 1), dtype=complex)
    f = np.conj(img.samples)
    for m in range(max_radial):
        for n in range(-max_angular, max_angular + 1):
            acc = 0.0 + 0.0j
            for i in range(n_r):
                ring = 0.0 + 0.0j
                for j in range(n_t):
                    ring += np.exp(-1j * n * theta[j]) * f[i, j]
                acc += psi[m, i] * r[i] * ring
            out[m, max_angular + n] = acc * (1.0 / n_r) * (2.0 * np.pi / n_t)
    return out


def test_zero_image_gives_zero_moments(basis32):
    ms = compute_moments(polar(np.zeros((8, 8))), basis32, 4, 3)
    assert np.all(ms.values == 0)


def test_complex_exponential_hits_single_order(basis32):
    n_r, n_t = 8, 16
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    img = polar(np.tile(np.exp(-1j * theta), (n_r, 1)))
    ms = compute_moments(img, basis32, 4, 3)
    r = (np.arange(n_r) + 0.5) / n_r
    psi = radial_basis(basis32, r)
    for m in range(4):
        for n in range(-3, 4):
            if n == 1:
                expected = 2.0 * np.pi / n_r * np.sum(psi[m] * r)
                assert ms.value(m, 1) == pytest.approx(expected, abs=1e-12)
            else:
                assert abs(ms.value(m, n)) < 1e-13


def test_fft_path_equals_brute_force(basis32, rng):
    img = polar(rng.random((8, 8)) + 1j * rng.random((8, 8)))
    ms = compute_moments(img, basis32, 4, 3)
    oracle = brute_force_moments(img, basis32, 4, 3)
    assert np.abs(ms.values - oracle).max() < 1e-10


@settings(max_examples=30, deadline=None)
@given(
    n_r=st.integers(min_value=1, max_value=16),
    n_t=st.integers(min_value=1, max_value=16),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_fft_direct_equivalence_property(basis32, n_r, n_t, seed):
    gen = np.random.default_rng(seed)
    img = polar(gen.random((n_r, n_t)))
    max_angular = min(5, (n_t - 1) // 2)
    max_radial = min(5, basis32.params.n_seq)
    ms = compute_moments(img, basis32, max_radial, max_angular)
    oracle = brute_force_moments(img, basis32, max_radial, max_angular)
    assert np.abs(ms.values - oracle).max() < 1e-10


def test_fft_direct_equivalence_all_small_grids(basis32):
    # every grid with R, T <= 16; direct evaluation is a vectorized double sum
    gen = np.random.default_rng(99)
    worst = 0.0
    for n_r in range(1, 17):
        for n_t in range(1, 17):
            img = polar(gen.random((n_r, n_t)))
            max_angular = min(5, (n_t - 1) // 2)
            ms = compute_moments(img, basis32, 5, max_angular)
            r = (np.arange(n_r) + 0.5) / n_r
            theta = 2.0 * np.pi * np.arange(n_t) / n_t
            psi = radial_basis(basis32, r)[:5]
            kernel = np.exp(-1j * np.outer(np.arange(-max_angular, max_angular + 1), theta))
            direct = (psi * (r / n_r)) @ (np.conj(img.samples) @ kernel.T) * (2 * np.pi / n_t)
            worst = max(worst, float(np.abs(ms.values - direct).max()))
    assert worst < 1e-10


def test_conjugate_symmetry_for_real_images(basis32, rng):
    ms = compute_moments(polar(rng.random((10, 12))), basis32, 4, 5)
    for m in range(4):
        for n in range(1, 6):
            assert ms.value(m, -n) == pytest.approx(np.conj(ms.value(m, n)), abs=1e-10)


def test_conjugate_linearity(basis32, rng):
    f = rng.random((8, 12)) + 1j * rng.random((8, 12))
    g = rng.random((8, 12)) + 1j * rng.random((8, 12))
    a, b = 0.7 - 0.2j, -0.4 + 1.1j
    lhs = compute_moments(polar(a * f + b * g), basis32, 3, 4).values
    rhs = (
        np.conj(a) * compute_moments(polar(f), basis32, 3, 4).values
        + np.conj(b) * compute_moments(polar(g), basis32, 3, 4).values
    )
    assert np.abs(lhs - rhs).max() < 1e-12


def test_precondition_errors(basis32, rng):
    img = polar(rng.random((8, 8)))
    with pytest.raises(ParameterError):
        compute_moments(img, basis32, basis32.params.n_seq + 1, 2)
    with pytest.raises(AliasingError):
        compute_moments(img, basis32, 2, 4)  # 2L+1 = 9 > T = 8


def test_invariants_are_moduli():
    values = np.zeros((1, 3), dtype=complex)
    values[0, 2] = 3.0 + 4.0j  # (m, n) = (0, 1)
    ms = MomentSet(max_radial=1, max_angular=1, values=values, grid=(4, 8), basis_id="x")
    vec = invariants(ms)
    assert vec.value(0, 1) == pytest.approx(5.0)
    assert vec.entries.shape == (2,)


def test_zero_moments_zero_invariants():
    ms = MomentSet(
        max_radial=2, max_angular=2, values=np.zeros((2, 5), complex),
        grid=(4, 8), basis_id="x",
    )
    assert np.all(invariants(ms).entries == 0)


def test_cyclic_shift_leaves_invariants_unchanged(basis32, rng):
    samples = rng.random((8, 16))
    base = invariants(compute_moments(polar(samples), basis32, 4, 5)).entries
    for shift in (1, 3, 7, 11):
        shifted = np.roll(samples, shift, axis=1)
        vec = invariants(compute_moments(polar(shifted), basis32, 4, 5)).entries
        assert np.abs(vec - base).max() < 1e-9


def test_reconstruct_zero_moments(basis32):
    ms = MomentSet(
        max_radial=2, max_angular=1, values=np.zeros((2, 3), complex),
        grid=(4, 8), basis_id="x",
    )
    out = reconstruct(ms, basis32, (4, 8))
    assert np.all(out.samples == 0)
    assert out.meta["imag_residual"] == 0


def test_reconstruct_single_moment_gives_radial_row(basis32):
    values = np.zeros((1, 1), dtype=complex)
    values[0, 0] = 1.0
    ms = MomentSet(max_radial=1, max_angular=0, values=values, grid=(16, 8), basis_id="x")
    out = reconstruct(ms, basis32, (16, 8))
    r = (np.arange(16) + 0.5) / 16
    expected = radial_basis(basis32, r)[0]
    assert np.abs(out.samples - expected[:, None]).max() < 1e-12


def test_reconstruct_requires_matching_or_finer_grid(basis32):
    ms = MomentSet(
        max_radial=1, max_angular=0, values=np.zeros((1, 1), complex),
        grid=(16, 8), basis_id="x",
    )
    with pytest.raises(ParameterError):
        reconstruct(ms, basis32, (8, 8))


def test_reconstruction_error_decreases_with_terms(basis64):
    # six-term series with distinct angular orders; direct synthesis oracle
    n_r, n_t = 32, 64
    r = (np.arange(n_r) + 0.5) / n_r
    theta = 2.0 * np.pi * np.arange(n_t) / n_t
    psi = radial_basis(basis64, r)
    coeff = [0.9, 0.75, 0.6, 0.45, 0.3, 0.2]
    ang = [0, 1, 2, 3, 1, 2]
    target = np.zeros((n_r, n_t))
    for m in range(6):
        target += coeff[m] * np.outer(psi[m], np.cos(ang[m] * theta + 0.3 * m))
    max_angular = 3
    full = np.zeros((6, 2 * max_angular + 1), dtype=complex)
    for m in range(6):
        c = 0.5 * coeff[m] * np.exp(-1j * 0.3 * m)
        full[m, max_angular + ang[m]] += c
        full[m, max_angular - ang[m]] += np.conj(c)
    norm = np.linalg.norm(target)
    errors = []
    for max_radial in range(2, 7):
        ms = MomentSet(
            max_radial=max_radial, max_angular=max_angular,
            values=full[:max_radial], grid=(n_r, n_t), basis_id=basis64.basis_id,
        )
        out = reconstruct(ms, basis64, (n_r, n_t))
        errors.append(np.linalg.norm(out.samples - target) / norm)
    assert all(b <= a + 1e-12 for a, b in zip(errors, errors[1:]))
    assert errors[-1] < 0.05


def test_feature_vector_length_and_zero(basis64):
    img = smooth_test_image(64)
    vec = feature_vector(img, basis64, grid=(32, 64))
    assert vec.entries.shape == (100,)
    zero = feature_vector(
        type(img)(width=8, height=8, pixels=np.zeros((8, 8))), basis64, grid=(8, 32)
    )
    assert np.all(zero.entries == 0)


def test_feature_vector_rotation_stability(basis64, test_image):
    a = feature_vector(test_image, basis64, grid=(64, 128)).entries
    b = feature_vector(rotate_image(test_image, 90.0), basis64, grid=(64, 128)).entries
    assert np.allclose(a, b, rtol=0.15, atol=1e-5)


def test_moment_json_round_trip(basis32, rng):
    ms = compute_moments(polar(rng.random((6, 10))), basis32, 3, 2)
    back = moments_from_json(moments_to_json(ms))
    assert back.max_radial == ms.max_radial
    assert back.max_angular == ms.max_angular
    assert back.grid == ms.grid
    assert back.basis_id == ms.basis_id
    assert np.abs(back.values - ms.values).max() < 1e-15


def test_invariants_csv_layout():
    vec = InvariantVector(max_radial=2, max_angular=1, entries=np.array([1.0, 2.0, 3.0, 4.5]))
    lines = invariants_to_csv(vec).strip().split("\n")
    assert lines[0] == "phi_0_0,phi_0_1,phi_1_0,phi_1_1"
    assert lines[1] == "1.0,2.0,3.0,4.5"
