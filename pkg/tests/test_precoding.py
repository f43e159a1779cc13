import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adma.angle_domain import dft_matrix, oversampled_transform, rotation_phases
from adma.channel_model import ArrayConfig, draw_user, steering_vector
from adma.precoding import (
    RefinedBeam,
    analog_gram_closed_form,
    effective_channel,
    effective_channel_closed_form,
    fd_mmse_precoder,
    mmse_digital,
    mrt_precoder,
    noas_analog,
    normalize_power,
    obs_analog,
    refine_angle,
    sum_rate,
    user_rates,
)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def power(P):
    return np.real(np.trace(P.conj().T @ P))


def tone(M, f):
    return np.exp(-2j * np.pi * np.arange(M) * f)


def test_obs_single_column():
    M, j = 16, 3
    B = obs_analog([j], M)
    np.testing.assert_allclose(B[:, 0], np.exp(-2j * np.pi * j * np.arange(M) / M) / np.sqrt(M))
    assert np.linalg.norm(B) == pytest.approx(1.0)


def test_obs_orthonormal_and_unitary():
    M = 32
    B = obs_analog([1, 5, 9, 30], M)
    assert np.linalg.norm(B.conj().T @ B - np.eye(4)) < 1e-10
    assert np.max(np.abs(np.abs(B) - 1 / np.sqrt(M))) < 1e-12
    full = obs_analog(range(M), M)
    assert np.linalg.norm(full.conj().T @ full - np.eye(M)) < 1e-10


def test_obs_rejects_bad_index():
    with pytest.raises(ValueError):
        obs_analog([16], 16)


def test_refine_on_grid():
    M, k0, alpha = 32, 6, 0.3 - 0.4j
    h = alpha * tone(M, k0 / M)
    beam = refine_angle(h, 4)
    assert beam.offset == 0
    assert beam.index == (M - k0) % M
    assert abs(beam.gain) == pytest.approx(np.sqrt(M) * abs(alpha), rel=1e-12)


def dense_search_peak(h, resolution):
    M = len(h)
    F = dft_matrix(M)
    psis = np.arange(-0.5 / M, 0.5 / M + 1e-15, resolution)
    return max(np.max(np.abs(F @ (rotation_phases(M, p) * h))) for p in psis)


def test_refine_half_bin_with_v2():
    M, k0, alpha = 32, 5, 1.5j
    h = alpha * tone(M, (k0 + 0.5) / M)
    beam = refine_angle(h, 2)
    assert abs(beam.offset) == pytest.approx(1 / (2 * M))
    assert abs(beam.gain) ** 2 == pytest.approx(M * abs(alpha) ** 2, rel=1e-8)
    dense = dense_search_peak(h, 1 / (64 * 2 * M))
    assert abs(beam.gain) == pytest.approx(dense, rel=1e-8)
    assert beam.frequency == pytest.approx(((k0 + 0.5) / M + 0.5) % 1 - 0.5)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(4, 64))
def test_refine_gain_nested_grids(seed, M):
    h = crandn(np.random.default_rng(seed), M)
    gains = [abs(refine_angle(h, V).gain) for V in (1, 2, 4)]
    assert gains[0] <= gains[1] * (1 + 1e-12)
    assert gains[1] <= gains[2] * (1 + 1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 8))
def test_refine_offset_range(seed, V):
    M = 16
    beam = refine_angle(crandn(np.random.default_rng(seed), M), V)
    assert abs(beam.offset) <= 1 / (2 * M) + 1e-15
    assert round(beam.offset * V * M) == pytest.approx(beam.offset * V * M, abs=1e-9)
    g = oversampled_transform(crandn(np.random.default_rng(seed), M), V).g
    assert abs(beam.gain) == pytest.approx(np.max(np.abs(g)))


def test_noas_zero_rotation_is_obs():
    M = 16
    beams = [RefinedBeam(i, 0.0, 1.0, 4, M) for i in (2, 9, 13)]
    np.testing.assert_allclose(noas_analog(beams), obs_analog([2, 9, 13], M), atol=1e-14)


def test_noas_same_index_inner_product():
    M = 64
    beams = [RefinedBeam(7, 1 / (8 * M), 1.0, 4, M), RefinedBeam(7, -1 / (4 * M), 1.0, 4, M)]
    B = noas_analog(beams)
    dense = B.conj().T @ B
    np.testing.assert_allclose(analog_gram_closed_form(beams), dense, atol=1e-12)
    assert np.max(np.abs(np.abs(B) - 1 / np.sqrt(M))) < 1e-12


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1))
def test_noas_gram_closed_form(seed):
    rng = np.random.default_rng(seed)
    M, V = 32, 4
    beams = [RefinedBeam(int(rng.integers(M)), int(rng.integers(-2, 3)) / (V * M), 1.0, V, M) for _ in range(5)]
    B = noas_analog(beams)
    np.testing.assert_allclose(analog_gram_closed_form(beams), B.conj().T @ B, atol=1e-12)


def test_effective_channel_unitary_invariance():
    rng = np.random.default_rng(3)
    H = crandn(rng, 16, 3)
    B = obs_analog(range(16), 16)
    assert np.linalg.norm(effective_channel(H, B)) == pytest.approx(np.linalg.norm(H), rel=1e-12)


def test_effective_channel_closed_form_matches_dense():
    M, K = 64, 4
    cfg = ArrayConfig(M)
    for seed in range(20):
        rng = np.random.default_rng(seed)
        users = [draw_user(rng, cfg, 20, rng.uniform(0, np.pi), np.deg2rad(2)) for _ in range(K)]
        beams = [refine_angle(u.h, 4) for u in users]
        H = np.stack([u.h for u in users], axis=1)
        dense = effective_channel(H, noas_analog(beams))
        np.testing.assert_allclose(effective_channel_closed_form(users, beams), dense, atol=1e-9)


def test_effective_channel_diagonal_for_on_grid_users():
    M = 32
    ks = [3, -6, 11]
    H = np.stack([steering_vector(ArrayConfig(M), np.arccos(2 * k / M)) for k in ks], axis=1)
    B = obs_analog([(M - k) % M for k in ks], M)
    E = effective_channel(H, B)
    assert np.max(np.abs(E - np.diag(np.diag(E)))) < 1e-10
    np.testing.assert_allclose(np.abs(np.diag(E)), np.sqrt(M))


def test_mmse_single_user_is_matched_filter():
    g = np.array([[1 + 1j, -2, 0.5j]])
    P = mmse_digital(g, 10.0)
    direction = g.conj().T / np.linalg.norm(g)
    assert abs(np.vdot(direction[:, 0], P[:, 0])) / np.linalg.norm(P) == pytest.approx(1.0)
    assert power(P) == pytest.approx(10.0, rel=1e-12)


def test_mmse_high_power_approaches_pseudo_inverse():
    rng = np.random.default_rng(1)
    Q, K = 8, 3
    U, _ = np.linalg.qr(crandn(rng, Q, K))
    G = 2.0 * U.conj().T  # orthogonal equal-norm rows
    rho = 1e6
    P = mmse_digital(G, rho)
    R = G @ P
    off = np.abs(R - np.diag(np.diag(R)))
    assert 20 * np.log10(off.max() / np.abs(np.diag(R)).min()) < -40
    pinv = np.linalg.pinv(G)
    pinv = pinv * np.sqrt(rho / power(pinv))
    np.testing.assert_allclose(P, pinv, rtol=1e-4, atol=1e-6)


def test_mmse_power_normalization_random():
    rng = np.random.default_rng(2)
    for _ in range(100):
        K = int(rng.integers(1, 6))
        Q = int(rng.integers(K, 10))
        M = 32
        G = crandn(rng, K, Q)
        B = crandn(rng, M, Q)
        rho = float(10 ** rng.uniform(-2, 3))
        P = mmse_digital(G, rho, analog=B)
        assert power(B @ P) == pytest.approx(rho, rel=1e-8)


def test_mmse_rejects_non_finite():
    with pytest.raises(ValueError):
        mmse_digital(np.array([[np.nan, 1.0]]), 1.0)
    with pytest.raises(ValueError):
        mmse_digital(np.ones((1, 2)), 0.0)


def test_mrt_properties():
    rng = np.random.default_rng(5)
    h = crandn(rng, 16, 1)
    P_mrt = mrt_precoder(h, 3.0)
    P_mmse = fd_mmse_precoder(h, 3.0)
    assert abs(np.vdot(P_mrt[:, 0], P_mmse[:, 0])) == pytest.approx(3.0, rel=1e-12)
    assert power(P_mrt) == pytest.approx(3.0, rel=1e-12)

    Q, _ = np.linalg.qr(crandn(rng, 16, 4))
    R = Q.T @ mrt_precoder(Q, 1.0)
    assert np.max(np.abs(R - np.diag(np.diag(R)))) < 1e-12


def test_fd_mmse_is_identity_analog():
    rng = np.random.default_rng(6)
    H = crandn(rng, 12, 3)
    np.testing.assert_allclose(fd_mmse_precoder(H, 5.0, 3), mmse_digital(H.T, 5.0, 3, analog=np.eye(12)))


def test_sum_rate_zero_precoder():
    H = np.ones((4, 2))
    assert sum_rate(H, np.zeros((4, 2)), 1.0) == 0.0


def test_sum_rate_single_user():
    rng = np.random.default_rng(7)
    h = crandn(rng, 8, 1)
    rho, noise = 4.0, 0.1
    P = mrt_precoder(h, rho)
    expected = np.log2(1 + rho * np.linalg.norm(h) ** 2 / noise)
    assert sum_rate(h, P, noise) == pytest.approx(expected, abs=1e-10)


def test_sum_rate_interference_free():
    rng = np.random.default_rng(8)
    Q, _ = np.linalg.qr(crandn(rng, 8, 3))
    H = Q * np.array([1.0, 2.0, 0.5])
    P = normalize_power(np.linalg.pinv(H.T), 6.0)
    rates = user_rates(H, P, 0.2)
    single = [np.log2(1 + abs(H[:, k] @ P[:, k]) ** 2 / 0.2) for k in range(3)]
    assert sum_rate(H, P, 0.2) == pytest.approx(sum(single), abs=1e-10)
    np.testing.assert_allclose(rates, single, atol=1e-10)


def test_sum_rate_rejects_bad_noise():
    with pytest.raises(ValueError):
        sum_rate(np.ones((2, 1)), np.ones((2, 1)), 0.0)
