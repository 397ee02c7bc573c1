import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import expm_taylor, random_unitary
from zenolab.errors import ClusterAmbiguity, DimensionMismatch, NonHermitianInput, NonUnitaryInput
from zenolab.linalg import (
    canonical_phase,
    expm_hermitian,
    frobenius_distance,
    spectral_decompose,
)
from zenolab.models import random_hermitian


def test_expm_at_zero_time_is_identity(rng):
    h = random_hermitian(3, rng)
    assert np.allclose(expm_hermitian(h, 0.0), np.eye(3), atol=1e-15)


def test_expm_sigma_z_quarter_turn(sz):
    u = expm_hermitian(sz, np.pi / 2)
    assert np.allclose(u, np.diag([-1j, 1j]), atol=1e-15)


def test_expm_matches_taylor_oracle():
    h = random_hermitian(4, np.random.default_rng(7))
    u = expm_hermitian(h, 1.0)
    assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-12
    assert np.linalg.norm(u - expm_taylor(-1j * h)) < 1e-10


def test_expm_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        expm_hermitian(np.array([[0, 1], [0, 0]]), 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.floats(-5, 5), t=st.floats(-5, 5), dim=st.integers(1, 8))
def test_expm_group_property(seed, s, t, dim):
    h = random_hermitian(dim, np.random.default_rng(seed))
    lhs = expm_hermitian(h, s) @ expm_hermitian(h, t)
    assert np.linalg.norm(lhs - expm_hermitian(h, s + t)) <= 1e-10


def test_decompose_sigma_z(sz):
    d = spectral_decompose(sz)
    assert d.phases == (0.0, np.pi)
    assert np.allclose(d.projectors[0], np.diag([1, 0]))
    assert np.allclose(d.projectors[1], np.diag([0, 1]))


def test_decompose_identity():
    d = spectral_decompose(np.eye(5))
    assert d.phases == (0.0,)
    assert np.allclose(d.projectors[0], np.eye(5))


def test_decompose_sigma_x_rotation(sx):
    u = expm_hermitian(sx, 0.3)
    d = spectral_decompose(u)
    assert np.allclose(d.phases, [-0.3, 0.3], atol=1e-14)
    eye = np.eye(2)
    assert np.allclose(d.projectors[0], (eye - sx) / 2, atol=1e-14)
    assert np.allclose(d.projectors[1], (eye + sx) / 2, atol=1e-14)
    assert np.linalg.norm(d.reconstruct() - u) < 1e-14


def test_decompose_rejects_non_unitary():
    with pytest.raises(NonUnitaryInput):
        spectral_decompose(np.diag([1.0, 2.0]))


def test_cluster_ambiguity_is_reported():
    u = np.diag(np.exp(-1j * np.array([0.1, 0.1 + 5e-8])))
    with pytest.raises(ClusterAmbiguity):
        spectral_decompose(u, cluster_tol=1e-8)


def test_clustering_wraps_around_the_circle():
    # phases just either side of +-pi belong to one eigenspace
    u = np.diag(np.exp(-1j * np.array([np.pi - 1e-12, -np.pi + 1e-12, 0.5])))
    d = spectral_decompose(u)
    assert len(d) == 2
    assert sorted(d.ranks) == [1, 2]
    assert any(abs(abs(p) - np.pi) < 1e-11 for p in d.phases)


def _check_decomposition(u, d, tol=1e-10):
    dim = u.shape[0]
    total = np.zeros((dim, dim), dtype=complex)
    for i, p in enumerate(d.projectors):
        assert np.linalg.norm(p - p.conj().T) <= tol
        assert np.linalg.norm(p @ p - p) <= tol
        for j, q in enumerate(d.projectors):
            if i != j:
                assert np.linalg.norm(p @ q) <= tol
        total += p
    assert np.linalg.norm(total - np.eye(dim)) <= tol
    assert np.linalg.norm(d.reconstruct() - u) <= tol
    for lam in d.phases:
        assert -np.pi < lam <= np.pi


def test_projector_invariants_on_random_unitaries():
    rng = np.random.default_rng(11)
    for k in range(100):
        dim = 2 + k % 15
        u = random_unitary(dim, rng)
        _check_decomposition(u, spectral_decompose(u))


def test_degenerate_unitary_gives_exact_projectors():
    rng = np.random.default_rng(3)
    w = random_unitary(6, rng)
    phases = np.array([0.4, 0.4, 0.4, -2.0, -2.0, 3.0])
    u = w @ np.diag(np.exp(-1j * phases)) @ w.conj().T
    d = spectral_decompose(u)
    assert sorted(d.ranks) == [1, 2, 3]
    _check_decomposition(u, d, tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), dim=st.integers(1, 16))
def test_round_trip_random_unitary(seed, dim):
    u = random_unitary(dim, np.random.default_rng(seed))
    assert np.linalg.norm(spectral_decompose(u).reconstruct() - u) <= 1e-10


def test_frobenius_distance_examples(sx, sz):
    a = np.arange(4.0).reshape(2, 2)
    assert frobenius_distance(a, a) == 0.0
    assert frobenius_distance(sx, sz) == pytest.approx(2.0, abs=1e-15)
    assert frobenius_distance(np.eye(2), -np.eye(2)) == pytest.approx(2 * np.sqrt(2), abs=1e-15)
    assert frobenius_distance(sx, sz) == frobenius_distance(sz, sx)


def test_frobenius_distance_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        frobenius_distance(np.eye(2), np.eye(3))


def test_canonical_phase_range():
    assert canonical_phase(-np.pi) == np.pi
    assert canonical_phase(3 * np.pi) == pytest.approx(np.pi)
    assert canonical_phase(0.25) == 0.25
