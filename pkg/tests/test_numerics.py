import numpy as np
import pytest
from hypothesis import given, strategies as st

from chargepair.errors import DimensionError, InvalidStateError, NotHermitianError
from chargepair.numerics import (
    I2, I4, SX, SZ, allclose, as_density, check_density, dagger, expm_unitary, herm_eig,
    kron, on_qubit, psd_sqrt_eigvals, random_density, random_hermitian, unitarity_error,
)

from .strategies import rng_from, seeds


def test_kron_examples():
    assert allclose(kron(I2, I2), I4)
    assert allclose(kron(SZ, SZ), np.diag([1, -1, -1, 1]))
    ket00 = np.array([1, 0, 0, 0])
    assert np.allclose(kron(SX, I2) @ ket00, [0, 0, 1, 0])


def test_kron_rejects_wrong_dims():
    with pytest.raises(DimensionError):
        kron(I4, I2)


def test_on_qubit_order():
    assert allclose(on_qubit(SZ, 1), np.diag([1, 1, -1, -1]))
    assert allclose(on_qubit(SZ, 2), np.diag([1, -1, 1, -1]))
    with pytest.raises(ValueError):
        on_qubit(SZ, 3)


def test_herm_eig_examples():
    e = herm_eig(np.diag([1.0, 2, 3, 4]))
    assert np.allclose(e.eigenvalues, [1, 2, 3, 4])
    assert allclose(e.eigenvectors, I4)
    assert np.allclose(herm_eig(SX).eigenvalues, [-1, 1])


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        herm_eig(np.array([[0, 1], [0, 0]]))


@given(seeds, st.sampled_from([2, 4, 16]))
def test_herm_eig_residual_and_unitarity(seed, dim):
    h = random_hermitian(rng_from(seed), dim)
    e = herm_eig(h)
    v = e.eigenvectors
    assert np.linalg.norm(h @ v - v @ np.diag(e.eigenvalues)) <= 1e-10 * max(1, np.abs(h).max())
    assert np.linalg.norm(dagger(v) @ v - np.eye(dim)) <= 1e-10


def test_herm_eig_phase_convention_deterministic(rng):
    h = random_hermitian(rng, 4)
    a, b = herm_eig(h), herm_eig(h.copy())
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
    idx = np.argmax(np.abs(a.eigenvectors), axis=0)
    pivots = a.eigenvectors[idx, range(4)]
    assert np.allclose(pivots.imag, 0) and np.all(pivots.real > 0)


@given(seeds, st.floats(-50, 50))
def test_eigenvalues_shift(seed, c):
    h = random_hermitian(rng_from(seed), 4)
    assert np.allclose(herm_eig(h + c * I4).eigenvalues, herm_eig(h).eigenvalues + c, atol=1e-10)


def test_expm_examples():
    assert allclose(expm_unitary(np.zeros((4, 4)), 3.0), I4)
    e12, tau = 13.75, 0.37
    a0 = e12 * tau / 0.6582119569
    want = np.diag(np.exp(np.array([-1j, 1j, 1j, -1j]) * a0))
    assert allclose(expm_unitary(e12 * kron(SZ, SZ), tau), want, atol=1e-12)


@given(seeds, st.floats(-5, 5), st.floats(-5, 5))
def test_expm_group_properties(seed, t1, t2):
    h = random_hermitian(rng_from(seed), 4, scale=10)
    u1, u2 = expm_unitary(h, t1), expm_unitary(h, t2)
    assert np.linalg.norm(u1 @ expm_unitary(h, -t1) - I4) <= 1e-10
    assert np.linalg.norm(expm_unitary(h, t1 + t2) - u1 @ u2) <= 1e-10
    assert unitarity_error(u1) <= 1e-10


def test_psd_sqrt_eigvals_examples():
    mixed = I4 / 4
    assert np.allclose(psd_sqrt_eigvals(mixed, mixed), 0.25)
    psi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(psi, psi)
    yy = kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
    assert np.allclose(psd_sqrt_eigvals(rho, yy @ rho.conj() @ yy), [1, 0, 0, 0], atol=1e-12)


def test_psd_sqrt_eigvals_flags_negative():
    rho = np.diag([1.0, 0, 0, 0]).astype(complex)
    with pytest.raises(InvalidStateError):
        psd_sqrt_eigvals(rho, -rho)


@given(seeds, st.integers(1, 4))
def test_random_density_valid(seed, rank):
    rho = random_density(rng_from(seed), 4, rank)
    check_density(rho)


def test_as_density_validation():
    with pytest.raises(InvalidStateError):
        as_density(np.array([1, 1, 0, 0]))
    with pytest.raises(InvalidStateError):
        check_density(np.diag([2.0, -1, 0, 0]))
    assert allclose(as_density(np.array([0, 1, 0, 0])), np.diag([0, 1, 0, 0]))
