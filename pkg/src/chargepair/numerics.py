"""Dense complex linear algebra for 2-, 4- and 16-dimensional operators.

Units used throughout the package: energies in micro-eV, times in ns.
Rates cross the public interface in 1/s.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidStateError, NotHermitianError

HBAR = 0.6582119569  # ueV * ns
K_B = 86.17333262  # ueV / K
E_CHARGE = 1.602176634e-19  # C

ALLOWED_DIMS = (2, 4, 16)
DEFAULT_ATOL = 1e-12

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
I4 = np.eye(4, dtype=complex)


def as_matrix(m, dims=ALLOWED_DIMS) -> np.ndarray:
    """Return `m` as a square complex array whose size is one of `dims`."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] not in dims:
        raise DimensionError(f"expected square matrix with dim in {dims}, got shape {a.shape}")
    return a


def allclose(a, b, atol: float = DEFAULT_ATOL) -> bool:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return bool(np.max(np.abs(a - b)) <= atol)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def kron(a, b) -> np.ndarray:
    """Kronecker product of two single-qubit operators.

    The first factor acts on qubit 1, so the basis order is |00>, |01>, |10>, |11>.
    """
    a, b = as_matrix(a, (2,)), as_matrix(b, (2,))
    return np.kron(a, b)


def on_qubit(op, j: int) -> np.ndarray:
    """Embed a 2x2 operator acting on qubit `j` (1 or 2) into the 4-dim space."""
    if j == 1:
        return kron(op, I2)
    if j == 2:
        return kron(I2, op)
    raise ValueError(f"qubit index must be 1 or 2, got {j}")


def frobenius(a, b) -> float:
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)))


def unitarity_error(u) -> float:
    u = as_matrix(u)
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])))


def is_hermitian(h, atol: float = 1e-10) -> bool:
    h = np.asarray(h)
    return bool(np.max(np.abs(h - dagger(h))) <= atol)


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return v @ np.diag(self.eigenvalues) @ dagger(v)


def _fix_phases(v: np.ndarray) -> np.ndarray:
    # Largest-magnitude component of each column made real positive.
    # Magnitudes are rounded so near-ties resolve to the lowest index on every run.
    mags = np.round(np.abs(v), 12)
    idx = np.argmax(mags, axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    return v * (np.abs(pivots) / pivots)[None, :]


def herm_eig(h, atol: float = 1e-10) -> HermitianEig:
    h = as_matrix(h)
    if not is_hermitian(h, atol):
        raise NotHermitianError("matrix is not Hermitian within %g" % atol)
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    return HermitianEig(w, _fix_phases(v))


def expm_unitary(h, t: float, hbar: float = HBAR) -> np.ndarray:
    """exp(-i h t / hbar) through the spectral decomposition of `h`."""
    eig = herm_eig(h)
    v = eig.eigenvectors
    return v @ np.diag(np.exp(-1j * eig.eigenvalues * t / hbar)) @ dagger(v)


def psd_sqrt(m) -> np.ndarray:
    """Principal square root; eigenvalues at rounding level (or negative) are set to zero."""
    eig = herm_eig(m, atol=1e-8)
    w = eig.eigenvalues
    floor = 64 * np.finfo(float).eps * max(abs(w).max(), 1e-300)
    root = np.sqrt(np.where(w > floor, w, 0.0))
    return eig.eigenvectors @ np.diag(root) @ dagger(eig.eigenvectors)


def psd_sqrt_eigvals(rho, rho_tilde, neg_tol: float = 1e-8) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho @ rho_tilde``, sorted descending.

    These are the singular values of sqrt(rho_tilde) sqrt(rho), since
    (sqrt(rt) sqrt(r))^dag (sqrt(rt) sqrt(r)) = sqrt(r) rt sqrt(r) shares the
    spectrum of the product. Taking singular values avoids square roots of
    eigenvalues that are zero up to rounding, which would amplify 1e-16 noise
    to 1e-8.
    """
    for name, m in (("rho", rho), ("rho_tilde", rho_tilde)):
        w = np.linalg.eigvalsh(0.5 * (as_matrix(m) + dagger(as_matrix(m))))
        if w.min() < -neg_tol:
            raise InvalidStateError(f"{name} has negative eigenvalue {w.min():.3e}")
    a = psd_sqrt(rho_tilde) @ psd_sqrt(rho)
    return np.linalg.svd(a, compute_uv=False)


def random_hermitian(rng: np.random.Generator, dim: int = 4, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * 0.5 * (a + dagger(a))


def random_density(rng: np.random.Generator, dim: int = 4, rank: int | None = None) -> np.ndarray:
    """Normalized Wishart-style random density matrix."""
    k = dim if rank is None else rank
    g = rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def check_density(rho, atol: float = 1e-8) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, no significantly negative eigenvalue."""
    rho = as_matrix(rho)
    if not is_hermitian(rho, atol):
        raise InvalidStateError("density matrix is not Hermitian")
    tr = np.trace(rho).real
    if abs(tr - 1) > atol:
        raise InvalidStateError(f"density matrix trace is {tr}")
    w = np.linalg.eigvalsh(0.5 * (rho + dagger(rho)))
    if w.min() < -atol:
        raise InvalidStateError(f"density matrix has negative eigenvalue {w.min():.3e}")
    return rho


def as_density(state, atol: float = 1e-8) -> np.ndarray:
    """Accept a state vector or a density matrix and return a validated density matrix."""
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1:
        n = np.linalg.norm(a)
        if abs(n - 1) > atol:
            raise InvalidStateError(f"state vector norm is {n}")
        return np.outer(a, a.conj())
    return check_density(a, atol)
