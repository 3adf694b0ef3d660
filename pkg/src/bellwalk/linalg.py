"""
Small Hermitian matrix helpers (2x2 and 4x4 density matrices).

Every spectral function goes through eig_hermitian, which clamps eigenvalues
within EIG_CLAMP of zero and rejects anything more negative.
"""

import numpy as np

from .config import EIG_CLAMP, HERMITIAN_TOL, TRACE_TOL
from .errors import InvalidArgument


def check_hermitian(H, tol=HERMITIAN_TOL):
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {H.shape}")
    deviation = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if deviation > tol:
        raise InvalidArgument(f"matrix is not Hermitian (max |H - H^dagger| = {deviation:.3e})")
    return H


def eig_hermitian(H):
    """Eigenvalues in descending order and the matching orthonormal eigenvectors (columns)"""
    H = check_hermitian(H)
    # symmetrize so LAPACK sees an exactly Hermitian input
    w, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    return w[::-1], V[:, ::-1]


def _psd_spectrum(rho):
    w, V = eig_hermitian(rho)
    if w.size and w[-1] < -EIG_CLAMP:
        raise InvalidArgument(f"matrix is not positive semidefinite (eigenvalue {w[-1]:.3e})")
    w = np.where(np.abs(w) <= EIG_CLAMP, 0.0, w)
    return np.clip(w, 0.0, None), V


def mat_power(rho, p):
    """
    rho^p for PSD rho with 0^p = 0.

    p = 0 gives the projector onto the support of rho.
    """
    if p < 0:
        raise InvalidArgument(f"power must be non-negative, got {p}")
    w, V = _psd_spectrum(rho)
    wp = np.zeros_like(w)
    support = w > 0
    wp[support] = w[support] ** p
    return (V * wp) @ V.conj().T


def check_trace(rho, tol=TRACE_TOL):
    tr = np.trace(np.asarray(rho)).real
    if abs(tr - 1.0) > tol:
        raise InvalidArgument(f"density matrix must have unit trace, got {tr:.15f}")
    return tr


def spectrum_entropy(w):
    """-sum w ln w over the last axis, 0 ln 0 = 0; eigenvalues near zero are clamped"""
    w = np.asarray(w, dtype=float)
    if np.any(w < -EIG_CLAMP):
        raise InvalidArgument(f"negative eigenvalue {w.min():.3e} in a density spectrum")
    w = np.where(w <= EIG_CLAMP, 0.0, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(w > 0, -w * np.log(w), 0.0)
    return np.maximum(terms.sum(axis=-1), 0.0)


def von_neumann_entropy(rho):
    """-tr(rho ln rho) in nats"""
    check_trace(rho)
    w, _ = eig_hermitian(rho)
    return float(spectrum_entropy(w))


def purity(rho):
    """tr(rho^2)"""
    rho = check_hermitian(rho)
    return float(np.sum(np.abs(rho) ** 2))


def density_from_vector(psi, normalize=True):
    psi = np.asarray(psi, dtype=complex)
    rho = np.outer(psi, psi.conj())
    if normalize:
        weight = np.vdot(psi, psi).real
        if weight <= 0:
            raise InvalidArgument("cannot form a density matrix from the zero vector")
        rho /= weight
    return rho


def partial_trace(state, keep="A"):
    """
    Reduced 2x2 state of one qubit of a two-qubit system.

    state is a 4-vector or a 4x4 density matrix in the i = 2a + b ordering;
    keep="A" traces out qubit B, keep="B" traces out qubit A.
    """
    state = np.asarray(state, dtype=complex)
    if state.shape == (4,):
        psi = state.reshape(2, 2)
        if keep == "A":
            return psi @ psi.conj().T
        if keep == "B":
            return psi.T @ psi.conj()
    elif state.shape == (4, 4):
        rho = state.reshape(2, 2, 2, 2)
        if keep == "A":
            return np.einsum("ajbj->ab", rho)
        if keep == "B":
            return np.einsum("jajb->ab", rho)
    else:
        raise InvalidArgument(f"expected a 4-vector or 4x4 matrix, got shape {state.shape}")
    raise InvalidArgument(f"keep must be 'A' or 'B', got {keep!r}")
