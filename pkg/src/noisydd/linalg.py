"""
Dense complex matrix kernel.

All operators are plain ``numpy`` arrays of dtype ``complex``. Joint
system-bath operators follow the convention that the system factor comes
first in every tensor product, ``kron(system, bath)``.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

__all__ = ['PAULIS', 'PAULI_LABELS', 'I2', 'X', 'Y', 'Z', 'SystemSplit', 'BranchAmbiguity',
           'DomainError', 'op_norm', 'is_hermitian', 'hermitian_part', 'commutator',
           'anticommutator', 'exp_generator', 'log_unitary', 'partial_trace_system',
           'partial_trace_bath', 'pauli_decompose', 'pauli_reconstruct', 'lift_system']

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)

PAULI_LABELS = ('I', 'X', 'Y', 'Z')
PAULIS = {'I': I2, 'X': X, 'Y': Y, 'Z': Z}

HERMITIAN_RTOL = 1e-12


class BranchAmbiguity(ValueError):
    """Matrix logarithm requested too close to the branch cut at ±pi."""


class DomainError(ValueError):
    """A closed-form expression is evaluated outside its domain of validity."""


@dataclass(frozen=True)
class SystemSplit:
    """Factorization of a joint Hilbert space, system factor first."""
    system_dim: int = 2
    bath_dim: int = 2

    def __post_init__(self):
        if self.system_dim < 1 or self.bath_dim < 1:
            raise ValueError('dimensions must be positive')

    @property
    def total_dim(self) -> int:
        return self.system_dim * self.bath_dim

    @classmethod
    def for_matrix(cls, matrix: np.ndarray, system_dim: int = 2) -> 'SystemSplit':
        d = matrix.shape[0]
        if d % system_dim:
            raise ValueError(f'dimension {d} is not a multiple of system dimension {system_dim}')
        return cls(system_dim, d // system_dim)


def op_norm(A: np.ndarray) -> float:
    """Operator norm, i.e. the largest singular value of ``A``."""
    A = np.asarray(A)
    if A.size == 0:
        raise ValueError('operator norm of an empty matrix')
    return float(np.linalg.norm(A, 2))


def is_hermitian(A: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = max(1.0, float(np.abs(A).max(initial=0.0)))
    return float(np.abs(A - A.conj().T).max(initial=0.0)) < rtol * scale


def hermitian_part(A: np.ndarray) -> np.ndarray:
    return 0.5 * (A + A.conj().T)


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def anticommutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B + B @ A


def _require_hermitian(A, name='generator'):
    if not is_hermitian(A):
        raise ValueError(f'{name} is not Hermitian')


def exp_generator(omega: np.ndarray) -> np.ndarray:
    r"""
    Unitary :math:`e^{-i\Omega}` generated by a Hermitian ``omega``.

    Computed through the spectral decomposition of ``omega``, so the result
    is unitary to machine precision irrespective of the norm of ``omega``.
    """
    omega = np.asarray(omega, dtype=complex)
    _require_hermitian(omega)
    evals, evecs = np.linalg.eigh(hermitian_part(omega))
    return (evecs * np.exp(-1j * evals)) @ evecs.conj().T


def log_unitary(U: np.ndarray, branch_guard: float = 1e-6) -> np.ndarray:
    r"""
    Principal Hermitian generator :math:`\Omega = i\log U`.

    Parameters
    ----------
    U : ndarray
        Unitary matrix.
    branch_guard : float
        Minimal allowed distance of every eigenphase of ``U`` from the
        branch cut at :math:`\pm\pi`.

    Returns
    -------
    omega : ndarray
        Hermitian matrix with spectrum in :math:`(-\pi, \pi)` such that
        ``exp_generator(omega) == U``.

    Raises
    ------
    BranchAmbiguity
        If an eigenphase lies within ``branch_guard`` of :math:`\pm\pi`.
    """
    U = np.asarray(U, dtype=complex)
    d = U.shape[0]
    if U.ndim != 2 or U.shape[1] != d:
        raise ValueError('log_unitary needs a square matrix')
    if np.abs(U.conj().T @ U - np.eye(d)).max() > 1e-8:
        raise ValueError('matrix is not unitary')
    # complex Schur form of a normal matrix is diagonal up to rounding
    T, Q = sla.schur(U, output='complex')
    phases = np.angle(np.diag(T))
    gap = np.pi - np.abs(phases).max()
    if gap < branch_guard:
        raise BranchAmbiguity(
            f'eigenphase within {gap:.3g} of the branch cut (guard {branch_guard:.3g}); '
            'reduce the evolution time per generator or use a recurrence-based estimate')
    omega = (Q * -phases) @ Q.conj().T
    return hermitian_part(omega)


def partial_trace_system(M: np.ndarray, split: SystemSplit) -> np.ndarray:
    """Trace out the system factor, leaving a bath operator."""
    M = np.asarray(M)
    if M.shape != (split.total_dim, split.total_dim):
        raise ValueError(f'matrix shape {M.shape} does not match {split}')
    ds, db = split.system_dim, split.bath_dim
    return np.einsum('ijik->jk', M.reshape(ds, db, ds, db))


def partial_trace_bath(M: np.ndarray, split: SystemSplit) -> np.ndarray:
    """Trace out the bath factor, leaving a system operator."""
    M = np.asarray(M)
    if M.shape != (split.total_dim, split.total_dim):
        raise ValueError(f'matrix shape {M.shape} does not match {split}')
    ds, db = split.system_dim, split.bath_dim
    return np.einsum('ijkj->ik', M.reshape(ds, db, ds, db))


def pauli_decompose(M: np.ndarray, split: SystemSplit) -> dict:
    r"""
    Write ``M`` as :math:`\sum_\alpha \sigma_\alpha\otimes M_\alpha`.

    Returns a dict mapping ``'I', 'X', 'Y', 'Z'`` to the bath operators
    :math:`M_\alpha = \tfrac12 \mathrm{tr}_S[(\sigma_\alpha\otimes I) M]`.
    """
    if split.system_dim != 2:
        raise ValueError('Pauli decomposition requires a qubit system')
    M = np.asarray(M)
    if M.shape != (split.total_dim, split.total_dim):
        raise ValueError(f'matrix shape {M.shape} does not match {split}')
    T = M.reshape(2, split.bath_dim, 2, split.bath_dim)
    return {a: 0.5 * np.einsum('ki,ijkl->jl', PAULIS[a], T) for a in PAULI_LABELS}


def pauli_reconstruct(parts: dict) -> np.ndarray:
    return sum(np.kron(PAULIS[a], parts[a]) for a in PAULI_LABELS if a in parts)


def lift_system(op: np.ndarray, bath_dim: int) -> np.ndarray:
    """Embed a system-only operator as ``op ⊗ I_bath``."""
    return np.kron(op, np.eye(bath_dim, dtype=complex))
