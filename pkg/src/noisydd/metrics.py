"""
Error phases, effective system channels and the infidelity measure.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .linalg import (SystemSplit, BranchAmbiguity, is_hermitian, log_unitary, op_norm,
                     partial_trace_system)
from .model import make_rng

__all__ = ['EffectiveGenerator', 'ChannelSample', 'effective_generator', 'split_generator',
           'noise_channel_apply', 'infidelity', 'infidelities', 'haar_states',
           'worst_case_infidelity', 'maximally_mixed']


@dataclass(frozen=True)
class EffectiveGenerator:
    omega: np.ndarray
    omega_b: np.ndarray
    omega_sb: np.ndarray
    phi_b: float
    phi_sb: float


def split_generator(omega: np.ndarray, split: SystemSplit) -> EffectiveGenerator:
    """Split a Hermitian generator into bath-only and interaction parts."""
    ds = split.system_dim
    omega_b = np.kron(np.eye(ds), partial_trace_system(omega, split)) / ds
    omega_sb = omega - omega_b
    return EffectiveGenerator(omega, omega_b, omega_sb, op_norm(omega_b), op_norm(omega_sb))


def effective_generator(U: np.ndarray, split: Optional[SystemSplit] = None,
                        branch_guard: float = 1e-6) -> EffectiveGenerator:
    """
    Effective dimensionless Hamiltonian of a joint unitary and its error phases.

    Raises
    ------
    BranchAmbiguity
        When ``U`` has an eigenphase near ±π; for long CDD sequences use the
        bounds and recurrences of :mod:`noisydd.analysis` instead.
    """
    split = split or SystemSplit.for_matrix(U)
    try:
        omega = log_unitary(U, branch_guard)
    except BranchAmbiguity as exc:
        raise BranchAmbiguity(f'{exc}; error phases are undefined here, fall back to '
                              'recurrence-based analysis') from None
    return split_generator(omega, split)


def maximally_mixed(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex) / dim


def _check_density(rho, name='density matrix'):
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or not is_hermitian(rho):
        raise ValueError(f'{name} must be a Hermitian square matrix')
    if abs(np.trace(rho) - 1) > 1e-10:
        raise ValueError(f'{name} must have unit trace')
    if np.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError(f'{name} must be positive semidefinite')
    return rho


@dataclass(frozen=True)
class ChannelSample:
    """System channel ``ρ ↦ tr_B[U (ρ⊗ρ_B) U†]`` of a joint unitary."""
    U: np.ndarray
    rho_b: np.ndarray = field(default=None)
    system_dim: int = 2

    def __post_init__(self):
        d = self.U.shape[0]
        if d % self.system_dim:
            raise ValueError('unitary dimension incompatible with the system dimension')
        if self.rho_b is None:
            object.__setattr__(self, 'rho_b', maximally_mixed(d // self.system_dim))
        rho_b = _check_density(self.rho_b, 'bath state')
        if rho_b.shape[0] * self.system_dim != d:
            raise ValueError('bath state dimension does not match the unitary')

    @property
    def split(self) -> SystemSplit:
        return SystemSplit(self.system_dim, self.rho_b.shape[0])


def noise_channel_apply(c: ChannelSample, rho_s: np.ndarray) -> np.ndarray:
    rho_s = _check_density(rho_s, 'system state')
    ds, db = c.split.system_dim, c.split.bath_dim
    if rho_s.shape[0] != ds:
        raise ValueError('system state dimension mismatch')
    out = c.U @ np.kron(rho_s, c.rho_b) @ c.U.conj().T
    return np.einsum('ijkj->ik', out.reshape(ds, db, ds, db))


def infidelities(c: ChannelSample, states: np.ndarray) -> np.ndarray:
    r"""
    Vectorized :math:`\sqrt{1-\langle\psi|\mathcal N(\psi)|\psi\rangle}`.

    ``states`` has shape ``(m, system_dim)``, rows normalized.
    """
    ds, db = c.split.system_dim, c.split.bath_dim
    psi = np.atleast_2d(states)
    A = c.U.reshape(ds, db, ds, db)
    # M[m, b', b] = <psi_m, b'| U |psi_m, b>
    M = np.einsum('ms,sxty,mt->mxy', psi.conj(), A, psi)
    fid = np.einsum('mxy,yz,mxz->m', M, c.rho_b, M.conj()).real
    return np.sqrt(np.clip(1 - fid, 0, 1))


def infidelity(c: ChannelSample, psi: np.ndarray) -> float:
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError('state must be normalized')
    return float(infidelities(c, psi[None, :])[0])


def haar_states(rng: np.random.Generator, count: int, dim: int = 2) -> np.ndarray:
    v = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def worst_case_infidelity(sampler: Callable[[int], ChannelSample], n_samples: int = 100,
                          n_states: int = 100, seed: int = 0) -> float:
    """
    Sampled maximum of the infidelity over channels and pure states.

    Parameters
    ----------
    sampler : callable
        ``sampler(k)`` returns the ``k``-th channel of the ensemble; it must
        be deterministic in ``k``.
    n_samples, n_states : int
        Number of channel draws and of Haar-random states per channel.
    seed : int
        Seed for the state draws; the ``k``-th channel uses stream ``k``.
    """
    if n_samples * n_states < 1:
        raise ValueError('need at least one sample')
    worst = 0.0
    for k in range(n_samples):
        states = haar_states(make_rng(seed, k), n_states)
        worst = max(worst, float(infidelities(sampler(k), states).max()))
    return worst
