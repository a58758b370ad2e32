"""
System-bath Hamiltonians and pulse-noise models.

The joint Hamiltonian of a qubit coupled to a bath is stored through its
Pauli components,

    H = I⊗B_I + X⊗B_X + Y⊗B_Y + Z⊗B_Z,

together with the reference gate interval ``tau``. Everything is
dimensionless; only the products ``tau * H`` enter the physics.
"""
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .linalg import (PAULIS, SystemSplit, is_hermitian, lift_system, op_norm,
                     pauli_decompose)

__all__ = ['SystemBathHamiltonian', 'ControlErrorSpec', 'PulseWidthSpec', 'NormInequality',
           'make_rng', 'assemble', 'sample_random', 'unitary_control_error',
           'check_norm_inequality']

_TRACE_ATOL = 1e-12


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """
    Counter-based generator keyed on ``(seed, stream)``.

    The stream index lets every work unit of a sweep draw from its own
    reproducible stream, independent of scheduling order.
    """
    if seed < 0 or stream < 0:
        raise ValueError('seed and stream must be non-negative')
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


@dataclass(frozen=True)
class SystemBathHamiltonian:
    """Pauli-decomposed joint Hamiltonian with its reference interval."""
    b_i: np.ndarray
    b_x: np.ndarray
    b_y: np.ndarray
    b_z: np.ndarray
    tau: float = 1.0

    @property
    def bath_ops(self) -> dict:
        return {'I': self.b_i, 'X': self.b_x, 'Y': self.b_y, 'Z': self.b_z}

    @property
    def bath_dim(self) -> int:
        return self.b_i.shape[0]

    @property
    def split(self) -> SystemSplit:
        return SystemSplit(2, self.bath_dim)

    @property
    def h_b(self) -> np.ndarray:
        return np.kron(PAULIS['I'], self.b_i)

    @property
    def h_sb(self) -> np.ndarray:
        return (np.kron(PAULIS['X'], self.b_x) + np.kron(PAULIS['Y'], self.b_y)
                + np.kron(PAULIS['Z'], self.b_z))

    @property
    def matrix(self) -> np.ndarray:
        """The joint Hamiltonian as a ``2*bath_dim`` square matrix."""
        return self.h_b + self.h_sb

    def phi_b(self) -> float:
        return op_norm(self.tau * self.b_i)

    def phi_sb(self) -> float:
        return op_norm(self.tau * self.h_sb)

    def scaled(self, factor: float) -> 'SystemBathHamiltonian':
        """Same Hamiltonian with every bath operator multiplied by ``factor``."""
        return SystemBathHamiltonian(*(factor * b for b in (self.b_i, self.b_x, self.b_y, self.b_z)),
                                     tau=self.tau)

    def to_dict(self) -> dict:
        def enc(m):
            return [[[float(z.real), float(z.imag)] for z in row] for row in m]
        return {'tau': self.tau, 'bath_dim': self.bath_dim,
                'bath_ops': {a: enc(b) for a, b in self.bath_ops.items()}}

    @classmethod
    def from_dict(cls, doc: dict) -> 'SystemBathHamiltonian':
        def dec(rows):
            return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
        ops = doc['bath_ops']
        return assemble({a: dec(ops[a]) for a in 'IXYZ'}, tau=doc.get('tau', 1.0))


def assemble(bath_ops: dict, tau: float = 1.0) -> SystemBathHamiltonian:
    """
    Validate bath operators and build a :class:`SystemBathHamiltonian`.

    ``bath_ops`` maps ``'I', 'X', 'Y', 'Z'`` to Hermitian bath matrices of a
    common dimension; missing entries are taken as zero. ``B_I`` must be
    traceless (zero-energy convention).
    """
    if tau <= 0:
        raise ValueError('tau must be positive')
    present = [np.asarray(b, dtype=complex) for b in bath_ops.values()]
    if not present:
        raise ValueError('no bath operators given')
    dim = present[0].shape[0]
    ops = {}
    for a in 'IXYZ':
        b = np.asarray(bath_ops.get(a, np.zeros((dim, dim))), dtype=complex)
        if b.shape != (dim, dim):
            raise ValueError(f'B_{a} has shape {b.shape}, expected {(dim, dim)}')
        if not is_hermitian(b):
            raise ValueError(f'B_{a} is not Hermitian')
        ops[a] = b
    if abs(np.trace(ops['I'])) > _TRACE_ATOL * max(1.0, op_norm(ops['I'])):
        raise ValueError('B_I must be traceless')
    return SystemBathHamiltonian(ops['I'], ops['X'], ops['Y'], ops['Z'], tau=float(tau))


def _gaussian_complex(rng, dim):
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def sample_random(phi_b: float, phi_sb: float, bath_dim: int = 2, seed: int = 0,
                  stream: int = 0, tau: float = 1.0) -> SystemBathHamiltonian:
    """
    Draw a random Hamiltonian with prescribed ``||tau H_B||`` and ``||tau H_SB||``.

    For a qubit bath, ``B_I = (phi_b/tau) v·σ`` with ``v`` uniform on the unit
    sphere. For larger baths ``B_I`` is a traceless GUE-like matrix rescaled
    to the requested norm; this extension goes beyond the single-qubit-bath
    recipe. Interaction operators are ``B_i = R_i + R_i^†`` with standard
    complex Gaussian ``R_i``; the interaction is rescaled jointly.
    """
    if phi_b < 0 or phi_sb < 0:
        raise ValueError('norms must be non-negative')
    if bath_dim < 1:
        raise ValueError('bath_dim must be positive')
    if bath_dim == 1 and phi_b > 0:
        raise ValueError('a one-dimensional bath admits only B_I = 0')
    rng = make_rng(seed, stream)
    zero = np.zeros((bath_dim, bath_dim), dtype=complex)

    if phi_b == 0:
        b_i = zero.copy()
    elif bath_dim == 2:
        v = rng.standard_normal(3)
        v /= np.linalg.norm(v)
        b_i = v[0] * PAULIS['X'] + v[1] * PAULIS['Y'] + v[2] * PAULIS['Z']
        b_i = (phi_b / tau) * b_i / op_norm(b_i)
    else:
        r = _gaussian_complex(rng, bath_dim)
        b_i = r + r.conj().T
        b_i -= np.trace(b_i) / bath_dim * np.eye(bath_dim)
        b_i = (phi_b / tau) * b_i / op_norm(b_i)

    if phi_sb == 0:
        b_x, b_y, b_z = zero.copy(), zero.copy(), zero.copy()
    else:
        rs = [_gaussian_complex(rng, bath_dim) for _ in range(3)]
        b_x, b_y, b_z = (r + r.conj().T for r in rs)
        h_sb = (np.kron(PAULIS['X'], b_x) + np.kron(PAULIS['Y'], b_y)
                + np.kron(PAULIS['Z'], b_z))
        scale = phi_sb / (tau * op_norm(h_sb))
        b_x, b_y, b_z = scale * b_x, scale * b_y, scale * b_z

    return SystemBathHamiltonian(b_i, b_x, b_y, b_z, tau=float(tau))


@dataclass(frozen=True)
class PulseWidthSpec:
    """Finite pulse width as the fraction ``delta = tau_P / tau``."""
    delta: float = 0.0

    def __post_init__(self):
        if not 0 <= self.delta < 1:
            raise ValueError(f'delta must lie in [0, 1), got {self.delta}')


@dataclass(frozen=True)
class ControlErrorSpec:
    """
    Gate-control error generators of the noisy X and Z pulses.

    Each generator is either system-only (2x2) or joint (system⊗bath). An
    optional ``gamma_y`` is only used for merged Y pulses; it defaults to
    ``gamma_x``.
    """
    gamma_x: np.ndarray
    gamma_z: np.ndarray
    eta: float
    gamma_y: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError('eta must be non-negative')
        gens = [('gamma_x', self.gamma_x), ('gamma_z', self.gamma_z)]
        if self.gamma_y is not None:
            gens.append(('gamma_y', self.gamma_y))
        for name, g in gens:
            g = np.asarray(g)
            if g.ndim != 2 or g.shape[0] % 2 or not is_hermitian(g):
                raise ValueError(f'{name} must be a Hermitian operator on the qubit (⊗ bath)')
            if op_norm(g) > self.eta * (1 + 1e-12) + 1e-15:
                raise ValueError(f'||{name}|| = {op_norm(g):.3g} exceeds eta = {self.eta:.3g}')
            parts = pauli_decompose(g, SystemSplit.for_matrix(g))
            if np.abs(parts['I']).max() > 1e-12 * max(1.0, self.eta):
                raise ValueError(f'{name} has a pure-bath (system identity) component')

    def lifted(self, bath_dim: int, label: str) -> np.ndarray:
        """Generator for pulse ``label`` as an operator on system⊗bath."""
        g = {'X': self.gamma_x, 'Z': self.gamma_z,
             'Y': self.gamma_x if self.gamma_y is None else self.gamma_y}[label]
        g = np.asarray(g, dtype=complex)
        if g.shape[0] == 2:
            return lift_system(g, bath_dim)
        if g.shape[0] != 2 * bath_dim:
            raise ValueError(f'generator dimension {g.shape[0]} incompatible with bath dim {bath_dim}')
        return g

    @classmethod
    def none(cls) -> 'ControlErrorSpec':
        z = np.zeros((2, 2), dtype=complex)
        return cls(z, z, 0.0)


def unitary_control_error(eta: float, n) -> ControlErrorSpec:
    """Gate-independent unitary error ``Γ_X = Γ_Z = eta n·σ`` on the system."""
    n = np.asarray(n, dtype=float)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1) > 1e-12:
        raise ValueError('n must be a real unit 3-vector')
    if eta < 0:
        raise ValueError('eta must be non-negative')
    g = eta * (n[0] * PAULIS['X'] + n[1] * PAULIS['Y'] + n[2] * PAULIS['Z'])
    return ControlErrorSpec(g, g.copy(), float(eta))


class NormInequality(NamedTuple):
    holds: bool
    max_single: float
    joint: float


def check_norm_inequality(b_x: np.ndarray, b_y: np.ndarray, b_z: np.ndarray,
                          slack: float = 1e-12) -> NormInequality:
    """Compare ``max_i ||B_i||`` with ``||Σ_i σ_i⊗B_i||``."""
    max_single = max(op_norm(b) for b in (b_x, b_y, b_z))
    joint = op_norm(np.kron(PAULIS['X'], b_x) + np.kron(PAULIS['Y'], b_y)
                    + np.kron(PAULIS['Z'], b_z))
    return NormInequality(max_single <= joint + slack * max(1.0, joint), max_single, joint)
