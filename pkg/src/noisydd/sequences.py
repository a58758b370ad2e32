"""
PDD and concatenated DD schedules and their exact propagation.

A schedule is a list of *slots*. Every slot is one free-evolution interval
followed by the pulses fired at its end, in time order. CDD recursion
boundaries put several pulses into one slot (e.g. inner Z followed by outer
X); these stay separate gates unless ``merge_adjacent_pulses`` is set, in
which case each slot holds a single Pauli (possibly ``'I'``, no pulse).
A level-n schedule always has ``4**n`` slots.
"""
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Tuple

import numpy as np

from .linalg import PAULIS, exp_generator
from .model import ControlErrorSpec, PulseWidthSpec, SystemBathHamiltonian

__all__ = ['Setting', 'DDSchedule', 'NoisyGateSet', 'PDD_PULSES', 'cdd_schedule',
           'pulse_unitary', 'propagate_ideal', 'propagate_noisy', 'free_evolution']

# time order: the first X fires after the first free interval
PDD_PULSES = ('X', 'Z', 'X', 'Z')


class Setting(str, Enum):
    COMPUTATIONAL = 'computational'
    MEMORY = 'memory'


@dataclass(frozen=True)
class DDSchedule:
    slots: Tuple[Tuple[str, ...], ...]
    interval: float
    setting: Setting
    level: int
    merged: bool = False

    @property
    def pulses(self) -> Tuple[str, ...]:
        """Flattened time-ordered pulse labels (identity slots omitted)."""
        return tuple(p for slot in self.slots for p in slot if p != 'I')

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def total_time(self) -> float:
        return self.n_slots * self.interval

    def dump(self) -> str:
        """Text dump, one ``t<TAB>label`` line per pulse."""
        lines = []
        for k, slot in enumerate(self.slots, start=1):
            t = k * self.interval
            lines.extend(f'{t:.12g}\t{p}' for p in slot if p != 'I')
        return '\n'.join(lines) + ('\n' if lines else '')


def _merge_slot(slot):
    if not slot:
        return ('I',)
    prod = reduce(lambda acc, p: PAULIS[p] @ acc, slot, np.eye(2, dtype=complex))
    for a, s in PAULIS.items():
        if abs(abs(np.trace(s @ prod)) - 2) < 1e-12:
            return (a,)
    raise AssertionError('product of Paulis is not a Pauli')


def _cdd_slots(n):
    slots = [()]
    for _ in range(n):
        new = []
        for p in PDD_PULSES:
            block = list(slots)
            block[-1] = block[-1] + (p,)
            new.extend(block)
        slots = new
    return slots


def cdd_schedule(n: int, setting='computational', tau_or_T: float = 1.0,
                 merge_adjacent_pulses: bool = False) -> DDSchedule:
    """
    Flattened level-``n`` CDD schedule (``n=0``: bare evolution, ``n=1``: PDD).

    In the computational setting ``tau_or_T`` is the fixed pulse interval;
    in the memory setting it is the total time, sliced into ``4**n`` equal
    intervals.
    """
    if n < 0:
        raise ValueError('concatenation level must be non-negative')
    if tau_or_T <= 0:
        raise ValueError('time must be positive')
    setting = Setting(setting)
    slots = _cdd_slots(n)
    if merge_adjacent_pulses:
        slots = [_merge_slot(s) for s in slots]
        if n == 0:
            slots = [()]
    interval = tau_or_T if setting is Setting.COMPUTATIONAL else tau_or_T / 4 ** n
    return DDSchedule(tuple(slots), float(interval), setting, n, merge_adjacent_pulses)


@dataclass(frozen=True)
class NoisyGateSet:
    ctrl: ControlErrorSpec = field(default_factory=ControlErrorSpec.none)
    width: PulseWidthSpec = field(default_factory=PulseWidthSpec)


def free_evolution(h: SystemBathHamiltonian, t: float) -> np.ndarray:
    return exp_generator(t * h.matrix)


def pulse_unitary(label: str, h: SystemBathHamiltonian, gates: NoisyGateSet) -> np.ndarray:
    r"""
    Noisy pulse :math:`e^{-i\tau_P(H_\sigma + H)} e^{-i\Gamma_\sigma}`.

    With ``tau_P = delta * h.tau``; for zero width the rotation factor is the
    bare Pauli ``σ ⊗ I``.
    """
    db = h.bath_dim
    sigma = np.kron(PAULIS[label], np.eye(db))
    tau_p = gates.width.delta * h.tau
    rot = sigma if tau_p == 0 else exp_generator(0.5 * np.pi * sigma + tau_p * h.matrix)
    gamma = gates.ctrl.lifted(db, label)
    if not gamma.any():
        return rot
    return rot @ exp_generator(gamma)


def _reference_phase(schedule, finite_width):
    """Scalar c with (product of ideal pulse rotations) = c·I."""
    prod = np.eye(2, dtype=complex)
    for slot in schedule.slots:
        for p in slot:
            if p == 'I':
                continue
            prod = (-1j if finite_width else 1) * PAULIS[p] @ prod
    return prod[0, 0]


def propagate_ideal(s: DDSchedule, h: SystemBathHamiltonian) -> np.ndarray:
    """
    Exact joint unitary of ``s`` with instantaneous ideal Pauli pulses.

    The global phase of the ideal pulse product (±1 or ±i) is divided out,
    so a perfectly decoupling sequence returns a unitary close to identity.
    """
    return propagate_noisy(s, h, NoisyGateSet())


def propagate_noisy(s: DDSchedule, h: SystemBathHamiltonian, gates: NoisyGateSet) -> np.ndarray:
    """
    Exact joint unitary of ``s`` with noisy, finite-width pulses.

    Each pulse occupies ``tau_P = delta * h.tau`` of its slot, so a slot with
    ``k`` pulses evolves freely for ``interval - k * tau_P``.
    """
    tau_p = gates.width.delta * h.tau
    pulses = {p: pulse_unitary(p, h, gates) for p in 'XYZ'}
    cache = {}
    U = np.eye(2 * h.bath_dim, dtype=complex)
    for slot in s.slots:
        k = sum(p != 'I' for p in slot)
        t_free = s.interval - k * tau_p
        if t_free < 0 or (k and tau_p >= s.interval):
            raise ValueError(f'pulse width {tau_p:.3g} does not fit the interval {s.interval:.3g}')
        if t_free not in cache:
            cache[t_free] = free_evolution(h, t_free)
        U = cache[t_free] @ U
        for p in slot:
            if p != 'I':
                U = pulses[p] @ U
    return U / _reference_phase(s, tau_p > 0)
