"""
Breakeven conditions, CDD level sweeps, the CDD estimator and the noisy
CDD recurrences.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .linalg import (I2, X, Y, Z, BranchAmbiguity, DomainError, anticommutator as acomm,
                     commutator as comm, exp_generator, hermitian_part)
from .metrics import (ChannelSample, EffectiveGenerator, effective_generator, haar_states,
                      infidelities, split_generator)
from .model import SystemBathHamiltonian, make_rng, sample_random, unitary_control_error
from .reporting import SweepReport
from .sequences import NoisyGateSet, Setting, cdd_schedule, propagate_noisy

__all__ = ['BreakevenVariant', 'BreakevenResult', 'CddTrace', 'RecurrenceResult',
           'analytic_breakeven', 'breakeven_map', 'region_cells', 'cdd_bounds', 'cdd_nmax',
           'exact_log_feasible', 'cdd_sweep_exact', 'cdd_estimator', 'cdd_estimator_update',
           'noisy_cdd_recurrence', 'memory_closed_form', 'recurrence_max_level']

BRANCH_MARGIN = 0.1


class BreakevenVariant(str, Enum):
    IDEAL_PDD = 'ideal_pdd'
    NOISY_GENERAL = 'noisy_general'
    FINITE_WIDTH_ONLY = 'finite_width_only'
    CONTROL_ONLY = 'control_only'
    UNITARY_ERROR = 'unitary_error'


@dataclass(frozen=True)
class BreakevenResult:
    lhs: Optional[float] = None
    rhs: Optional[float] = None
    satisfied: Optional[bool] = None
    eta_max: Optional[float] = None


def analytic_breakeven(variant, phi_b: float = 0.0, phi_sb: float = 0.0, eta: float = 0.0,
                       delta: float = 0.0, form: str = 'standard') -> BreakevenResult:
    """
    Sufficient PDD breakeven conditions in the computational setting.

    For ``unitary_error`` the result carries ``eta_max``, the largest
    tolerable strength of a gate-independent unitary error; it is negative
    when no breakeven exists. The default ``form='standard'`` evaluates
    ``sqrt(phi_SB/2) [1 - 4(3 phi_B - phi_SB)]^(-1/2) - 2 phi_SB``;
    ``form='quadratic'`` instead solves the quadratic error-phase bound
    ``2(eta + 2 phi_SB)^2 <= phi_SB [1 - 4(3 phi_B - phi_SB)]`` for eta,
    which puts the bracket under a positive square root.
    """
    v = BreakevenVariant(variant)
    if v is BreakevenVariant.IDEAL_PDD:
        lhs, rhs = 12 * phi_b + 4 * phi_sb, 1.0
    elif v is BreakevenVariant.NOISY_GENERAL:
        lhs, rhs = (8 / math.pi) * phi_sb * delta + 4 * eta, phi_sb
    elif v is BreakevenVariant.FINITE_WIDTH_ONLY:
        lhs, rhs = delta, math.pi / 8
    elif v is BreakevenVariant.CONTROL_ONLY:
        lhs, rhs = eta, phi_sb / 4
        return BreakevenResult(lhs, rhs, lhs <= rhs, eta_max=rhs)
    else:
        bracket = 1 - 4 * (3 * phi_b - phi_sb)
        if bracket <= 0:
            raise DomainError('1 - 4(3 phi_B - phi_SB) must be positive')
        if form == 'quadratic':
            eta_max = math.sqrt(phi_sb / 2 * bracket) - 2 * phi_sb
        elif form == 'standard':
            eta_max = math.sqrt(phi_sb / 2) / math.sqrt(bracket) - 2 * phi_sb
        else:
            raise ValueError(f'unknown form {form!r}')
        return BreakevenResult(eta, eta_max, eta <= eta_max, eta_max)
    return BreakevenResult(lhs, rhs, lhs <= rhs)


# --- sampled breakeven maps ------------------------------------------------

def _cell_error_phase(hams, gates, schedule):
    ratios = []
    for h in hams:
        U = propagate_noisy(schedule, h, gates)
        ratios.append(effective_generator(U, h.split).phi_sb / h.phi_sb())
    return ratios


def _cell_infidelity(hams, gates, schedule, seed, stream0, n_states):
    worst_dd = worst_bare = 0.0
    for k, h in enumerate(hams):
        states = haar_states(make_rng(seed, stream0 + k), n_states)
        U_dd = propagate_noisy(schedule, h, gates)
        U_bare = exp_generator(h.tau * h.matrix)
        worst_dd = max(worst_dd, float(infidelities(ChannelSample(U_dd), states).max()))
        worst_bare = max(worst_bare, float(infidelities(ChannelSample(U_bare), states).max()))
    return worst_dd, worst_bare


def breakeven_map(phi_b_grid: Sequence[float], phi_sb_grid: Sequence[float], eta: float,
                  n=(1 / math.sqrt(2), 0.0, 1 / math.sqrt(2)), measure: str = 'error_phase',
                  samples_per_cell: int = 20, seed: int = 0, n_states: int = 100,
                  bath_dim: int = 2, workers: int = 1) -> SweepReport:
    """
    Ratio of the PDD metric over ``4 tau`` to the bare metric over ``tau``.

    Every cell draws ``samples_per_cell`` random Hamiltonians from stream
    ``cell * samples_per_cell + k`` of ``seed``, so maps for different
    ``eta`` share the same Hamiltonians. The PDD pulses carry the
    gate-independent unitary error ``eta n·σ`` and have zero width.

    ``measure='error_phase'`` records the median of ``Phi_SB / phi_SB`` as
    ``error_phase`` plus ``error_phase:min`` and ``error_phase:max``;
    ``measure='infidelity'`` records the ratio of sampled worst-case
    infidelities (``n_states`` Haar states per Hamiltonian, bath maximally
    mixed). Cells where a logarithm hits the branch cut are flagged
    ``invalid``; cells with ``phi_SB = 0`` are flagged ``degenerate``.
    """
    if samples_per_cell < 1 or n_states < 1:
        raise ValueError('sample counts must be positive')
    if measure not in ('error_phase', 'infidelity'):
        raise ValueError(f'unknown measure {measure!r}')
    gates = NoisyGateSet(unitary_control_error(eta, n))
    schedule = cdd_schedule(1, 'computational', 1.0)
    phi_b_grid = [float(v) for v in phi_b_grid]
    phi_sb_grid = [float(v) for v in phi_sb_grid]
    cells = [(i, j) for i in range(len(phi_b_grid)) for j in range(len(phi_sb_grid))]

    def work(cell):
        i, j = cell
        pb, ps = phi_b_grid[i], phi_sb_grid[j]
        idx = i * len(phi_sb_grid) + j
        stream0 = idx * samples_per_cell
        if ps == 0:
            return [(measure, math.nan, 'degenerate')]
        hams = [sample_random(pb, ps, bath_dim, seed, stream0 + k)
                for k in range(samples_per_cell)]
        if measure == 'error_phase':
            try:
                r = _cell_error_phase(hams, gates, schedule)
            except BranchAmbiguity:
                return [(m, math.nan, 'invalid') for m in
                        ('error_phase', 'error_phase:min', 'error_phase:max')]
            return [('error_phase', float(np.median(r)), 'ok'),
                    ('error_phase:min', float(np.min(r)), 'ok'),
                    ('error_phase:max', float(np.max(r)), 'ok')]
        dd, bare = _cell_infidelity(hams, gates, schedule, seed, stream0, n_states)
        if bare == 0:
            return [('infidelity', math.nan, 'degenerate')]
        return [('infidelity', dd / bare, 'ok')]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(work, cells))
    else:
        results = [work(c) for c in cells]

    config = {'command': 'breakeven', 'eta': float(eta), 'n': [float(c) for c in n],
              'measure': measure, 'samples_per_cell': samples_per_cell,
              'n_states': n_states, 'bath_dim': bath_dim, 'statistic': 'median'}
    report = SweepReport(config, seed, {'phiB': phi_b_grid, 'phiSB': phi_sb_grid})
    for (i, j), entries in zip(cells, results):
        for m, value, flag in entries:
            report.add(phi_b_grid[i], phi_sb_grid[j], eta, 1, m, value, flag)
    return report


def region_cells(report: SweepReport, measure: str, eta: Optional[float] = None) -> set:
    """Grid points ``(phiB, phiSB)`` whose ratio is below one."""
    return {(r['phiB'], r['phiSB']) for r in report.select(measure, eta)
            if r['flag'] == 'ok' and r['value'] < 1}


# --- CDD level analysis ------------------------------------------------------

@dataclass(frozen=True)
class CddTrace:
    level: int
    phi_b: float
    phi_sb: float
    source: str
    flag: str = 'ok'


def cdd_bounds(regime: str, phi_b: float, phi_sb: float, n: int) -> float:
    """
    Leading-order upper bound on the CDD``n`` error phase.

    ``generic``: computational setting with phi_B ≳ phi_SB; ``BI_zero``:
    computational setting with vanishing bath Hamiltonian; ``memory``:
    fixed total time.
    """
    if n < 0:
        raise ValueError('level must be non-negative')
    if n == 0:
        return phi_sb
    if regime == 'generic':
        return 2.0 ** ((n + 1) ** 2) * phi_b ** n * phi_sb
    if regime == 'memory':
        return 2.0 ** (-n * n) * phi_b ** n * phi_sb
    if regime == 'BI_zero':
        return (8 / 3) ** (n - 1) * 2.0 ** (n * n + 1) * phi_sb ** (3 * n - 1)
    raise ValueError(f'unknown regime {regime!r}')


def cdd_nmax(regime: str, phi: float) -> Optional[int]:
    """
    Maximal useful concatenation level.

    ``phi`` is phi_B for ``generic`` and phi_SB for ``BI_zero``. Values
    ``<= 0`` mean not even PDD helps. The memory setting has no maximal
    level and returns ``None``.
    """
    if regime == 'memory':
        return None
    if phi <= 0:
        raise ValueError('phi must be positive')
    log4 = math.log(phi, 4)
    if regime == 'generic':
        return int(math.ceil(-log4 - 1.5))
    if regime == 'BI_zero':
        return int(math.ceil(-3 * log4 + math.log(3, 4) - 2.5))
    raise ValueError(f'unknown regime {regime!r}')


def exact_log_feasible(n: int, phi_b: float, phi_sb: float, setting='computational') -> bool:
    """Whether the total generator norm estimate stays clear of the branch cut."""
    scale = 4 ** n if Setting(setting) is Setting.COMPUTATIONAL else 1
    return scale * (phi_b + phi_sb) < math.pi - BRANCH_MARGIN


def cdd_sweep_exact(h: SystemBathHamiltonian, n_max: int, setting='computational',
                    gates: Optional[NoisyGateSet] = None,
                    branch_guard: float = 1e-6) -> List[CddTrace]:
    """
    Error phases of exactly propagated CDD``n``, ``n = 0..n_max``.

    Levels whose generator would reach the branch cut are served by
    :func:`cdd_bounds` instead and flagged ``branch_guard``.
    """
    setting = Setting(setting)
    gates = gates or NoisyGateSet()
    pb, ps = h.phi_b(), h.phi_sb()
    traces = []
    for n in range(n_max + 1):
        fallback = None
        if exact_log_feasible(n, pb, ps, setting):
            s = cdd_schedule(n, setting, h.tau)
            try:
                eg = effective_generator(propagate_noisy(s, h, gates), h.split, branch_guard)
                traces.append(CddTrace(n, eg.phi_b, eg.phi_sb, 'exact_log'))
                continue
            except BranchAmbiguity:
                fallback = 'branch_ambiguity'
        regime = 'generic' if setting is Setting.COMPUTATIONAL else 'memory'
        bath = 4 ** n * pb if setting is Setting.COMPUTATIONAL else pb
        traces.append(CddTrace(n, bath, cdd_bounds(regime, pb, ps, n), 'bound',
                               fallback or 'branch_guard'))
    return traces


def _ad_power(a, b, k):
    for _ in range(k):
        b = comm(a, b)
    return b


def cdd_estimator(h: SystemBathHamiltonian, n: int, setting='computational',
                  regime: str = 'generic') -> EffectiveGenerator:
    r"""
    Leading-order estimate of the CDD``n`` effective generator.

    ``generic``::

        I ⊗ 4^n τ B_I + X ⊗ (-i)^n 2^{n(n+1)} τ^{n+1} ad_{B_I}^n(B_X)
                      + Y ⊗ (-i)^n 2^{n^2} τ^{n+1} ad_{B_I}^{n-1}([B_I,B_Y] - i{B_X,B_Z})

    In the memory setting ``τ`` is replaced by ``τ/4^n``. ``BI_zero`` starts
    the recursion from the level-1 operators generated by the third-order
    PDD term and ignores ``B_I``.
    """
    if n < 1:
        raise ValueError('estimator needs n >= 1')
    setting = Setting(setting)
    t = h.tau if setting is Setting.COMPUTATIONAL else h.tau / 4 ** n
    bi, bx, by, bz = h.b_i, h.b_x, h.b_y, h.b_z
    if regime == 'generic':
        om = (np.kron(I2, 4 ** n * t * bi)
              + np.kron(X, (-1j) ** n * 2.0 ** (n * (n + 1)) * t ** (n + 1)
                        * _ad_power(bi, bx, n))
              + np.kron(Y, (-1j) ** n * 2.0 ** (n * n) * t ** (n + 1)
                        * _ad_power(bi, comm(bi, by) - 1j * acomm(bx, bz), n - 1)))
    elif regime == 'BI_zero':
        if setting is not Setting.COMPUTATIONAL:
            raise ValueError('the B_I = 0 estimator is for the computational setting')
        b10 = 1j * (2 / 3) * t ** 3 * (comm(bz, acomm(bx, by)) - comm(by, acomm(bx, bz)))
        b12 = -2 * t ** 2 * acomm(bx, bz)
        if n == 1:
            b13 = 2 * t ** 3 * acomm(bx, acomm(bx, bz))
            om = np.kron(I2, b10) + np.kron(Y, b12) + np.kron(Z, b13)
        else:
            om = (np.kron(I2, 4 ** (n - 1) * b10)
                  + np.kron(Y, (-1j) ** (n - 1) * 2.0 ** ((n - 1) ** 2)
                            * _ad_power(b10, b12, n - 1)))
    else:
        raise ValueError(f'unknown regime {regime!r}')
    return split_generator(hermitian_part(om), h.split)


def cdd_estimator_update(h: SystemBathHamiltonian, n: int) -> dict:
    """
    Dimensionless bath operators ``τB_{n,α}`` from iterating the truncated
    decoupling map (first two Magnus terms), computational setting.

    Level 0 -> 1 uses the full second-order PDD term; from level 1 on,
    ``B_Z`` vanishes and ``τB_{n+1,Y} = -2i[τB_{n,I}, τB_{n,Y}]``.
    """
    b = {a: h.tau * op for a, op in h.bath_ops.items()}
    for _ in range(n):
        b = {'I': 4 * b['I'],
             'X': -4j * comm(b['I'], b['X']),
             'Y': -2j * comm(b['I'], b['Y']) - 2 * acomm(b['X'], b['Z']),
             'Z': np.zeros_like(b['Z'])}
    return b


# --- noisy CDD recurrences ---------------------------------------------------

class RecurrenceResult(NamedTuple):
    traces: List[CddTrace]
    plateau: Optional[float]


def noisy_cdd_recurrence(phi_b: float, phi_sb: float, eta: float, n_max: int,
                         setting='computational') -> RecurrenceResult:
    """
    Iterate the leading-order error-phase recurrences of noisy CDD.

    Computational: ``Φ_B,n = 4 Φ_B,n-1`` and
    ``Φ_SB,n = 12 Φ_B,n-1 Φ_SB,n-1 + 4 Φ_SB,n-1^2 + 4η``.
    Memory: ``Φ_B,n = φ_B`` and ``Φ_SB,n = φ_B Φ_SB,n-1 / 2 + 4η``, whose
    fixed point ``4η / (1 - φ_B/2)`` is returned as ``plateau``.
    """
    if min(phi_b, phi_sb, eta) < 0 or n_max < 0:
        raise ValueError('parameters must be non-negative')
    setting = Setting(setting)
    pb, ps = float(phi_b), float(phi_sb)
    traces = [CddTrace(0, pb, ps, 'recurrence')]
    for n in range(1, n_max + 1):
        if setting is Setting.COMPUTATIONAL:
            pb, ps = 4 * pb, 12 * pb * ps + 4 * ps * ps + 4 * eta
        else:
            ps = 0.5 * phi_b * ps + 4 * eta
        traces.append(CddTrace(n, pb, ps, 'recurrence'))
    plateau = 4 * eta / (1 - phi_b / 2) if setting is Setting.MEMORY else None
    return RecurrenceResult(traces, plateau)


def memory_closed_form(phi_b: float, phi_sb: float, eta: float, n: int) -> float:
    return (phi_b / 2) ** n * phi_sb + 4 * eta / (1 - phi_b / 2)


def recurrence_max_level(traces: Sequence[CddTrace]) -> int:
    """Last level that still improves on its predecessor; 0 if none does."""
    best = 0
    for prev, cur in zip(traces, traces[1:]):
        if cur.phi_sb < prev.phi_sb:
            best = cur.level
        else:
            break
    return best
