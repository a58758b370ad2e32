r"""
Magnus expansion for piecewise-constant evolution.

For :math:`U = e^{-iO_K}\cdots e^{-iO_1}` the effective generator
:math:`\Omega` with :math:`U=e^{-i\Omega}` is expanded as
:math:`\Omega^{(1)}+\Omega^{(2)}+\Omega^{(3)}+\ldots`. Segment lists are
given in time order: ``segments[0]`` acts first.

The module also carries closed-form leading terms for ideal and noisy PDD
and the pulse-error generators ``K_0..K_3`` of noisy PDD.
"""
from typing import List, NamedTuple, Sequence

import numpy as np

from .linalg import (I2, PAULIS, X, Y, Z, anticommutator as acomm, commutator as comm,
                     exp_generator, hermitian_part, lift_system, log_unitary, op_norm,
                     BranchAmbiguity)
from .model import ControlErrorSpec, PulseWidthSpec, SystemBathHamiltonian
from .sequences import NoisyGateSet, pulse_unitary

__all__ = ['MAGNUS_RADIUS', 'ConvergenceMargin', 'magnus_terms', 'convergence_margin',
           'pdd_segments', 'noisy_pdd_segments', 'pdd_leading_terms', 'noisy_pdd_first_order',
           'noisy_pdd_second_order_unitary', 'k_generators_exact', 'k_generators_leading']

# radius of absolute convergence of the Magnus series, sum_i ||O_i|| < r
MAGNUS_RADIUS = 1.0868


def _sym(i, j, k):
    return {3: 1, 2: 2, 1: 6}[len({i, j, k})]


def magnus_terms(segments: Sequence[np.ndarray], max_order: int = 3) -> List[np.ndarray]:
    r"""
    Lowest Magnus terms of a piecewise-constant evolution.

    Parameters
    ----------
    segments : sequence of ndarray
        Hermitian dimensionless generators :math:`O_1, \ldots, O_K` in time
        order.
    max_order : int
        Highest order computed, 1 to 3.

    Returns
    -------
    list of ndarray
        ``[Ω1, Ω2, Ω3][:max_order]``, each Hermitian.

    Notes
    -----
    The third-order term is

    .. math::

        \Omega^{(3)} = -\frac16 \sum_{i\ge j\ge k}
        \frac{[O_i,[O_j,O_k]] + [[O_i,O_j],O_k]}{\mathrm{sym}(i,j,k)},

    with ``sym`` = 1, 2, 6 for zero, one and two coinciding index pairs.
    """
    if not 1 <= max_order <= 3:
        raise ValueError('max_order must be 1, 2 or 3')
    O = [np.asarray(o, dtype=complex) for o in segments]
    if not O:
        raise ValueError('empty segment list')
    shape = O[0].shape
    if any(o.shape != shape for o in O):
        raise ValueError('segments differ in shape')
    K = len(O)

    terms = [hermitian_part(sum(O))]
    if max_order >= 2:
        om2 = np.zeros(shape, dtype=complex)
        partial = np.zeros(shape, dtype=complex)
        for i in range(1, K):
            partial += O[i - 1]
            om2 += comm(O[i], partial)
        terms.append(hermitian_part(-0.5j * om2))
    if max_order >= 3:
        om3 = np.zeros(shape, dtype=complex)
        for i in range(K):
            for j in range(i + 1):
                c_ij = comm(O[i], O[j])
                for k in range(j + 1):
                    om3 += (comm(O[i], comm(O[j], O[k])) + comm(c_ij, O[k])) / _sym(i, j, k)
        terms.append(hermitian_part(-om3 / 6))
    return terms


class ConvergenceMargin(NamedTuple):
    total: float
    within_radius: bool


def convergence_margin(segments: Sequence[np.ndarray]) -> ConvergenceMargin:
    """Sum of segment norms compared against :data:`MAGNUS_RADIUS`."""
    total = float(sum(op_norm(o) for o in segments))
    return ConvergenceMargin(total, total < MAGNUS_RADIUS)


def _toggled(h: SystemBathHamiltonian, op: np.ndarray, label: str) -> np.ndarray:
    s = lift_system(PAULIS[label], h.bath_dim)
    return s @ op @ s


def pdd_segments(h: SystemBathHamiltonian) -> List[np.ndarray]:
    """Toggling-frame segments ``τσ_α H σ_α`` (α = I, X, Y, Z) of ideal PDD."""
    tH = h.tau * h.matrix
    return [_toggled(h, tH, a) for a in 'IXYZ']


def noisy_pdd_segments(h: SystemBathHamiltonian, ctrl: ControlErrorSpec) -> List[np.ndarray]:
    """
    Toggling-frame segments of PDD with instantaneous pulses and control
    errors: each free segment is followed by the error generator of the
    pulse that ends it.
    """
    tH = h.tau * h.matrix
    segs = []
    for a, p in zip('IXYZ', ('X', 'Z', 'X', 'Z')):
        segs.append(_toggled(h, tH, a))
        segs.append(_toggled(h, ctrl.lifted(h.bath_dim, p), a))
    return segs


def pdd_leading_terms(h: SystemBathHamiltonian):
    """
    Closed-form ``(Ω1, Ω2, Ω3)`` of ideal PDD.

    ``Ω3`` is the third-order term for vanishing ``B_I``; it ignores
    ``B_I`` altogether.
    """
    t = h.tau
    bi, bx, by, bz = h.b_i, h.b_x, h.b_y, h.b_z
    om1 = 4 * t * np.kron(I2, bi)
    om2 = -2 * t ** 2 * (np.kron(X, 2j * comm(bi, bx))
                         + np.kron(Y, 1j * comm(bi, by) + acomm(bx, bz)))
    om3 = (2 / 3) * t ** 3 * (
        1j * np.kron(I2, comm(bz, acomm(bx, by)) - comm(by, acomm(bx, bz)))
        + 3 * np.kron(Z, acomm(bx, acomm(bx, bz))))
    return om1, hermitian_part(om2), hermitian_part(om3)


def noisy_pdd_first_order(h: SystemBathHamiltonian, ctrl: ControlErrorSpec,
                          width: PulseWidthSpec) -> np.ndarray:
    """Leading first-order term of noisy PDD in its gate-difference form."""
    db = h.bath_dim
    tau_p = width.delta * h.tau
    diff = ctrl.lifted(db, 'Z') - ctrl.lifted(db, 'X')
    sx, sz = lift_system(X, db), lift_system(Z, db)
    om = (4 * h.tau * np.kron(I2, h.b_i)
          + (4 / np.pi) * tau_p * np.kron(Y, h.b_x + h.b_z)
          + sx @ diff @ sx + sz @ diff @ sz)
    return hermitian_part(om)


def noisy_pdd_second_order_unitary(h: SystemBathHamiltonian, eta: float, n) -> np.ndarray:
    """Second-order term of PDD with gate-independent error ``eta n·σ``, zero width."""
    n = np.asarray(n, dtype=float)
    if abs(np.linalg.norm(n) - 1) > 1e-12:
        raise ValueError('n must be a unit vector')
    t = h.tau
    eye = np.eye(h.bath_dim)
    ax = t * h.b_x + eta * n[0] * eye
    az = t * h.b_z + eta * n[2] * eye
    om = (-4 * np.kron(X, 1j * t ** 2 * comm(h.b_i, h.b_x))
          - 2 * np.kron(Y, 1j * t ** 2 * comm(h.b_i, h.b_y) + acomm(ax, az)))
    return hermitian_part(om)


def _k_defining_products(h, gates):
    """Unitaries e^{-iK_α} (up to phase) for α = 0..3."""
    db = h.bath_dim
    back = exp_generator(-gates.width.delta * h.tau * h.matrix)
    xt = pulse_unitary('X', h, gates)
    zt = pulse_unitary('Z', h, gates)
    sx, sy, sz = (lift_system(PAULIS[a], db) for a in 'XYZ')
    return [sx @ xt @ back,
            sy @ zt @ back @ sx,
            sz @ xt @ back @ sy,
            zt @ back @ sz]


def _phase_stripped_log(W, branch_guard):
    d = W.shape[0]
    base = np.angle(np.linalg.det(W))
    best = None
    for k in range(d):
        cand = W * np.exp(-1j * (base + 2 * np.pi * k) / d)
        try:
            K = log_unitary(cand, branch_guard)
        except BranchAmbiguity:
            continue
        if best is None or op_norm(K) < op_norm(best):
            best = K
    if best is None:
        raise BranchAmbiguity('no determinant-one root of the pulse-error unitary has a '
                              'well-defined principal logarithm')
    return best


def k_generators_exact(h: SystemBathHamiltonian, ctrl: ControlErrorSpec, width: PulseWidthSpec,
                       branch_guard: float = 1e-6) -> List[np.ndarray]:
    """
    Pulse-error generators ``K_0..K_3`` from their defining products.

    The products are only defined up to a global phase; each is rotated to
    unit determinant and the root giving the smallest-norm logarithm is
    kept.
    """
    gates = NoisyGateSet(ctrl, width)
    return [_phase_stripped_log(W, branch_guard) for W in _k_defining_products(h, gates)]


def k_generators_leading(h: SystemBathHamiltonian, ctrl: ControlErrorSpec,
                         width: PulseWidthSpec) -> List[np.ndarray]:
    """Lowest-order closed forms of ``K_0..K_3`` in ``eta`` and ``tau_P ||H_SB||``."""
    db = h.bath_dim
    tp = width.delta * h.tau
    c = 2 / np.pi
    bx, by, bz = h.b_x, h.b_y, h.b_z
    gx, gz = ctrl.lifted(db, 'X'), ctrl.lifted(db, 'Z')
    sx, sy, sz = (lift_system(PAULIS[a], db) for a in 'XYZ')
    kron = np.kron
    k0 = gx + tp * (-kron(Y, by - c * bz) - kron(Z, bz + c * by))
    k1 = sx @ gz @ sx + tp * (-kron(X, bx - c * by) + kron(Y, by + c * bx))
    k2 = sy @ gx @ sy + tp * (-kron(Y, by - c * bz) + kron(Z, bz + c * by))
    k3 = sz @ gz @ sz + tp * (kron(X, bx - c * by) + kron(Y, by + c * bx))
    return [hermitian_part(k) for k in (k0, k1, k2, k3)]
