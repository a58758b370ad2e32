import numpy as np
import pytest

from noisydd.linalg import PAULIS, X, Y, Z, exp_generator, log_unitary, op_norm, pauli_decompose
from noisydd.magnus import (convergence_margin, k_generators_exact, k_generators_leading,
                            magnus_terms, noisy_pdd_first_order, noisy_pdd_second_order_unitary,
                            noisy_pdd_segments, pdd_leading_terms, pdd_segments)
from noisydd.model import (ControlErrorSpec, PulseWidthSpec, assemble, sample_random,
                           unitary_control_error)
from noisydd.sequences import NoisyGateSet, cdd_schedule, propagate_noisy
from conftest import loglog_slope, random_hermitian


def _product(segs):
    U = np.eye(segs[0].shape[0], dtype=complex)
    for s in segs:
        U = exp_generator(s) @ U
    return U


def test_commuting_segments_sum_exactly(rng):
    a = np.diag(rng.standard_normal(4)).astype(complex)
    o1, o2, o3 = magnus_terms([0.1 * a, 0.2 * a, 0.3 * a])
    assert np.allclose(o1, 0.6 * a)
    assert not o2.any() and not o3.any()


def test_two_segment_bch(rng):
    a, b = (0.01 * random_hermitian(rng, 3) for _ in range(2))
    o1, o2, _ = magnus_terms([a, b])
    # e^{-ib} e^{-ia} = exp(-i(a + b) - [b, a]/2 + ...)
    assert np.allclose(o2, -0.5j * (b @ a - a @ b))


def test_truncation_error_order_four(rng):
    base = [random_hermitian(rng, 4) for _ in range(5)]
    scales = np.logspace(-2.5, -1.5, 5)
    err = []
    for s in scales:
        segs = [s * b / op_norm(b) for b in base]
        err.append(op_norm(log_unitary(_product(segs)) - sum(magnus_terms(segs))))
    assert loglog_slope(scales, err) == pytest.approx(4, abs=0.2)


def test_terms_are_hermitian(rng):
    segs = [0.1 * random_hermitian(rng, 4) for _ in range(4)]
    for t in magnus_terms(segs):
        assert np.allclose(t, t.conj().T)


def test_argument_checks(rng):
    with pytest.raises(ValueError):
        magnus_terms([])
    with pytest.raises(ValueError):
        magnus_terms([np.eye(2)], 4)
    with pytest.raises(ValueError):
        magnus_terms([np.eye(2), np.eye(3)])


def test_convergence_margin():
    m = convergence_margin([0.3 * Z, 0.3 * X])
    assert m.total == pytest.approx(0.6) and m.within_radius
    assert not convergence_margin([1.2 * Z]).within_radius


def test_pdd_segments_reproduce_propagator(ham):
    U = propagate_noisy(cdd_schedule(1), ham, NoisyGateSet())
    assert np.allclose(_product(pdd_segments(ham)), U)


def test_pdd_leading_terms_match_series(ham):
    o1, o2, _ = magnus_terms(pdd_segments(ham))
    c1, c2, _ = pdd_leading_terms(ham)
    assert np.allclose(o1, c1, atol=1e-15)
    assert np.allclose(o2, c2, atol=1e-15)
    parts = pauli_decompose(o1, ham.split)
    assert all(op_norm(parts[a]) < 1e-15 for a in 'XYZ')


def test_pdd_third_order_without_bath_term():
    h = sample_random(0.0, 0.05, seed=8)
    _, _, o3 = magnus_terms(pdd_segments(h))
    assert np.allclose(o3, pdd_leading_terms(h)[2], atol=1e-18)


def test_noisy_segments_reproduce_propagator(ham):
    ctrl = unitary_control_error(0.03, (0.6, 0, 0.8))
    U = propagate_noisy(cdd_schedule(1), ham, NoisyGateSet(ctrl))
    # toggling-frame product equals the lab-frame unitary up to the pulse phase
    assert np.allclose(_product(noisy_pdd_segments(ham, ctrl)), U)


def test_noisy_second_order_unitary_error(ham):
    n = (1 / np.sqrt(2), 0, 1 / np.sqrt(2))
    ctrl = unitary_control_error(0.04, n)
    o = magnus_terms(noisy_pdd_segments(ham, ctrl), 2)
    assert np.allclose(o[1], noisy_pdd_second_order_unitary(ham, 0.04, n), atol=1e-15)
    # first order: only the bath term survives for gate-independent errors
    assert np.allclose(o[0], 4 * np.kron(np.eye(2), ham.b_i), atol=1e-15)


def test_noisy_first_order_gate_difference(ham):
    ctrl = ControlErrorSpec(0.01 * X, 0.02 * Y, 0.02)
    o1 = magnus_terms(noisy_pdd_segments(ham, ctrl), 1)[0]
    assert np.allclose(o1, noisy_pdd_first_order(ham, ctrl, PulseWidthSpec()))


def test_k_generators_zero_noise():
    h = sample_random(0.05, 0.05, seed=1)
    for k in k_generators_exact(h, ControlErrorSpec.none(), PulseWidthSpec()):
        assert op_norm(k) < 1e-12


def test_k_generators_pure_control_error():
    h = sample_random(0.05, 0.05, seed=1)
    ctrl = ControlErrorSpec(0.02 * Y, 0.01 * X, 0.02)
    ke = k_generators_exact(h, ctrl, PulseWidthSpec())
    kl = k_generators_leading(h, ctrl, PulseWidthSpec())
    for a, b in zip(ke, kl):
        assert np.allclose(a, b, atol=1e-14)


def test_k_generators_leading_order_slope():
    h = sample_random(0.05, 0.05, seed=3)
    scales = np.logspace(-3, -2, 4)
    err = []
    for s in scales:
        ctrl = ControlErrorSpec(s * (0.6 * X + 0.8 * Z), s * Y, s)
        w = PulseWidthSpec(s)
        err.append(max(op_norm(a - b) for a, b in zip(k_generators_exact(h, ctrl, w),
                                                      k_generators_leading(h, ctrl, w))))
    assert loglog_slope(scales, err) == pytest.approx(2, abs=0.3)
