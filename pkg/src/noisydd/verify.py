"""
Property suite behind ``noisydd verify``.

Each check is small enough to run in seconds and returns a
:class:`CheckResult`; :func:`run_all` collects them in a fixed order.
"""
import math
from importlib import resources
from typing import Callable, List, NamedTuple

import numpy as np

from .analysis import (cdd_bounds, cdd_estimator, cdd_nmax, cdd_sweep_exact,
                       noisy_cdd_recurrence)
from .linalg import X, Y, Z, log_unitary, op_norm, pauli_decompose
from .magnus import k_generators_exact, k_generators_leading, magnus_terms, pdd_segments
from .metrics import ChannelSample, effective_generator, haar_states, infidelities
from .model import (ControlErrorSpec, PulseWidthSpec, check_norm_inequality, make_rng,
                    sample_random)
from .reporting import SweepReport
from .sequences import cdd_schedule, propagate_ideal

GOLDEN = 'golden_recurrence.csv'


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _within(slope, target, tol=0.3):
    return abs(slope - target) <= tol


def check_pdd_first_order(samples=20) -> CheckResult:
    worst = 0.0
    for k in range(samples):
        h = sample_random(0.01, 0.01, seed=11, stream=k)
        om1 = magnus_terms(pdd_segments(h), 1)[0]
        parts = pauli_decompose(om1, h.split)
        worst = max(worst, max(op_norm(parts[a]) for a in 'XYZ'))
    return CheckResult('pdd first order decouples', worst <= 1e-12, f'max |sys part| = {worst:.2e}')


def check_magnus_accuracy() -> CheckResult:
    rng = make_rng(7)
    base = []
    for _ in range(4):
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        base.append((a + a.conj().T) / op_norm(a + a.conj().T))
    scales = np.logspace(-2.5, -1.5, 5)
    err = []
    for s in scales:
        segs = [s * b for b in base]
        U = np.eye(4, dtype=complex)
        for g in segs:
            w, v = np.linalg.eigh(g)
            U = (v * np.exp(-1j * w)) @ v.conj().T @ U
        err.append(op_norm(log_unitary(U) - sum(magnus_terms(segs, 3))))
    slope = loglog_slope(scales, err)
    return CheckResult('magnus truncation slope 4', _within(slope, 4), f'slope = {slope:.3f}')


def check_cdd_order() -> CheckResult:
    phis = np.logspace(-4, -2, 5)
    slopes = []
    for n in (1, 2, 3):
        vals = [cdd_sweep_exact(sample_random(p, p, seed=3), n)[-1].phi_sb for p in phis]
        slopes.append(loglog_slope(phis, vals))
    ok = all(_within(s, n + 1) for n, s in zip((1, 2, 3), slopes))
    return CheckResult('cdd decoupling order n+1', ok,
                       'slopes = ' + ', '.join(f'{s:.3f}' for s in slopes))


def check_bound_sandwich(seeds=5, n_max=4) -> CheckResult:
    worst = 0.0
    for seed in range(seeds):
        h = sample_random(1e-3, 1e-3, seed=seed)
        for t in cdd_sweep_exact(h, n_max)[1:]:
            worst = max(worst, t.phi_sb / cdd_bounds('generic', 1e-3, 1e-3, t.level))
    return CheckResult('exact below 1.5x generic bound', worst <= 1.5,
                       f'max exact/bound = {worst:.3f}')


def check_nmax() -> CheckResult:
    got = (cdd_nmax('generic', 1e-3), cdd_nmax('BI_zero', 1e-3), cdd_nmax('generic', 0.25))
    return CheckResult('n_max formulas', got == (4, 14, 0), f'(generic, BI_zero, 0.25) = {got}')


def check_memory_monotone(n_max=3) -> CheckResult:
    h = sample_random(0.01, 0.01, seed=2)
    vals = [t.phi_sb for t in cdd_sweep_exact(h, n_max, 'memory')]
    ok = all(b <= a for a, b in zip(vals, vals[1:]))
    return CheckResult('memory setting monotone', ok, ' > '.join(f'{v:.2e}' for v in vals))


def check_recurrence_reduction() -> CheckResult:
    pb, ps = 0.003, 0.002
    got = noisy_cdd_recurrence(pb, ps, 0.0, 1).traces[1].phi_sb
    want = 12 * pb * ps + 4 * ps * ps
    return CheckResult('recurrence reduces to pdd bound', got == want, f'{got!r} vs {want!r}')


def check_infidelity_bound(instances=200) -> CheckResult:
    viol = worst = 0
    for k in range(instances):
        rng = make_rng(21, k)
        h = sample_random(rng.uniform(0, 0.05), rng.uniform(1e-4, 0.05), seed=21, stream=k)
        U = propagate_ideal(cdd_schedule(0), h)
        phi = effective_generator(U, h.split).phi_sb
        r = infidelities(ChannelSample(U), haar_states(rng, 50)).max() / (math.sqrt(2) * phi)
        worst = max(worst, r)
        viol += r > 1
    ok = worst <= 1.5 and viol <= 0.01 * instances
    return CheckResult('infidelity <= sqrt2 Phi_SB', ok,
                       f'max ratio = {worst:.3f}, unslacked violations = {viol}')


def check_norm_inequality_draws(draws=2000) -> CheckResult:
    rng = make_rng(31)
    bad = 0
    for _ in range(draws):
        d = int(rng.integers(1, 5))
        ops = []
        for _ in range(3):
            a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            ops.append(a + a.conj().T)
        bad += not check_norm_inequality(*ops).holds
    return CheckResult('max ||B_i|| <= ||H_SB||', bad == 0, f'{bad} violations in {draws}')


def check_k_consistency() -> CheckResult:
    h = sample_random(0.05, 0.05, seed=3)
    rng = make_rng(5)
    gx, gz = (np.einsum('i,ijk->jk', v / np.linalg.norm(v), np.array([X, Y, Z]))
              for v in rng.normal(size=(2, 3)))
    scales = np.logspace(-3, -2, 4)
    err = []
    for s in scales:
        ctrl = ControlErrorSpec(s * gx, s * gz, s)
        w = PulseWidthSpec(s)
        err.append(max(op_norm(a - b) for a, b in
                       zip(k_generators_exact(h, ctrl, w), k_generators_leading(h, ctrl, w))))
    slope = loglog_slope(scales, err)
    return CheckResult('pulse-error generators slope 2', _within(slope, 2), f'slope = {slope:.3f}')


def check_estimator() -> CheckResult:
    h0 = sample_random(1.0, 1.0, seed=0)
    taus = np.logspace(-3.3, -2.3, 5)
    out = []
    ok = True
    for n in (2, 3):
        eb, es = [], []
        for t in taus:
            h = h0.scaled(t)
            ex = effective_generator(propagate_ideal(cdd_schedule(n, 'computational'), h), h.split)
            est = cdd_estimator(h, n)
            eb.append(op_norm(ex.omega_b - est.omega_b))
            es.append(op_norm(ex.omega_sb - est.omega_sb))
        sb, ss = loglog_slope(taus, eb), loglog_slope(taus, es)
        # the coupling error is bounded by tau^(n+2); it is observed to fall faster
        ok &= _within(sb, 3) and ss >= n + 2 - 0.3
        out.append(f'n={n}: ({sb:.2f}, {ss:.2f})')
    return CheckResult('estimator error within (3, n+2)', ok, '; '.join(out))


def golden_report() -> SweepReport:
    """The small deterministic report shipped as a golden file."""
    cfg = {'command': 'recurrence', 'phi_b': 0.001, 'phi_sb': 0.001,
           'eta': [0.001, 1e-06, 1e-10], 'n_max': 8}
    rep = SweepReport(cfg, 0, {'n': list(range(9))})
    for eta in cfg['eta']:
        for setting in ('computational', 'memory'):
            res = noisy_cdd_recurrence(0.001, 0.001, eta, 8, setting)
            for t in res.traces:
                rep.add(0.001, 0.001, eta, t.level, setting, t.phi_sb)
    return rep


def check_golden() -> CheckResult:
    want = resources.files('noisydd').joinpath('data', GOLDEN).read_text()
    got = golden_report().to_csv()
    return CheckResult('golden file reproduces', got == want,
                       'byte-identical' if got == want else 'CSV differs from shipped golden file')


CHECKS: List[Callable[[], CheckResult]] = [
    check_pdd_first_order, check_magnus_accuracy, check_cdd_order, check_bound_sandwich,
    check_nmax, check_memory_monotone, check_recurrence_reduction, check_infidelity_bound,
    check_norm_inequality_draws, check_k_consistency, check_estimator, check_golden,
]


def run_all() -> List[CheckResult]:
    results = []
    for check in CHECKS:
        try:
            results.append(check())
        except Exception as exc:  # a crashing check is a failing check
            results.append(CheckResult(check.__name__, False, f'{type(exc).__name__}: {exc}'))
    return results


def format_table(results: List[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f'{"check":<{width}}  result  detail', '-' * (width + 24)]
    for r in results:
        lines.append(f'{r.name:<{width}}  {"PASS" if r.passed else "FAIL":<6}  {r.detail}')
    return '\n'.join(lines)
