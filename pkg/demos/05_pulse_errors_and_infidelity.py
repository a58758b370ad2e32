"""
Pulse-error generators and the infidelity measure.

The exact generators K_0..K_3 of noisy PDD approach their leading-order
forms quadratically; the state infidelity stays below sqrt(2) Phi_SB.
"""
import math

import numpy as np

from noisydd.linalg import X, Z, op_norm
from noisydd.magnus import k_generators_exact, k_generators_leading
from noisydd.metrics import ChannelSample, effective_generator, worst_case_infidelity
from noisydd.model import ControlErrorSpec, PulseWidthSpec, sample_random
from noisydd.sequences import cdd_schedule, propagate_ideal

h = sample_random(0.05, 0.05, seed=3)
for s in (1e-3, 1e-2):
    ctrl = ControlErrorSpec(s * X, s * Z, s)
    w = PulseWidthSpec(s / h.phi_sb())
    err = max(op_norm(a - b) for a, b in zip(k_generators_exact(h, ctrl, w),
                                              k_generators_leading(h, ctrl, w)))
    print(f'noise scale {s:g}: max |K_exact - K_leading| = {err:.2e}')


def bare(k):
    return ChannelSample(propagate_ideal(cdd_schedule(0), sample_random(0.01, 0.03, seed=4, stream=k)))


def pdd(k):
    return ChannelSample(propagate_ideal(cdd_schedule(1), sample_random(0.01, 0.03, seed=4, stream=k)))


i_bare = worst_case_infidelity(bare, 50, 50)
i_pdd = worst_case_infidelity(pdd, 50, 50)
phi_pdd = max(effective_generator(pdd(k).U).phi_sb for k in range(50))
print(f'worst infidelity bare {i_bare:.4f} <= sqrt2 phi_SB = {math.sqrt(2) * 0.03:.4f}')
print(f'worst infidelity PDD  {i_pdd:.2e} <= sqrt2 Phi_SB = {math.sqrt(2) * phi_pdd:.2e}')
