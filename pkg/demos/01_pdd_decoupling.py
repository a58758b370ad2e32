"""
Periodic decoupling of a qubit coupled to a qubit bath.

Draws a random Hamiltonian, propagates one PDD cycle exactly and compares
the error phases with the closed-form Magnus terms.
"""
import numpy as np

from noisydd.linalg import op_norm, pauli_decompose
from noisydd.magnus import magnus_terms, pdd_leading_terms, pdd_segments
from noisydd.metrics import effective_generator
from noisydd.model import sample_random
from noisydd.sequences import cdd_schedule, propagate_ideal

h = sample_random(phi_b=0.01, phi_sb=0.01, seed=1)
print(f'bare error phases: phi_B = {h.phi_b():.4f}, phi_SB = {h.phi_sb():.4f}')

# first-order Magnus term: the interaction averages out
om1, om2, om3 = magnus_terms(pdd_segments(h))
parts = pauli_decompose(om1, h.split)
print('first-order system parts:', [f'{op_norm(parts[a]):.1e}' for a in 'XYZ'])

# second order agrees with the closed form
c1, c2, _ = pdd_leading_terms(h)
print(f'|Omega2 - closed form| = {op_norm(om2 - c2):.1e}')

eg = effective_generator(propagate_ideal(cdd_schedule(1), h), h.split)
print(f'after PDD (4 tau): Phi_B = {eg.phi_b:.4f}, Phi_SB = {eg.phi_sb:.2e}')
print(f'second-order estimate of Phi_SB: {op_norm(om2):.2e}')
print(f'sufficient breakeven 12 phi_B + 4 phi_SB = {12 * h.phi_b() + 4 * h.phi_sb():.2f} <= 1')

# shrinking the noise by 10 shrinks Phi_SB by ~100: second-order suppression
small = h.scaled(0.1)
eg_small = effective_generator(propagate_ideal(cdd_schedule(1), small), small.split)
print(f'ratio for 10x weaker noise: {eg.phi_sb / eg_small.phi_sb:.1f}')
