"""
Concatenation helps, then hurts.

At fixed pulse spacing the CDD error phase falls until the sequence gets
too long; at fixed total time it keeps falling.
"""
from noisydd.analysis import cdd_bounds, cdd_estimator, cdd_nmax, cdd_sweep_exact
from noisydd.model import sample_random

h = sample_random(1e-3, 1e-3, seed=0)
print(' n   exact Phi_SB  source     bound      estimator')
for t in cdd_sweep_exact(h, 6):
    est = cdd_estimator(h, t.level).phi_sb if t.level else h.phi_sb()
    print(f'{t.level:2d}   {t.phi_sb:.3e}   {t.source:9s}  '
          f'{cdd_bounds("generic", 1e-3, 1e-3, t.level):.3e}  {est:.3e}')
print('predicted maximal useful level:', cdd_nmax('generic', 1e-3))
print('without a bath Hamiltonian it is', cdd_nmax('BI_zero', 1e-3))

print('\nfixed total time (memory setting):')
hm = sample_random(0.01, 0.01, seed=0)
for t in cdd_sweep_exact(hm, 3, 'memory'):
    print(f'{t.level:2d}   {t.phi_sb:.3e}   bound {cdd_bounds("memory", 0.01, 0.01, t.level):.3e}')
