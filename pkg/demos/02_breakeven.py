"""
When is PDD worth doing with imperfect pulses?

Evaluates the closed-form breakeven conditions and a coarse sampled
breakeven map with a calibration-type unitary error on every pulse.
"""
from pathlib import Path

import numpy as np

from noisydd.analysis import analytic_breakeven, breakeven_map, region_cells
from noisydd.reporting import plot_ratio_map

out = Path(__file__).with_name('out')
out.mkdir(exist_ok=True)

for phi_sb in (0.001, 0.01, 0.05):
    r = analytic_breakeven('unitary_error', 0.0, phi_sb)
    d = analytic_breakeven('unitary_error', 0.0, phi_sb, form='quadratic')
    c = analytic_breakeven('control_only', phi_sb=phi_sb)
    print(f'phi_SB={phi_sb:<6} eta_max: unitary error {r.eta_max:.4f} '
          f'(quadratic solve {d.eta_max:.4f}), general control error {c.eta_max:.4f}')
print('finite width alone: delta <= pi/8 =', round(np.pi / 8, 4))

grid = np.logspace(-3, 0, 9)
for eta in (0.0, 0.06):
    rep = breakeven_map(grid, grid, eta, samples_per_cell=5, seed=0)
    cells = region_cells(rep, 'error_phase')
    print(f'eta={eta}: PDD helps in {len(cells)} of {grid.size ** 2} cells')
    plot_ratio_map(rep.select('error_phase'), out / f'breakeven_eta{eta}.svg',
                   title=f'Phi_SB(PDD) / phi_SB, eta={eta}', tag=rep.config_hash)
print('maps written to', out)
