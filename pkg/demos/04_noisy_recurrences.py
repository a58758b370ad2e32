"""
Noisy CDD: each level adds the control error of its own pulses.

In the computational setting a per-pulse error of 1e-3 already spoils
PDD; in the memory setting the error phase settles on a plateau set by
the control error.
"""
from pathlib import Path

from noisydd.analysis import noisy_cdd_recurrence, recurrence_max_level
from noisydd.reporting import plot_traces

out = Path(__file__).with_name('out')
out.mkdir(exist_ok=True)
series = {}
for eta in (1e-3, 1e-6, 1e-10):
    comp = noisy_cdd_recurrence(1e-3, 1e-3, eta, 8, 'computational')
    mem = noisy_cdd_recurrence(1e-3, 1e-3, eta, 8, 'memory')
    print(f'eta={eta:g}: best computational level {recurrence_max_level(comp.traces)}, '
          f'memory plateau {mem.plateau:.3e} (reached {mem.traces[-1].phi_sb:.3e})')
    for name, res in (('computational', comp), ('memory', mem)):
        series[f'{name}, eta={eta:g}'] = ([t.level for t in res.traces],
                                          [t.phi_sb for t in res.traces])
plot_traces(series, out / 'recurrences.svg', title='noisy CDD error phase')
print('plot written to', out / 'recurrences.svg')
