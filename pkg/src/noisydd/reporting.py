"""
Sweep reports: CSV/JSON serialization and SVG rendering.

CSV layout::

    # config-hash=<sha256 prefix>, seed=<int>, grid=<json>
    phiB,phiSB,eta,n,measure,value,flag
    ...

Renderers only read reports; they never compute physics.
"""
import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import List, Optional

import numpy as np

__all__ = ['COLUMNS', 'SweepReport', 'config_hash', 'read_csv', 'plot_ratio_map',
           'plot_traces']

COLUMNS = ('phiB', 'phiSB', 'eta', 'n', 'measure', 'value', 'flag')


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(',', ':'), default=_jsonable)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f'cannot serialize {type(obj).__name__}')


def config_hash(config: dict) -> str:
    return hashlib.sha256(_canonical(config).encode()).hexdigest()[:16]


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if np.isfinite(v) else str(v)
    return str(v)


@dataclass
class SweepReport:
    """Rows of metric evaluations plus the provenance needed to regenerate them."""
    config: dict
    seed: int
    grid: dict = field(default_factory=dict)
    rows: List[dict] = field(default_factory=list)

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def add(self, phiB, phiSB, eta, n, measure, value, flag='ok'):
        self.rows.append({'phiB': float(phiB), 'phiSB': float(phiSB), 'eta': float(eta),
                          'n': int(n), 'measure': str(measure), 'value': float(value),
                          'flag': str(flag)})

    def sorted_rows(self) -> List[dict]:
        return sorted(self.rows, key=lambda r: (r['measure'], r['eta'], r['n'], r['phiB'],
                                                r['phiSB']))

    def select(self, measure: str, eta: Optional[float] = None) -> List[dict]:
        return [r for r in self.sorted_rows() if r['measure'] == measure
                and (eta is None or r['eta'] == eta)]

    def to_csv(self, timestamp: bool = False) -> str:
        buf = io.StringIO()
        buf.write(f'# config-hash={self.config_hash}, seed={self.seed}, '
                  f'grid={_canonical(self.grid)}\n')
        if timestamp:
            buf.write(f'# generated {datetime.now(timezone.utc).isoformat()}\n')
        writer = csv.writer(buf, lineterminator='\n')
        writer.writerow(COLUMNS)
        for r in self.sorted_rows():
            writer.writerow([_fmt(r[c]) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {'config-hash': self.config_hash, 'seed': self.seed, 'config': self.config,
               'grid': self.grid, 'rows': self.sorted_rows()}
        return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable)

    @classmethod
    def from_json(cls, text: str) -> 'SweepReport':
        doc = json.loads(text)
        return cls(doc['config'], doc['seed'], doc['grid'], doc['rows'])


def read_csv(text: str):
    """Parse a report CSV into ``(header_fields, rows)``; comment lines are skipped."""
    header = {}
    body = []
    for line in text.splitlines():
        if line.startswith('# config-hash='):
            head, _, grid = line[2:].partition(', grid=')
            for part in head.split(', '):
                key, _, val = part.partition('=')
                header[key] = val
            header['grid'] = json.loads(grid)
        elif not line.startswith('#'):
            body.append(line)
    rows = []
    for r in csv.DictReader(body):
        rows.append({'phiB': float(r['phiB']), 'phiSB': float(r['phiSB']),
                     'eta': float(r['eta']), 'n': int(r['n']), 'measure': r['measure'],
                     'value': float(r['value']), 'flag': r['flag']})
    return header, rows


def _figure():
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    return plt


def _save_svg(fig, path, tag):
    import matplotlib
    # fixed salt and no date keep reruns byte-identical
    with matplotlib.rc_context({'svg.hashsalt': 'noisydd'}):
        fig.savefig(path, format='svg', metadata={'Date': None, 'Description': tag})


def plot_ratio_map(rows: List[dict], path, title: str = '', tag: str = ''):
    """Contour plot of a ratio over the (phiB, phiSB) grid, with the unit contour."""
    plt = _figure()
    pb = sorted({r['phiB'] for r in rows})
    ps = sorted({r['phiSB'] for r in rows})
    grid = np.full((len(ps), len(pb)), np.nan)
    for r in rows:
        grid[ps.index(r['phiSB']), pb.index(r['phiB'])] = r['value'] if r['flag'] == 'ok' else np.nan
    fig, ax = plt.subplots(figsize=(4, 3.5))
    with np.errstate(divide='ignore', invalid='ignore'):
        img = ax.pcolormesh(pb, ps, np.log10(grid), shading='nearest', cmap='RdBu_r',
                            vmin=-2, vmax=2)
        if np.nanmin(grid) < 1 < np.nanmax(grid):
            ax.contour(pb, ps, grid, levels=[1.0], colors='k')
    ax.set_xscale('log')
    ax.set_yscale('log')
    ax.set_xlabel('phi_B')
    ax.set_ylabel('phi_SB')
    ax.set_title(title)
    fig.colorbar(img, ax=ax, label='log10 ratio')
    fig.tight_layout()
    _save_svg(fig, path, tag)
    plt.close(fig)


def plot_traces(series: dict, path, xlabel='n', ylabel='Phi_SB', title='', tag='',
                logx=False):
    """Line plot; ``series`` maps a label to ``(x, y)`` sequences."""
    plt = _figure()
    fig, ax = plt.subplots(figsize=(4, 3.5))
    for label, (x, y) in series.items():
        ax.plot(x, y, marker='o', ms=3, label=label)
    ax.set_yscale('log')
    if logx:
        ax.set_xscale('log')
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(fontsize=6)
    fig.tight_layout()
    _save_svg(fig, path, tag)
    plt.close(fig)
