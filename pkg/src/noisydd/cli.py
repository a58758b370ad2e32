"""
Command-line runner.

    noisydd sample      --config run.ini --out out/
    noisydd breakeven   --config run.ini --out out/ --plot
    noisydd cdd-sweep   --config run.ini --format both
    noisydd recurrence  --config run.ini
    noisydd verify

Configs are INI files; each command reads the section named after it and
every key is optional. Unknown sections or keys and malformed values are
rejected with the offending line number.
"""
import argparse
import configparser
import json
import math
import os
import re
import sys
from pathlib import Path

import numpy as np

from . import analysis, verify
from .linalg import BranchAmbiguity
from .model import sample_random, unitary_control_error
from .reporting import SweepReport, plot_ratio_map, plot_traces
from .sequences import NoisyGateSet, Setting

COMMANDS = ('sample', 'breakeven', 'cdd-sweep', 'recurrence', 'verify')
THREADS_ENV = 'DD_EFFICACY_THREADS'


class ConfigError(ValueError):
    pass


def _floats(text):
    text = text.strip()
    m = re.fullmatch(r'logspace\(\s*([^,]+),\s*([^,]+),\s*(\d+)\s*\)', text)
    if m:
        return [float(v) for v in np.logspace(float(m[1]), float(m[2]), int(m[3]))]
    return [float(v) for v in text.replace(',', ' ').split()]


def _words(text):
    return [w for w in text.replace(',', ' ').split()]


def _nonneg(x):
    x = float(x)
    if not x >= 0:
        raise ValueError('must be non-negative')
    return x


def _posint(x):
    x = int(x)
    if x < 1:
        raise ValueError('must be at least 1')
    return x


def _nonneg_int(x):
    x = int(x)
    if x < 0:
        raise ValueError('must be non-negative')
    return x


def _setting(x):
    return Setting(x.strip()).value


def _choice(*options):
    def parse(x):
        x = x.strip()
        if x not in options:
            raise ValueError(f'expected one of {", ".join(options)}')
        return x
    return parse


def _measures(x):
    out = _words(x)
    for m in out:
        _choice('error_phase', 'infidelity')(m)
    return out


def _unit3(x):
    v = _floats(x)
    if len(v) != 3 or abs(math.fsum(c * c for c in v) - 1) > 1e-9:
        raise ValueError('expected three components of a unit vector')
    return v


_R2 = 1 / math.sqrt(2)

SCHEMA = {
    'sample': {
        'phi_b': (_nonneg, 0.01), 'phi_sb': (_nonneg, 0.01), 'bath_dim': (_posint, 2),
        'tau': (float, 1.0), 'stream': (_nonneg_int, 0),
    },
    'breakeven': {
        'phi_b': (_floats, 'logspace(-3, 0, 41)'), 'phi_sb': (_floats, 'logspace(-3, 0, 41)'),
        'eta': (_floats, '0 0.02 0.06 0.1 0.14'), 'n': (_unit3, f'{_R2} 0 {_R2}'),
        'measures': (_measures, 'error_phase infidelity'), 'samples_per_cell': (_posint, 20),
        'channel_samples': (_posint, 100), 'n_states': (_posint, 100), 'bath_dim': (_posint, 2),
    },
    'cdd-sweep': {
        'phi_b': (_nonneg, 0.001), 'phi_sb': (_nonneg, 0.001), 'n_max': (_nonneg_int, 6),
        'setting': (_setting, 'computational'), 'samples': (_posint, 10),
        'bath_dim': (_posint, 2), 'eta': (_nonneg, 0.0), 'n': (_unit3, f'{_R2} 0 {_R2}'),
    },
    'recurrence': {
        'phi_b': (_nonneg, 0.001), 'phi_sb': (_nonneg, 0.001),
        'eta': (_floats, '1e-3 1e-6 1e-10'), 'n_max': (_nonneg_int, 10),
    },
    'verify': {},
}


def _key_lines(text):
    """Map ``(section, key)`` and ``section`` to their 1-based line numbers."""
    lines, section = {}, None
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in '#;':
            continue
        m = re.fullmatch(r'\[([^\]]+)\]', line)
        if m:
            section = m[1].strip()
            lines.setdefault(section, no)
        elif section is not None:
            key = re.split(r'[=:]', line, 1)[0].strip().lower()
            lines.setdefault((section, key), no)
    return lines


def parse_config(text: str, command: str, source: str = '<config>') -> dict:
    """Typed parameters for ``command`` from INI ``text`` (defaults filled in)."""
    cp = configparser.ConfigParser(interpolation=None, default_section='__none__')
    try:
        cp.read_string(text, source)
    except configparser.Error as exc:
        lineno = getattr(exc, 'lineno', None)
        msg = exc.message.splitlines()[0] if hasattr(exc, 'message') else str(exc)
        if getattr(exc, 'errors', None):
            lineno = exc.errors[0][0]
            msg = f'expected "key = value", got {text.splitlines()[lineno - 1].strip()!r}'
        raise ConfigError(f'{source}:{lineno or 1}: {msg}') from None
    where = _key_lines(text)
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f'{source}:{where.get(sec, 1)}: unknown section [{sec}]')
    schema = SCHEMA[command]
    params = {k: (p(d) if isinstance(d, str) else d) for k, (p, d) in schema.items()}
    if cp.has_section(command):
        for key, raw in cp.items(command):
            line = where.get((command, key), where.get(command, 1))
            if key not in schema:
                raise ConfigError(f'{source}:{line}: unknown key {key!r} in [{command}]')
            try:
                params[key] = schema[key][0](raw)
            except ValueError as exc:
                raise ConfigError(f'{source}:{line}: bad value for {key!r}: {exc}') from None
    for sec in cp.sections():
        for key, raw in cp.items(sec):
            if key not in SCHEMA[sec]:
                raise ConfigError(f'{source}:{where.get((sec, key), 1)}: '
                                  f'unknown key {key!r} in [{sec}]')
    return params


def resolve_threads(flag) -> int:
    value = flag
    if value is None:
        env = os.environ.get(THREADS_ENV, '').strip()
        value = int(env) if env else 1
    if value < 0:
        raise ConfigError(f'thread count must be >= 0, got {value}')
    return value or (os.cpu_count() or 1)


def _write(report: SweepReport, out: Path, stem: str, fmt: str):
    paths = []
    if fmt in ('csv', 'both'):
        paths.append(out / f'{stem}.csv')
        paths[-1].write_text(report.to_csv())
    if fmt in ('json', 'both'):
        paths.append(out / f'{stem}.json')
        paths[-1].write_text(report.to_json())
    return paths


def run_sample(p, args, out):
    h = sample_random(p['phi_b'], p['phi_sb'], p['bath_dim'], args.seed, p['stream'], p['tau'])
    doc = {'seed': args.seed, 'config': p, 'phi_b': h.phi_b(), 'phi_sb': h.phi_sb(),
           'hamiltonian': h.to_dict()}
    text = json.dumps(doc, indent=1)
    (out / 'sample.json').write_text(text + '\n')
    print(text)
    return 0


def run_breakeven(p, args, out):
    threads = resolve_threads(args.threads)
    for measure in p['measures']:
        samples = p['samples_per_cell'] if measure == 'error_phase' else p['channel_samples']
        merged = None
        for eta in p['eta']:
            rep = analysis.breakeven_map(p['phi_b'], p['phi_sb'], eta, p['n'], measure,
                                         samples, args.seed, p['n_states'], p['bath_dim'],
                                         workers=threads)
            if merged is None:
                merged = rep
                merged.config = dict(p, command='breakeven', measure=measure)
            else:
                merged.rows.extend(rep.rows)
            if args.plot:
                plot_ratio_map(rep.select(measure), out / f'breakeven_{measure}_eta{eta:g}.svg',
                               title=f'{measure}, eta={eta:g}', tag=merged.config_hash)
        paths = _write(merged, out, f'breakeven_{measure}', args.format)
        bad = sum(r['flag'] == 'invalid' for r in merged.rows)
        print(f'{measure}: {len(merged.rows)} rows ({bad} invalid) -> '
              + ', '.join(map(str, paths)))
    return 0


def run_cdd_sweep(p, args, out):
    setting = Setting(p['setting'])
    gates = NoisyGateSet(unitary_control_error(p['eta'], p['n'])) if p['eta'] else None
    regime = 'generic' if setting is Setting.COMPUTATIONAL else 'memory'
    rep = SweepReport(dict(p, command='cdd-sweep'), args.seed,
                      {'n': list(range(p['n_max'] + 1))})
    per_level = {n: [] for n in range(p['n_max'] + 1)}
    est = {n: [] for n in range(1, p['n_max'] + 1)}
    for k in range(p['samples']):
        h = sample_random(p['phi_b'], p['phi_sb'], p['bath_dim'], args.seed, k)
        for t in analysis.cdd_sweep_exact(h, p['n_max'], setting, gates):
            per_level[t.level].append(t)
        for n in est:
            est[n].append(analysis.cdd_estimator(h, n, setting).phi_sb)
    for n, traces in per_level.items():
        exact = [t.phi_sb for t in traces if t.source == 'exact_log']
        flag = 'ok' if len(exact) == len(traces) else 'branch_guard'
        value = float(np.median(exact)) if exact else math.nan
        rep.add(p['phi_b'], p['phi_sb'], p['eta'], n, 'exact', value, flag)
        if exact:
            rep.add(p['phi_b'], p['phi_sb'], p['eta'], n, 'exact:min', min(exact), flag)
            rep.add(p['phi_b'], p['phi_sb'], p['eta'], n, 'exact:max', max(exact), flag)
        rep.add(p['phi_b'], p['phi_sb'], p['eta'], n, 'bound',
                analysis.cdd_bounds(regime, p['phi_b'], p['phi_sb'], n))
        if n in est:
            rep.add(p['phi_b'], p['phi_sb'], p['eta'], n, 'estimator',
                    float(np.median(est[n])))
    paths = _write(rep, out, 'cdd_sweep', args.format)
    bound = [r['value'] for r in rep.select('bound')]
    print(f'bound minimum at n={int(np.argmin(bound))}; -> ' + ', '.join(map(str, paths)))
    if args.plot:
        series = {m: ([r['n'] for r in rep.select(m)], [r['value'] for r in rep.select(m)])
                  for m in ('exact', 'bound', 'estimator')}
        plot_traces(series, out / 'cdd_sweep.svg', title=f'CDD, {setting.value}',
                    tag=rep.config_hash)
    return 0


def run_recurrence(p, args, out):
    rep = SweepReport(dict(p, command='recurrence'), args.seed,
                      {'n': list(range(p['n_max'] + 1))})
    series = {}
    for eta in p['eta']:
        for setting in ('computational', 'memory'):
            res = analysis.noisy_cdd_recurrence(p['phi_b'], p['phi_sb'], eta, p['n_max'], setting)
            for t in res.traces:
                rep.add(p['phi_b'], p['phi_sb'], eta, t.level, setting, t.phi_sb)
            if res.plateau is not None:
                rep.add(p['phi_b'], p['phi_sb'], eta, p['n_max'], 'memory:plateau', res.plateau)
            series[f'{setting}, eta={eta:g}'] = ([t.level for t in res.traces],
                                                 [t.phi_sb for t in res.traces])
    paths = _write(rep, out, 'recurrence', args.format)
    print('-> ' + ', '.join(map(str, paths)))
    if args.plot:
        plot_traces(series, out / 'recurrence.svg', title='noisy CDD', tag=rep.config_hash)
    return 0


def run_verify(p, args, out):
    results = verify.run_all()
    print(verify.format_table(results))
    return 0 if all(r.passed for r in results) else 1


RUNNERS = {'sample': run_sample, 'breakeven': run_breakeven, 'cdd-sweep': run_cdd_sweep,
           'recurrence': run_recurrence, 'verify': run_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog='noisydd', description='Noisy dynamical decoupling runs.')
    ap.add_argument('command', choices=COMMANDS)
    ap.add_argument('--config', type=Path, help='INI file; section named after the command')
    ap.add_argument('--seed', type=int, default=0)
    ap.add_argument('--out', type=Path, default=Path('.'))
    ap.add_argument('--threads', type=int, default=None,
                    help=f'worker threads, 0 = all cores (fallback: ${THREADS_ENV})')
    ap.add_argument('--format', choices=('csv', 'json', 'both'), default='csv')
    ap.add_argument('--plot', action='store_true', help='also write SVG figures')
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.config.read_text() if args.config else ''
        params = parse_config(text, args.command, str(args.config or '<defaults>'))
        resolve_threads(args.threads)
    except (ConfigError, OSError, ValueError) as exc:
        print(f'error: {exc}', file=sys.stderr)
        return 2
    args.out.mkdir(parents=True, exist_ok=True)
    try:
        return RUNNERS[args.command](params, args, args.out)
    except BranchAmbiguity as exc:
        print(f'error: {exc}', file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
