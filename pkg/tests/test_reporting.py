import math

from noisydd.reporting import SweepReport, config_hash, plot_ratio_map, plot_traces, read_csv


def _report():
    rep = SweepReport({'command': 'demo', 'eta': [0.0]}, 7, {'phiB': [0.1, 0.2]})
    rep.add(0.2, 0.1, 0.0, 1, 'error_phase', 0.5)
    rep.add(0.1, 0.1, 0.0, 1, 'error_phase', 1.5)
    rep.add(0.1, 0.0, 0.0, 1, 'error_phase', math.nan, 'degenerate')
    return rep


def test_config_hash_is_order_independent():
    assert config_hash({'a': 1, 'b': [1, 2]}) == config_hash({'b': [1, 2], 'a': 1})
    assert config_hash({'a': 1}) != config_hash({'a': 2})


def test_csv_roundtrip_and_canonical_order():
    rep = _report()
    text = rep.to_csv()
    assert text.startswith(f'# config-hash={rep.config_hash}, seed=7, grid=')
    header, rows = read_csv(text)
    assert header['seed'] == '7' and header['grid'] == {'phiB': [0.1, 0.2]}
    assert [(r['phiB'], r['phiSB']) for r in rows] == [(0.1, 0.0), (0.1, 0.1), (0.2, 0.1)]
    assert math.isnan(rows[0]['value']) and rows[0]['flag'] == 'degenerate'


def test_timestamp_line_is_a_comment():
    rep = _report()
    stamped = rep.to_csv(timestamp=True).splitlines()
    plain = rep.to_csv().splitlines()
    assert stamped[1].startswith('#')
    assert [l for l in stamped if not l.startswith('# generated')] == plain


def test_json_roundtrip():
    rep = _report()
    back = SweepReport.from_json(rep.to_json())
    assert back.config_hash == rep.config_hash
    assert back.to_csv() == rep.to_csv()


def test_svg_output_is_reproducible(tmp_path):
    rows = [{'phiB': b, 'phiSB': s, 'eta': 0.0, 'n': 1, 'measure': 'm',
             'value': 10 * b + s, 'flag': 'ok'} for b in (0.01, 0.1) for s in (0.01, 0.1)]
    for name in ('a.svg', 'b.svg'):
        plot_ratio_map(rows, tmp_path / name, 'test', tag='abc')
    a, b = ((tmp_path / n).read_text() for n in ('a.svg', 'b.svg'))
    assert a.startswith('<?xml') and a == b
    plot_traces({'x': ([0, 1, 2], [1.0, 0.1, 0.01])}, tmp_path / 'c.svg')
    assert (tmp_path / 'c.svg').stat().st_size > 0
