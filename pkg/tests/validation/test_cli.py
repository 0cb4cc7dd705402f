"""
Command-line harness tests: config validation, artifacts and exit codes.

Usage:
    pytest tests/validation/test_cli.py
"""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from formatters.artifact_writer import read_csv_tables
from pipelines.run_config import RunConfig, Subcommand, load_config_header
from scripts.spectral_cli import main


def run_cli(*argv):
    return main([str(arg) for arg in argv])


# =============================================================================
# RUN CONFIG
# =============================================================================

@pytest.mark.parametrize("raw,normalized", [
    ("1", "1"),
    ("0.5", "1/2"),
    ("2/4", "1/2"),
    (0.25, "1/4"),
])
def test_intensity_is_normalized(raw, normalized):
    config = RunConfig(subcommand='moments', intensity=raw, output_path='out.csv')
    assert config.intensity == normalized


@pytest.mark.parametrize("kwargs", [
    dict(subcommand='oracle-check', max_k=7),
    dict(subcommand='oracle-check', max_k=0),
    dict(subcommand='oracle-check', max_k=3, intensity='2'),
    dict(subcommand='bounds', max_k=1),
    dict(subcommand='simulate', max_k=2, n=10, intensity='11'),
    dict(subcommand='simulate', max_k=0),
    dict(subcommand='degrees', intensity='0'),
    dict(subcommand='moments', max_k=65),
    dict(subcommand='moments', intensity='-1'),
    dict(subcommand='simulate', n=5000),
    dict(subcommand='moments', colour='blue'),
])
def test_invalid_configs_rejected(kwargs):
    with pytest.raises(ValidationError):
        RunConfig(output_path='out.csv', **kwargs)


def test_config_round_trips_through_json():
    config = RunConfig(subcommand=Subcommand.SIMULATE, max_k=3, n=200, intensity='3/2',
                       sample_count=7, base_seed=11, output_path='sim.csv')
    assert RunConfig.model_validate_json(config.model_dump_json()) == config


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def test_moments_rows(tmp_path):
    out = tmp_path / 'moments.csv'
    assert run_cli('moments', '--max-k', 2, '--intensity', 1, '--out', out) == 0
    table = read_csv_tables(out)['moments']
    assert table.values.tolist() == [['1', '1'], ['2', '3']]


def test_moments_order_zero(tmp_path):
    out = tmp_path / 'moments.csv'
    assert run_cli('moments', '--max-k', 0, '--out', out) == 0
    assert read_csv_tables(out)['moments'].values.tolist() == [['0', '1']]


def test_moments_are_exact_at_rational_intensity(tmp_path):
    out = tmp_path / 'moments.csv'
    assert run_cli('moments', '--max-k', 3, '--intensity', '1/2', '--out', out) == 0
    assert read_csv_tables(out)['moments']['m_k'].tolist() == ['1/2', '1', '21/8']


def test_large_moments_are_not_rounded(tmp_path):
    out = tmp_path / 'moments.json'
    assert run_cli('moments', '--max-k', 30, '--format', 'json', '--out', out) == 0
    rows = json.loads(out.read_text())['tables']['moments']
    assert all(isinstance(row['m_k'], str) for row in rows)
    assert len(rows[-1]['m_k']) > 17


def test_oracle_check_passes(tmp_path):
    out = tmp_path / 'oracle.csv'
    assert run_cli('oracle-check', '--max-k', 2, '--out', out) == 0
    tables = read_csv_tables(out)
    assert tables['oracle_moments']['match'].tolist() == ['True', 'True']
    assert set(tables['returns']['match']) == {'True'}


def test_oracle_check_reports_mismatch(tmp_path, monkeypatch):
    import pipelines.executor as executor

    monkeypatch.setattr(executor, 'oracle_moment', lambda k, n_jobs=1: 0)
    out = tmp_path / 'oracle.csv'
    assert run_cli('oracle-check', '--max-k', 2, '--out', out) == 2
    assert read_csv_tables(out)['oracle_moments']['match'].tolist() == ['False', 'False']


def test_oracle_check_guard(tmp_path):
    out = tmp_path / 'oracle.csv'
    assert run_cli('oracle-check', '--max-k', 7, '--out', out) == 1
    assert not out.exists()


def test_simulate_writes_all_tables(tmp_path):
    out = tmp_path / 'sim.csv'
    code = run_cli('simulate', '--n', 100, '--samples', 5, '--max-k', 2, '--bins', 20, '--out', out)
    assert code in (0, 3)
    tables = read_csv_tables(out)
    assert set(tables) == {'moments', 'verdicts', 'histogram', 'ecdf', 'summary'}
    assert list(tables['moments'].columns) == ['s', 'mean', 'stderr']
    assert tables['moments']['s'].tolist() == ['0', '1', '2', '3', '4']
    assert tables['moments']['mean'].iloc[0] == '1'
    assert len(tables['histogram']) == 20
    assert float(tables['ecdf']['sigma'].iloc[-1]) == 1.0


def test_simulate_eigensolver_failure(tmp_path, monkeypatch):
    def fail(matrix):
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(np.linalg, 'eigvalsh', fail)
    out = tmp_path / 'sim.csv'
    assert run_cli('simulate', '--n', 20, '--samples', 2, '--max-k', 1, '--out', out) == 4
    assert not out.exists()


def test_bounds_pinned_constants(tmp_path):
    out = tmp_path / 'bounds.csv'
    assert run_cli('bounds', '--max-k', 6, '--out', out) == 0
    summary = dict(read_csv_tables(out)['summary'].values.tolist())
    assert summary['c1'] == '3'
    assert summary['c2'] == '2'


def test_bounds_breach_still_writes(tmp_path):
    out = tmp_path / 'bounds.json'
    assert run_cli('bounds', '--max-k', 8, '--format', 'json', '--out', out) == 3
    payload = json.loads(out.read_text())
    assert payload['summary']['c1_sufficient'] is False
    assert payload['summary']['star_lower_passed'] is True
    failing = [row for row in payload['tables']['bounds'] if not row['holds']]
    assert failing and all(row['family'] == 'walk_upper' for row in failing)


def test_degrees_tables(tmp_path):
    out = tmp_path / 'degrees.csv'
    code = run_cli('degrees', '--n', 400, '--samples', 4, '--seed', 10, '--out', out)
    assert code in (0, 3)
    tables = read_csv_tables(out)
    assert list(tables['degrees'].columns) == ['degree', 'count']
    assert sum(int(c) for c in tables['degrees']['count']) == 4 * 400
    assert tables['samples']['seed'].tolist() == ['10', '11', '12', '13']
    summary = dict(tables['summary'].values.tolist())
    assert {'mean_tv_distance', 'median_max_degree', 'tv_threshold'} <= set(summary)


def test_output_path_is_directory(tmp_path, caplog):
    target = tmp_path / 'adir'
    target.mkdir()
    assert run_cli('moments', '--max-k', 2, '--out', target) == 1
    assert target.is_dir()
    assert 'Cannot write artifact' in caplog.text


def test_output_parent_is_file(tmp_path):
    blocker = tmp_path / 'blocker'
    blocker.write_text('')
    assert run_cli('moments', '--max-k', 2, '--out', blocker / 'moments.csv') == 1


def test_invalid_flags_exit_one(tmp_path):
    assert run_cli('simulate', '--n', 0, '--out', tmp_path / 'x.csv') == 1
    assert run_cli('moments', '--intensity', '-1', '--out', tmp_path / 'x.csv') == 1


# =============================================================================
# PROVENANCE
# =============================================================================

@pytest.mark.parametrize("fmt", ['csv', 'json'])
def test_replay_is_byte_identical(tmp_path, fmt):
    out = tmp_path / f'sim.{fmt}'
    run_cli('simulate', '--n', 60, '--samples', 4, '--max-k', 2, '--seed', 5,
            '--format', fmt, '--out', out)
    original = out.read_bytes()

    config = load_config_header(out)
    assert config.subcommand == Subcommand.SIMULATE
    assert config.base_seed == 5

    copy = tmp_path / f'copy.{fmt}'
    copy.write_bytes(original)
    out.unlink()
    assert run_cli('replay', copy) in (0, 3)
    assert out.read_bytes() == original


def test_csv_header_is_config(tmp_path):
    out = tmp_path / 'moments.csv'
    run_cli('moments', '--max-k', 1, '--out', out)
    first_line = out.read_text().split('\n', 1)[0]
    assert first_line.startswith('# config: ')
    assert load_config_header(out).output_path == str(out)


def test_replay_missing_header(tmp_path):
    bogus = tmp_path / 'bogus.csv'
    bogus.write_text('k,m_k\n1,1\n')
    assert run_cli('replay', bogus) == 1
