import io
import math

import numpy as np
import pytest

from circumradiusfem.Base import Auxiliary
from circumradiusfem.Base.DataLogger import DataLoggerSweep
from circumradiusfem.Base.DataOutput import DataOutputCsv, DataOutputMemory
from circumradiusfem.Base.DataSource import ParameterSweepDataSource


def _square(point: dict) -> dict:
    return {'x': point['x'], 'square': point['x'] ** 2}


# {{{ auxiliary

def test_format_value():
    assert Auxiliary.format_value(None) == ''
    assert Auxiliary.format_value(True) == 'true'
    assert Auxiliary.format_value(np.bool_(False)) == 'false'
    assert Auxiliary.format_value(3) == '3'
    assert float(Auxiliary.format_value(0.1)) == 0.1
    assert Auxiliary.format_value(math.inf) == 'inf'


def test_parse_number_list():
    assert Auxiliary.parse_number_list('8, 16,32', int) == [8, 16, 32]
    assert Auxiliary.parse_number_list('1.5') == [1.5]
    with pytest.raises(ValueError):
        Auxiliary.parse_number_list(' , ')


def test_parallel_map_keeps_order():
    items = list(range(20))
    assert Auxiliary.parallel_map(lambda i: i * i, items, max_workers=4) == [i * i for i in items]


def test_worker_count(monkeypatch):
    monkeypatch.delenv(Auxiliary.THREADS_ENV_VAR, raising=False)
    assert Auxiliary.worker_count() == 1
    monkeypatch.setenv(Auxiliary.THREADS_ENV_VAR, '3')
    assert Auxiliary.worker_count() == 3
    monkeypatch.setenv(Auxiliary.THREADS_ENV_VAR, '0')
    with pytest.raises(ValueError):
        Auxiliary.worker_count()


def test_spawned_generators_are_reproducible():
    first = [g.random() for g in Auxiliary.spawn_generators(5, 3)]
    second = [g.random() for g in Auxiliary.spawn_generators(5, 3)]
    assert first == second
    assert len(set(first)) == 3


def test_json_round_trip(tmp_path):
    file_name = str(tmp_path / 'sub' / 'config.json')
    Auxiliary.dump_json({'alphas': [1.0, 1.6], 'seed': 3}, file_name)
    assert Auxiliary.load_json(file_name) == {'alphas': [1.0, 1.6], 'seed': 3}

# }}}


# {{{ sources, outputs and logger

def test_sweep_rows_in_parameter_order():
    source = ParameterSweepDataSource(('x', 'square'), [{'x': x} for x in (3, 1, 2)], _square, max_workers=3)
    assert [row['x'] for row in source.read_data()] == [3, 1, 2]


def test_sweep_rejects_unknown_names():
    source = ParameterSweepDataSource(('x',), [{'x': 1}], _square)
    with pytest.raises(ValueError):
        list(source.read_data())


def test_logger_writes_header_and_rows(tmp_path):
    source = ParameterSweepDataSource(('x', 'square'), [{'x': 0.5}, {'x': 2.0}], _square)
    stream = io.StringIO()
    memory = DataOutputMemory()
    file_name = str(tmp_path / 'out' / 'rows.csv')
    rows = DataLoggerSweep(
        {'squares': source},
        {'stream': DataOutputCsv(None, stream=stream), 'file': DataOutputCsv(file_name), 'memory': memory},
    ).run_data_logging()
    expected = 'x,square\n0.5,0.25\n2,4\n'
    assert stream.getvalue() == expected
    with open(file_name) as f:
        assert f.read() == expected
    assert memory.rows == rows


def test_csv_settings_validation():
    with pytest.raises(ValueError):
        DataOutputCsv(None, csv_writer_settings={'quoting': 1})
    output = DataOutputCsv(None, csv_writer_settings={'delimiter': ';'})
    assert output.csv_writer_settings['delimiter'] == ';'


def test_logger_requires_source():
    with pytest.raises(ValueError):
        DataLoggerSweep({}, {'memory': DataOutputMemory()})

# }}}
