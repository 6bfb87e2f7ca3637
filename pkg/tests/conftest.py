import os
import sys

import pytest
from hypothesis import HealthCheck, settings

from fillvol.builtins import complex_spec
from fillvol.complexes import instantiate_window

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("suite", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

_windows = {}


def window(name, r):
    key = (name, r)
    if key not in _windows:
        _windows[key] = instantiate_window(complex_spec(name), r)
    return _windows[key]


@pytest.fixture(scope="session")
def win():
    return window


_tables = {}


def table(name, n, k_max, r):
    from fillvol.functions import fv_table
    key = (name, n, k_max, r)
    if key not in _tables:
        _tables[key] = fv_table(complex_spec(name), n, k_max, window=window(name, r))
    return _tables[key]


@pytest.fixture(scope="session")
def fv():
    return table


ACCEPTANCE = []


def record(name, ok, detail):
    ACCEPTANCE.append((name, ok, detail))
    assert ok, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
