"""Shared fixtures: validation reports are expensive, compute them once."""

import time

import pytest

from qdot import validate


@pytest.fixture(scope="session")
def expectations():
    return validate.load_expectations()


def _timed(func, exp):
    t0 = time.perf_counter()
    report = func(exp)
    return report, time.perf_counter() - t0


@pytest.fixture(scope="session")
def table1_report(expectations):
    return _timed(validate.reproduce_table1, expectations)


@pytest.fixture(scope="session")
def poly_report(expectations):
    return _timed(validate.reproduce_polynomials, expectations)


@pytest.fixture(scope="session")
def table2_report(expectations):
    return _timed(validate.reproduce_table2, expectations)


@pytest.fixture(scope="session")
def table3_report(expectations, table2_report):
    # table2 first so its timing is not flattered by the shared spectrum cache
    return _timed(validate.reproduce_table3, expectations)


@pytest.fixture(scope="session")
def table4_report(expectations, table2_report):
    return _timed(validate.reproduce_table4, expectations)


@pytest.fixture(scope="session")
def bound_report(expectations):
    return _timed(validate.reproduce_bound_states, expectations)
