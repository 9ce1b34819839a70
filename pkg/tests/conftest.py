import sys

import pytest

from reppricing.market_model import Model, figure_params, validate_params

FIGURES = ("fig1a", "fig1b", "fig2a", "fig2b")


@pytest.fixture
def fig1a():
    return figure_params("fig1a")[1]


@pytest.fixture
def fig1b():
    return figure_params("fig1b")[1]


@pytest.fixture(params=FIGURES)
def figure(request):
    """(name, model, params) for each preset."""
    model, p = figure_params(request.param)
    return request.param, model, p


def params(**overrides):
    base = dict(u=2.0, c=1.0, r_L=0.8, r_H=0.9, k=1.4, n=100)
    base.update(overrides)
    return validate_params(base)


__all__ = ["FIGURES", "Model", "params"]


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
