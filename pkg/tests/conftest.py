from functools import lru_cache

import numpy as np
import pytest

from adialab.diagnostics import amplitudes, spectrum_path
from adialab.models import (DrivenTwoLevelParams, driven_two_level, landau_zener,
                            linear_interpolation, rotating_field)
from adialab.propagate import evolve


class Run:
    """Model, spectrum path, trace and amplitudes for one evolution from a level."""

    def __init__(self, model, steps, level=0):
        self.model = model
        self.path = spectrum_path(model, steps)
        self.trace = evolve(model, self.path.vectors[0][:, level].copy(), steps)
        self.amp = amplitudes(self.trace, self.path)


@lru_cache(maxsize=None)
def lz_run(T, steps=40_000):
    return Run(landau_zener(0.1, T), steps)


@lru_cache(maxsize=None)
def rabi_run(T=None, steps=200_000):
    return Run(driven_two_level(DrivenTwoLevelParams(1.0, 0.02, 1.0), T), steps)


@lru_cache(maxsize=None)
def rotating_run(steps=20_000):
    return Run(rotating_field(1.0, 200.0, 1), steps)


@pytest.fixture
def constant_run():
    h = np.array([[-0.4, 0.1 - 0.2j], [0.1 + 0.2j, 0.6]])
    return Run(linear_interpolation(h, h, 20.0), 400)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
