from __future__ import annotations

import math

import numpy as np
import pytest

from gsbound.svetlichny import MeasurementSetting, SettingsProfile

R = 1 / math.sqrt(2)
X = [1.0, 0.0, 0.0]
Y = [0.0, 1.0, 0.0]
MINUS_X = [-1.0, 0.0, 0.0]


def four_party_xy_settings() -> SettingsProfile:
    """The four-party x-y plane settings written out by hand."""
    return SettingsProfile((
        MeasurementSetting([-R, -R, 0.0], [R, -R, 0.0]),
        MeasurementSetting(X, Y),
        MeasurementSetting(X, Y),
        MeasurementSetting(Y, MINUS_X),
    ))


def five_party_xy_settings() -> SettingsProfile:
    """The five-party x-y plane settings written out by hand."""
    return SettingsProfile((
        MeasurementSetting([-R, -R, 0.0], [R, -R, 0.0]),
        MeasurementSetting(X, Y),
        MeasurementSetting(X, Y),
        MeasurementSetting(X, Y),
        MeasurementSetting(Y, MINUS_X),
    ))


def random_unit(rng, count):
    v = rng.normal(size=(count, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_profile(n: int, rng) -> SettingsProfile:
    return SettingsProfile.from_arrays(random_unit(rng, n), random_unit(rng, n))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
