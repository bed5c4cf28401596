import math

import pytest

from sphereplate.physics import DielectricModel, contrast_factor

# sapphire-like dielectric used throughout the examples
EPS_SAPPHIRE = 3.13
F_C = (1.0 - EPS_SAPPHIRE) / (1.0 + EPS_SAPPHIRE)


@pytest.fixture
def f_c() -> float:
    return F_C


@pytest.fixture
def aluminum() -> DielectricModel:
    return DielectricModel.drude(15.80, 0.04)


def dipole_closed_form(x: float, f_c: float) -> float:
    r3 = math.sqrt(1.0 / 3.0)
    return 0.5 * (math.sqrt(1 / 3 + 2 / 3 * f_c * x ** 3) - r3
                  + 2.0 * (math.sqrt(1 / 3 + 1 / 3 * f_c * x ** 3) - r3))


def test_fixture_contrast_matches_model():
    assert contrast_factor(DielectricModel.constant(EPS_SAPPHIRE)) == F_C


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def report_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
