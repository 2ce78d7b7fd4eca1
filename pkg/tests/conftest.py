import os

import pytest
from hypothesis import HealthCheck, settings

from wavelet_cn import Backend, CnCombo, FieldParams, Rep

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def zp(p, prec=30):
    return FieldParams(Backend.ZP, p, prec)


def fpt(p, prec=30):
    return FieldParams(Backend.FPT, p, prec)


def x_combo(params, depth=0, level=1):
    """f(x) = x."""
    return CnCombo.polynomial(params, [0, 1], level=level, depth=depth)


def paper_g(params):
    """x + chi_1 - chi_2 at level 1, depth 1."""
    return (x_combo(params, 1) + CnCombo.chi(params, Rep((1,)), 1, 1)
            - CnCombo.chi(params, Rep((2,)), 1, 1))


def paper_f(params):
    """x + chi_1 at level 1, depth 1."""
    return x_combo(params, 1) + CnCombo.chi(params, Rep((1,)), 1, 1)


@pytest.fixture
def Z3():
    return zp(3)


@pytest.fixture
def F3():
    return fpt(3)


# acceptance criteria report one line each in the terminal summary
ACCEPTANCE = {}


def record_acceptance(number: int, title: str, ok: bool, detail: str = "") -> str:
    line = f"ACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'} {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
