import os
import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cartanhom.families import DEFAULT_CONFIGS, FamilyConfig
from cartanhom.superpoly import Signature, random_homogeneous

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

SIG = Signature(4, 4)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
parities = st.integers(min_value=0, max_value=1)


def poly(seed, parity, sig=SIG, max_weight=3):
    return random_homogeneous(sig, parity, max_weight, random.Random(seed))


@pytest.fixture(scope="session")
def desk():
    return {c.label(): c for c in DEFAULT_CONFIGS}


def cfg(family, m=None, n=None, lam=0):
    defaults = {"W": (4, 4), "S": (4, 4), "H": (4, 4), "K": (5, 4), "HO": (4, 4), "SHO": (4, 4),
                "KO": (4, 5), "SKO": (4, 5)}
    dm, dn = defaults[family]
    return FamilyConfig(family, m or dm, n or dn, lam)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def record_criterion(number, ok, detail=""):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
