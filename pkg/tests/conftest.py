import pytest
from hypothesis import settings

from qsobolev.families import asci, stieltjes_wigert

# mpmath at 384 bits is slow; keep generated cases few and undeadlined
settings.register_profile("qsobolev", max_examples=25, deadline=None)
settings.load_profile("qsobolev")


@pytest.fixture(scope="session")
def hermite_like():
    """ASCI a=-1, q=1/2 (beta_n = 0)."""
    return asci(-1, "1/2")


@pytest.fixture(scope="session")
def sw_half():
    return stieltjes_wigert("1/2")


def rel(a, b):
    m = max(abs(a), abs(b))
    return abs(a - b) / m if m else abs(a - b)


# acceptance criterion -> list of (part, ok, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def record(criterion, part, ok, detail):
    ACCEPTANCE.setdefault(criterion, []).append((part, bool(ok), detail))
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[crit]
        ok = all(p[1] for p in parts)
        tr.write_line(f"criterion {crit}: {'PASS' if ok else 'FAIL'}")
        for part, pok, detail in parts:
            tr.write_line(f"    {'pass' if pok else 'FAIL'} {part}: {detail}")
