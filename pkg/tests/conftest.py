import numpy as np
import pytest

from herald import fixed_matching, load_golden
from herald.errors import GenerationExhausted
from herald.instance import ScenarioConfig, generate_instance


@pytest.fixture
def ex2():
    return load_golden("example2-k1").instance


@pytest.fixture
def ex2_matching(ex2):
    return fixed_matching(ex2)


def small_instances(count, seed=0, n_range=(5, 10), m_range=(3, 8), sizes=(2, 4), l_per_worker=3):
    """Random feasible instances; infeasible draws are skipped."""
    rng = np.random.default_rng(seed)
    out, s = [], 0
    while len(out) < count:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(m_range[0], m_range[1] + 1))
        cfg = ScenarioConfig("small", (1.0, 5.0), sizes, (m,), (n,), l_per_worker=l_per_worker)
        try:
            out.append(generate_instance(cfg, seed * 100_003 + s))
        except GenerationExhausted:
            pass
        s += 1
    return out


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion, echoed in the terminal summary."""

    def record(number, passed, detail):
        ACCEPTANCE[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
