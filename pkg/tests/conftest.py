import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria report: each part starts as FAIL and flips on success
_CRITERIA = {}


class _Part:
    def __init__(self, key, label):
        self.key = key
        _CRITERIA[key] = (label, False, "")

    def passed(self, detail=""):
        label = _CRITERIA[self.key][0]
        _CRITERIA[self.key] = (label, True, detail)


@pytest.fixture
def criterion():
    return _Part


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    by_num = {}
    for (num, part), (label, ok, detail) in sorted(_CRITERIA.items()):
        by_num.setdefault(num, []).append((part, label, ok, detail))
    for num, parts in by_num.items():
        status = "PASS" if all(ok for _, _, ok, _ in parts) else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}")
        for part, label, ok, detail in parts:
            terminalreporter.write_line(f"    {part} {label}: {'pass' if ok else 'FAIL'} {detail}".rstrip())
