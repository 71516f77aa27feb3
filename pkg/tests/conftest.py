import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("QKROOTS_HYPOTHESIS_EXAMPLES", "30")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

import pytest

_CRITERIA = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion; usage: ``with criterion(n, title, budget_s):``."""
    import contextlib
    import time

    @contextlib.contextmanager
    def run(number, title, budget_s):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            elapsed = time.perf_counter() - t0
            ok = ok and elapsed < budget_s
            line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.2f} s, budget {budget_s} s)"
            _CRITERIA.append((number, line))
            print(line)
        assert elapsed < budget_s, f"runtime {elapsed:.2f} s exceeds {budget_s} s"

    return run


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_CRITERIA):
            terminalreporter.write_line(line)
