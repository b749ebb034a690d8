import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", parent=settings.get_profile("default"), max_examples=300)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """record(number, passed, summary): one report line per acceptance criterion."""
    store = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number: int, passed: bool, summary: str):
        store[number] = (bool(passed), summary)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {summary}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(_ACCEPTANCE, None)
    if not store:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(store):
        passed, summary = store[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {summary}")
    n_pass = sum(p for p, _ in store.values())
    terminalreporter.write_line(f"{n_pass}/{len(store)} criteria pass")
