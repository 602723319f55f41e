import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Print one PASS/FAIL line per acceptance criterion."""
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.module.__name__ == "test_acceptance":
        criterion = getattr(item.function, "_criterion", None)
        if criterion:
            verdict = "PASS" if rep.passed else "FAIL"
            print(f"\nACCEPTANCE {verdict}: {criterion}", file=sys.stderr)
