import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "passed": True, "skipped": False, "seen": 0})
    if rep.when == "call" or rep.failed:
        entry["seen"] += 1
        if rep.failed:
            entry["passed"] = False
        elif rep.skipped and rep.when == "call":
            entry["skipped"] = True
    elif rep.skipped:
        entry["skipped"] = True


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        if not e["passed"]:
            status = "FAIL"
        elif e["seen"] == 0 and e["skipped"]:
            status = "SKIP"
        else:
            status = "PASS"
        terminalreporter.write_line(f"criterion {number:>2}  {status}  {e['title']}")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def reports_dir():
    d = Path(__file__).resolve().parent.parent / "reports"
    d.mkdir(exist_ok=True)
    return d
