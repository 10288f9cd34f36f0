import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from signorini_lab.geometry import boolean_ops, circle  # noqa: E402
from signorini_lab.mesh import triangulate  # noqa: E402
from signorini_lab.scene import with_gamma  # noqa: E402

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def unit_disk():
    return with_gamma(circle((0.0, 0.0), 1.0, 128, source="omega"), None)


@pytest.fixture(scope="session")
def annulus_mesh(unit_disk):
    hole = circle((0.0, 0.0), 0.3, 128, source="obstacle1")
    return triangulate(boolean_ops(unit_disk, hole, "difference"), 1 / 32)


@pytest.fixture
def record(request):
    """Attach a one-line summary of measured values to an acceptance test."""
    def _record(text: str) -> None:
        request.node.user_properties.append(("summary", text))
    return _record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        summary = "; ".join(v for k, v in item.user_properties if k == "summary")
        if rep.outcome == "failed" and not summary:
            summary = str(rep.longrepr).strip().splitlines()[-1][:200]
        _ACCEPTANCE.append((marker.args[0], marker.args[1], rep.outcome, summary))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, outcome, summary in sorted(_ACCEPTANCE):
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"[{status}] criterion {num:2d}: {title} | {summary}")
