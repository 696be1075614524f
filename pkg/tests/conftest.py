import pytest

from graphene_coupler.device import build_spec

DEFAULT_CONFIG = dict(
    well_width_nm=200.0,
    separation_nm=50.0,
    barrier_meV=500.0,
    source_gate_meV=450.0,
    drain_gate_meV=450.0,
    k1d_over_pi=4.96,
    mass_ratio=0.067,
)

_criteria = []


@pytest.fixture
def default_config():
    return dict(DEFAULT_CONFIG)


@pytest.fixture
def default_spec():
    return build_spec(DEFAULT_CONFIG)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = ""
    if report.failed and call.excinfo is not None:
        detail = str(call.excinfo.value).splitlines()[0] if str(call.excinfo.value) else ""
    _criteria.append((number, title, report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, detail in sorted(_criteria):
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{verdict}] criterion {number:>2}: {title}"
        if detail:
            line += f"  -- {detail}"
        terminalreporter.write_line(line)
