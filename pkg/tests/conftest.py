import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=50)
settings.load_profile("default")

_criteria: list[tuple[str, str, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    label = marker.args[0] if marker.args else item.name
    _criteria.append((label, "PASS" if report.passed else "FAIL", item.nodeid))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    # parametrized criteria pass only if every case passed
    verdicts: dict[str, str] = {}
    for label, verdict, _ in _criteria:
        if verdicts.get(label) != "FAIL":
            verdicts[label] = verdict
    terminalreporter.section("acceptance criteria")
    for label in sorted(verdicts):
        terminalreporter.write_line(f"{verdicts[label]}  {label}")
