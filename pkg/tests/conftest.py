import pytest

from growthlab.growthfn import build
from growthlab.schedule import build_schedule, parse_omega


@pytest.fixture(scope="session")
def log_omega():
    return parse_omega("log")


@pytest.fixture(scope="session")
def certified_schedule(log_omega):
    return build_schedule(1, "certified", d={1: 3}, omega=log_omega)


@pytest.fixture(scope="session")
def certified_table(certified_schedule):
    return build(certified_schedule, 5000)


@pytest.fixture(scope="session")
def demo_schedule():
    return build_schedule(1, "demo", d={1: 3}, n={1: 8})


@pytest.fixture(scope="session")
def demo_table(demo_schedule):
    return build(demo_schedule, 100)


# -- acceptance criteria: one summary line each ------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    cid, text = mark.args
    verdict = "PASS" if rep.passed else "FAIL"
    if _criteria.get(cid, ("PASS",))[0] == "PASS":
        _criteria[cid] = (verdict, text)


def _order(cid):
    digits = "".join(ch for ch in cid if ch.isdigit())
    return int(digits), cid


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for cid in sorted(_criteria, key=_order):
        verdict, text = _criteria[cid]
        terminalreporter.write_line(f"criterion {cid:<3} {verdict}  {text}")
