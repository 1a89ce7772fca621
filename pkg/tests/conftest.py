import pytest

from defexp import Params, enumerate_zeros, make_context

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when != "call":
        return
    number, title = marker.args
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    _CRITERIA[number] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        verdict, title, detail = _CRITERIA[number]
        line = f"criterion {number:2d}: {verdict}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ctx50():
    return make_context(50)


@pytest.fixture(scope="session")
def zero_lists(ctx50):
    """Zeros computed once per session, keyed by (q, n_max)."""
    store = {}

    def get(q: str, n_max: int = 30):
        have = store.get(q, [])
        if len(have) < n_max:
            have = enumerate_zeros(n_max, Params.from_q(q), ctx50, known=have)
            store[q] = have
        return have[:n_max]

    return get


@pytest.fixture(scope="session")
def half():
    return Params.from_q("0.5")
