import pytest

acceptance_key = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(acceptance_key, {})


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(acceptance_key, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        terminalreporter.write_line(log[number])
