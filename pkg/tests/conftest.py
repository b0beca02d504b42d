import pytest

_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion and assert it."""
    lines = request.config.stash[_LINES]

    def report(number: int, passed: bool, detail: str):
        line = f"[ACCEPT {number}] {'PASS' if passed else 'FAIL'} {detail}"
        lines.append((number, line))
        print(line)
        assert passed, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines, key=lambda x: x[0]):
            terminalreporter.write_line(line)
