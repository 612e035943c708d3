"""Shared fixtures plus the acceptance-battery summary hook."""

import json

import pytest

# filled by the battery fixture in test_acceptance.py, printed at the end
ACCEPTANCE_KEY = pytest.StashKey()


@pytest.fixture
def json_file(tmp_path):
    """Return a writer that dumps an object to a JSON file and hands back the path."""
    counter = iter(range(10_000))

    def write(obj, name=None):
        path = tmp_path / (name or f"input-{next(counter)}.json")
        path.write_text(json.dumps(obj))
        return str(path)

    return write


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
