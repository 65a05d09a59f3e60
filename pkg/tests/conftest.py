import pytest

from basketcheck.data import fixture_path, read_fixture
from basketcheck.prism import build_dtmc, parse_model

CRITERIA = []


@pytest.fixture(scope="session")
def model_text():
    return read_fixture("shopping_basket.pm")


@pytest.fixture(scope="session")
def shop(model_text):
    return build_dtmc(parse_model(model_text))


@pytest.fixture(scope="session")
def model_path():
    return str(fixture_path("shopping_basket.pm"))


@pytest.fixture(scope="session")
def props_path():
    return str(fixture_path("shopping_basket.pctl"))


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for the acceptance summary, then assert."""

    def check(name, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else "")
        CRITERIA.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
