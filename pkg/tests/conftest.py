
import pytest

from ternbound import arithfn as af


@pytest.fixture(scope="session")
def tables_1e6():
    return af.build_tables(1_000_000)


@pytest.fixture(scope="session")
def tables_1e4():
    return af.build_tables(20_000)


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    d = tmp_path / "results"
    monkeypatch.setenv("TERNBOUND_RESULTS", str(d))
    return d


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
