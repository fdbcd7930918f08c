import sys

import pytest

from texp import ZSpec, ZContext

# one representative z per region
REGION_Z = {
    "1A": ZSpec.polar(2),
    "1B": ZSpec.exp_modulus(1, -1),
    "1C": ZSpec.polar("6/5"),
    "1D": ZSpec.polar("1/2"),
    "1E": ZSpec.exp_modulus(-1, 1),
    "1F": ZSpec.polar("1/20"),
    "2A": ZSpec.polar(1, "1/3"),
    "2B": ZSpec.polar(1, "-1/3"),
    "3A": ZSpec.polar("9/10", "1/4"),
    "3B": ZSpec.polar("9/10", "-1/4"),
    "4A": ZSpec.polar(5, "1/4"),
    "4B": ZSpec.polar(5, "-1/4"),
}


@pytest.fixture(scope="session")
def region_contexts():
    return {tag: ZContext.create(z, 30) for tag, z in REGION_Z.items()}


@pytest.fixture
def two():
    return ZContext.create(ZSpec.polar(2), 40)


@pytest.fixture
def catalog_env(tmp_path, monkeypatch):
    path = tmp_path / "cat.jsonl"
    monkeypatch.setenv("TEXP_CATALOG", str(path))
    return path


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
