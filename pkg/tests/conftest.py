import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from omlkit import catalog  # noqa: E402
from omlkit.formats import load  # noqa: E402


@pytest.fixture(scope="session")
def catalog_lattices():
    return {name: load(f"catalog:{name}").lattice for name in catalog.LATTICES}


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
