import sys
from pathlib import Path

import pytest

from sfembloch.cellmesh import Bilayer, Homogeneous, MatrixInclusion, MatrixPore, UnitCell
from sfembloch.elasticity import ALUMINUM, BRASS

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def homogeneous_cell():
    return UnitCell(1.0, 1.0, Homogeneous(ALUMINUM))


@pytest.fixture
def bilayer_cell():
    return UnitCell(1.0, 1.0, Bilayer(ALUMINUM, BRASS))


@pytest.fixture
def pore_cell():
    return UnitCell(1.0, 1.0, MatrixPore(ALUMINUM, 0.5))


@pytest.fixture
def inclusion_cell():
    return UnitCell(1.0, 1.0, MatrixInclusion(ALUMINUM, BRASS, 0.5))


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    results = getattr(acceptance, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
