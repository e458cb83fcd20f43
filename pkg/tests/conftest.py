import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.schemes import Scheme1Config, Scheme2Config
from src.source.state import DotParams
from src.units import CONSTANTS, NM, CellParams, cell_from_datasheet


@pytest.fixture
def dot() -> DotParams:
    """1.398/1.400 eV photons, 1 ns lifetime, 1 μeV splitting."""
    return DotParams.from_energies(1.398, 1.400, 1e9, 1.0)


@pytest.fixture
def dot_no_fss() -> DotParams:
    return DotParams.from_energies(1.398, 1.400, 1e9, 0.0)


@pytest.fixture
def dot_strong_fss(dot) -> DotParams:
    """omega_S / Gamma = 10."""
    return DotParams(gamma=dot.gamma, k_H1=dot.k_H1, k_H2=dot.k_H2, k_S=10 * dot.gamma / CONSTANTS.c)


@pytest.fixture
def cell() -> CellParams:
    """52 mrad/V at 830 nm, n0 = 1.5, 20 mm crystal."""
    return cell_from_datasheet(0.052, 830 * NM)


@pytest.fixture
def inert_cell(cell) -> CellParams:
    return CellParams(eta=0.0, s=cell.s, v0=cell.v0)


@pytest.fixture
def scheme1_cfg(dot, cell) -> Scheme1Config:
    return Scheme1Config(dot=dot, cell1=cell, cell2=cell, L1=0.5, L2=0.5)


@pytest.fixture
def scheme2_cfg(dot, cell) -> Scheme2Config:
    return Scheme2Config(dot=dot, cell=cell, L1=0.5, L2=0.5)
