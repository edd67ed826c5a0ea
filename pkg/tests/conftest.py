from __future__ import annotations

from pathlib import Path

import pytest
import torch

from gqe import load_hamiltonian

torch.set_num_threads(1)  # tiny float64 models; thread sync only slows them

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
H2_PATH = DATA_DIR / "h2_sto3g.json"
BEH2_PATH = DATA_DIR / "beh2_sto3g.json"


@pytest.fixture(scope="session")
def h2_path() -> str:
    return str(H2_PATH)


@pytest.fixture(scope="session")
def beh2_path() -> str:
    return str(BEH2_PATH)


@pytest.fixture(scope="session")
def h2():
    return load_hamiltonian(str(H2_PATH))


@pytest.fixture(scope="session")
def beh2():
    return load_hamiltonian(str(BEH2_PATH))
