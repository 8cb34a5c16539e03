"""Shared fixtures: canonical potentials and document helpers."""

import json

import numpy as np
import pytest

from neumann_cert import constants
from neumann_cert.potential import Potential


@pytest.fixture()
def mid_band() -> Potential:
    """Constant potential strictly between the first two eigenvalue levels."""
    lam1 = constants.lambda_n(1, 1.0)
    lam2 = constants.lambda_n(2, 1.0)
    return Potential.constant(0.5 * (lam1 + lam2), 1.0)


@pytest.fixture()
def lam2_const() -> Potential:
    """The resonant constant potential at the second eigenvalue."""
    return Potential.constant(constants.lambda_n(2, 1.0), 1.0)


@pytest.fixture()
def write_json(tmp_path):
    def _write(name: str, doc: dict) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(doc), encoding="utf-8")
        return str(path)
    return _write


def random_pc(rng: np.random.Generator, L: float = 1.0, cells: int = 4,
              lo: float = -10.0, hi: float = 50.0) -> Potential:
    cuts = np.sort(rng.uniform(0.05 * L, 0.95 * L, cells - 1))
    bps = np.concatenate([[0.0], cuts, [L]])
    return Potential.piecewise_constant(bps, rng.uniform(lo, hi, cells))
