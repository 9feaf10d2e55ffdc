import math

import numpy as np
import pytest

import qha
from qha.representation import log_gaussian, make_representation

LN2 = math.log(2.0)


@pytest.fixture(scope="session")
def affine_small():
    """Small affine setup: N=96 basis, 96x32 grid, everything interior-safe."""
    basis = qha.FrequencyBasis(96, 2.0**-4, LN2 / 8)
    group = qha.AffineGroup(basis.lattice_step)
    grid = qha.build_grid(
        qha.AffineBox(-3.0, 3.0, math.exp(-1.4), math.exp(1.4)), (96, 32), group
    )
    rep = make_representation(basis, group)
    return basis, group, grid, rep


@pytest.fixture(scope="session")
def cyclic16():
    basis = qha.CyclicBasis(16)
    group = qha.CyclicPhaseSpace(16)
    grid = qha.build_grid(None, None, group)
    rep = make_representation(basis, group)
    return basis, group, grid, rep


@pytest.fixture()
def rng():
    return np.random.default_rng(42)


def interior_vec(basis, center_off=4, width=4.0, x_shift=0.0):
    """Log-Gaussian near the omega=1 index (affine helper)."""
    j1 = round(math.log(1.0 / basis.omega_min) / basis.lattice_step)
    return log_gaussian(basis, j1 + center_off, width, x_shift)


def unit_random(basis, rng):
    v = rng.standard_normal(basis.size) + 1j * rng.standard_normal(basis.size)
    return v / basis.norm(v)
