import numpy as np
import pytest

from maglattice.atom import default_rb87
from maglattice.lattice import FourierExpansion, LatticeGeometry


@pytest.fixture(scope="session")
def rb87():
    return default_rb87()


def single_mode_expansion(period=1e-6, prefactor=2.105e-8, C=1.0, S=0.0):
    """One +/- mode pair along a1: the analytically solvable stripe guide.

    The lattice part of the field has magnitude b(z) = prefactor * k *
    sqrt(C^2+S^2) * exp(-k z), a vector rotating with x at fixed |b|.
    """
    geom = LatticeGeometry.from_primitives([period, 0.0], [0.0, period])
    k = 2 * np.pi / period
    return FourierExpansion(
        geometry=geom,
        n=np.array([1]),
        m=np.array([0]),
        k_vec=np.array([[k, 0.0]]),
        k_mag=np.array([k]),
        C=np.array([float(C)]),
        S=np.array([float(S)]),
        prefactor=prefactor,
        truncation_threshold=0.0,
    )


@pytest.fixture
def stripe_expansion():
    return single_mode_expansion()
