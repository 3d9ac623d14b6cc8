import pytest

from jmatrix.basis import ChannelSpec
from jmatrix.scattering import PotentialSpec


@pytest.fixture
def channel():
    """Neutral s-wave channel at the benchmark basis scale."""
    return ChannelSpec(lam=5.0, ell=0, charge=0.0)


@pytest.fixture
def benchmark_potential():
    """Short-range barrier with a known sharp s-wave resonance near 3.43."""
    return PotentialSpec(v0=7.5, power=2, decay=1.0)
