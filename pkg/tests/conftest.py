import numpy as np
import pytest

from gsfmkit import ambiguity as amb
from gsfmkit import wavegen as wg


@pytest.fixture(scope="session")
def fig27_sfm_params():
    # T = 250 ms, f_m = 20 Hz, sweep 200 Hz, f_c = 2 kHz
    return wg.SfmParams(duration=0.25, carrier=2000.0, sweep=200.0, mod_freq=20.0)


@pytest.fixture(scope="session")
def fig31_gsfm_params():
    # T = 250 ms, sweep 200 Hz, rho = 2, alpha = 80 (C = 5), sine IF
    return wg.GsfmParams(
        duration=0.25, carrier=2000.0, sweep=200.0, rho=2.0, alpha=80.0,
        variant=wg.GSFI, symmetry=wg.NONSYMMETRIC,
    )


@pytest.fixture(scope="session")
def fig46_gsfm_params():
    # T = 1 s, f_c = 2 kHz, sweep 1 kHz, rho = 1.25, C = 27, cosine IF
    return wg.GsfmParams(
        duration=1.0, carrier=2000.0, sweep=1000.0, rho=1.25, cycles=27.0,
        variant=wg.GCFI, symmetry=wg.EVEN,
    )


@pytest.fixture(scope="session")
def fig46_gsfm(fig46_gsfm_params):
    return wg.gen_gsfm(fig46_gsfm_params)


@pytest.fixture(scope="session")
def fig46_surface(fig46_gsfm):
    return amb.xaf(
        fig46_gsfm, fig46_gsfm, model=amb.BROADBAND,
        velocities=amb.default_velocities(20.0, 0.25),
    )


@pytest.fixture(scope="session")
def coarse_velocities():
    return np.arange(-20.0, 20.0 + 0.5, 0.5)
