import numpy as np
import pytest

from ddshape.model import GAMMA_H, ClassicalSignal, Nucleus, SpinSystem

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def single_proton_2t() -> SpinSystem:
    """One proton at 2 T with the reference hyperfine vector (kHz x 2pi)."""
    hyperfine = TWO_PI * np.array([19.12e3, 55.21e3, -96.82e3])
    return SpinSystem(b_z=2.0, nuclei=[Nucleus(gamma_n=GAMMA_H, hyperfine=hyperfine)])


@pytest.fixture(scope="session")
def two_protons_1p5t() -> SpinSystem:
    """Two protons at 1.5 T (the two-dip spectrum configuration)."""
    a1 = TWO_PI * np.array([0.0, 14.43e3, -46.63e3])
    a2 = TWO_PI * np.array([-10.93e3, 6.31e3, -42.34e3])
    return SpinSystem(
        b_z=1.5,
        nuclei=[Nucleus(GAMMA_H, a1), Nucleus(GAMMA_H, a2)],
    )


@pytest.fixture(scope="session")
def two_tone_signal() -> ClassicalSignal:
    """0.2 G two-tone signal near 21.29 MHz."""
    return ClassicalSignal.from_field(
        0.2e-4, [TWO_PI * 21.288e6, TWO_PI * 21.295e6]
    )
