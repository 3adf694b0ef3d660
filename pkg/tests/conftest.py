import hypothesis
import numpy as np
import pytest

from bellwalk.coin import CoinParams, SpinVector, build_coin
from bellwalk.config import COIN_PRESETS, SPIN_PRESETS

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)

# displacement of spin component i per step
SHIFTS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@pytest.fixture(params=sorted(COIN_PRESETS))
def preset(request):
    return CoinParams(*COIN_PRESETS[request.param])


@pytest.fixture
def p1():
    return CoinParams(*COIN_PRESETS["p1"])


@pytest.fixture
def initen():
    return SpinVector(*SPIN_PRESETS["initen"])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_spin(rng):
    raw = rng.normal(size=4) + 1j * rng.normal(size=4)
    return SpinVector.from_sequence(raw, normalize=True)


def dense_evolution(spin, params, T):
    """Full (2T+1)^2 lattice evolution; psi[i, T + m, T + n]"""
    size = 2 * T + 1
    psi = np.zeros((4, size, size), dtype=complex)
    psi[:, T, T] = spin.array
    coin = build_coin(params)
    states = [psi.copy()]
    for _ in range(T):
        psi = np.einsum("ij,jxy->ixy", coin, psi)
        psi = np.stack([
            np.roll(np.roll(psi[i], dx, axis=0), dy, axis=1)
            for i, (dx, dy) in enumerate(SHIFTS)
        ])
        states.append(psi.copy())
    return states
