"""
Coin, shift and exact evolution of the 2d Bell-pair walk.

The walker lives on H_spin (x) H_position. Spin components 0 and 3 only ever
occupy the diagonal (m, m) and components 1 and 2 the anti-diagonal (m, -m),
so a state at time t is stored as two arrays of t + 1 sites each
(m = -t, -t+2, ..., t). One step costs O(t).
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import NORM_TOL
from .errors import InvalidArgument

TWO_PI = 2 * np.pi

# Pauli matrices for the tensor-product form of the coin
SIGMA = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]]),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _canonical_turn(value, name):
    if isinstance(value, Fraction):
        return float(value % 1)
    value = float(value)
    if not math.isfinite(value):
        raise InvalidArgument(f"coin parameter {name} must be finite, got {value}")
    turn = value % 1.0
    # tiny negatives round up to exactly 1.0
    return 0.0 if turn == 1.0 else turn


@dataclass(frozen=True)
class CoinParams:
    """Coin angles as fractions of a turn (angle = 2*pi*value), reduced mod 1"""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, _canonical_turn(getattr(self, name), name))

    @property
    def lambdas(self):
        return bell_phases(self)

    def as_tuple(self):
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class SpinVector:
    """Amplitudes of the four spin basis states |0>..|3> at the origin"""

    a0: complex
    a1: complex
    a2: complex
    a3: complex

    @classmethod
    def from_sequence(cls, values, normalize=False):
        arr = np.asarray(values, dtype=complex).reshape(-1)
        if arr.shape != (4,):
            raise InvalidArgument(f"spin needs 4 amplitudes, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgument("spin amplitudes must be finite")
        if normalize:
            nrm = np.linalg.norm(arr)
            if nrm == 0:
                raise InvalidArgument("cannot normalize the zero spin vector")
            arr = arr / nrm
        return cls(*(complex(v) for v in arr))

    @property
    def array(self):
        return np.array([self.a0, self.a1, self.a2, self.a3], dtype=complex)

    def norm(self):
        return float(np.linalg.norm(self.array))

    def is_normalized(self, tol=NORM_TOL):
        return abs(self.norm() ** 2 - 1.0) <= tol


@dataclass(frozen=True)
class WalkState:
    """
    Sparse walk state at time t.

    plus_diag[k] = (A0, A3) at site (m, m) and anti_diag[k] = (A1, A2) at site
    (m, -m), with m = -t + 2k.
    """

    t: int
    plus_diag: np.ndarray
    anti_diag: np.ndarray

    def __post_init__(self):
        if int(self.t) != self.t or self.t < 0:
            raise InvalidArgument(f"time must be a non-negative integer, got {self.t}")
        for name in ("plus_diag", "anti_diag"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (self.t + 1, 2):
                raise InvalidArgument(
                    f"{name} must have shape ({self.t + 1}, 2), got {arr.shape}"
                )
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "t", int(self.t))

    @property
    def sites(self):
        return np.arange(-self.t, self.t + 1, 2)

    def norm(self):
        return norm(self)


def bell_phases(params):
    """Eigenphases (lambda_1..lambda_4) of the coin in the Bell basis; they sum to 0"""
    x, y, z = params.as_tuple()
    return np.array([
        -TWO_PI * (z + y),
        -TWO_PI * (z - y),
        TWO_PI * (z - x),
        TWO_PI * (z + x),
    ])


def _pair_block(angle, phase_turns):
    """Diagonal and off-diagonal entries of one 2x2 coin block."""
    phase = np.exp(1j * TWO_PI * phase_turns)
    return phase * np.cos(TWO_PI * angle), -1j * phase * np.sin(TWO_PI * angle)


def build_coin(params):
    """The 4x4 coin matrix C(x, y, z)"""
    d03, o03 = _pair_block(params.y, -params.z)
    d12, o12 = _pair_block(params.x, params.z)
    coin = np.zeros((4, 4), dtype=complex)
    coin[0, 0] = coin[3, 3] = d03
    coin[0, 3] = coin[3, 0] = o03
    coin[1, 1] = coin[2, 2] = d12
    coin[1, 2] = coin[2, 1] = o12
    return coin


def bell_basis():
    """Columns are |Phi_1>..|Phi_4> = (|0> +- |3>)/sqrt2, (|1> +- |2>)/sqrt2"""
    r = 1 / np.sqrt(2)
    return np.array([
        [r, r, 0, 0],
        [0, 0, r, r],
        [0, 0, r, -r],
        [r, -r, 0, 0],
    ], dtype=complex)


def build_coin_from_bell(params):
    """C = sum_k exp(i lambda_k) |Phi_k><Phi_k|"""
    phi = bell_basis()
    return (phi * np.exp(1j * bell_phases(params))) @ phi.conj().T


def build_coin_pauli(theta1, theta2, xi, alpha=0.0):
    """
    Coin in Pauli tensor form with an extra U(1) phase alpha.

    theta1 drives the (0, 3) block, theta2 the (1, 2) block, so
    build_coin_pauli(2*pi*y, 2*pi*x, 2*pi*z) == build_coin(CoinParams(x, y, z)).
    """
    eye, s1, s2, s3 = SIGMA
    i4 = np.eye(4, dtype=complex)
    s33 = np.kron(s3, s3)
    s11 = np.kron(s1, s1)
    s22 = np.kron(s2, s2)
    first = (i4 + s33) * np.cos(theta1) - 1j * (s11 - s22) * np.sin(theta1)
    second = (i4 - s33) * np.cos(theta2) - 1j * (s11 + s22) * np.sin(theta2)
    return 0.5 * (np.exp(1j * (alpha - xi)) * first + np.exp(1j * (alpha + xi)) * second)


def initial_state(spin):
    """Walk state at t = 0 with the whole spin vector at the origin"""
    if not spin.is_normalized():
        raise InvalidArgument(f"initial spin must be normalized, |s| = {spin.norm():.15f}")
    return WalkState(0, [[spin.a0, spin.a3]], [[spin.a1, spin.a2]])


def _shift_pair(pair, diag, off):
    # leading component moves m -> m + 1, trailing m -> m - 1
    lead, trail = pair[:, 0], pair[:, 1]
    out = np.zeros((pair.shape[0] + 1, 2), dtype=complex)
    out[1:, 0] = diag * lead + off * trail
    out[:-1, 1] = off * lead + diag * trail
    return out


def step(state, params):
    """One application of U = S . (C (x) I_pos)"""
    plus = _shift_pair(state.plus_diag, *_pair_block(params.y, -params.z))
    anti = _shift_pair(state.anti_diag, *_pair_block(params.x, params.z))
    return WalkState(state.t + 1, plus, anti)


def evolve(spin, params, T):
    """Yield the states at t = 0, 1, ..., T"""
    if int(T) != T or T < 0:
        raise InvalidArgument(f"T must be a non-negative integer, got {T}")
    state = initial_state(spin)
    yield state
    for _ in range(int(T)):
        state = step(state, params)
        yield state


def simulate(spin, params, T):
    """Exact state after T steps (O(T^2) time, O(T) memory)"""
    state = None
    for state in evolve(spin, params, T):
        pass
    logging.debug(f"simulate: T={T} norm={norm(state):.15f}")
    return state


def norm(state):
    return float(
        np.sum(np.abs(state.plus_diag) ** 2) + np.sum(np.abs(state.anti_diag) ** 2)
    )


def stack_sites(t, plus, anti):
    """
    Per-site 4-spinors from diagonal arrays.

    plus and anti have shape (..., t + 1, 2); the result V has shape
    (..., S, 4) with sites ordered by (m, n). At even t the diagonals meet at
    the origin, which then carries all four components.
    """
    ms = np.arange(-t, t + 1, 2)
    lead = plus.shape[:-2]
    vp = np.zeros(lead + (t + 1, 4), dtype=complex)
    vp[..., 0] = plus[..., 0]
    vp[..., 3] = plus[..., 1]
    va = np.zeros(lead + (t + 1, 4), dtype=complex)
    va[..., 1] = anti[..., 0]
    va[..., 2] = anti[..., 1]
    ma = ms
    if t % 2 == 0:
        k0 = t // 2
        vp[..., k0, 1] = anti[..., k0, 0]
        vp[..., k0, 2] = anti[..., k0, 1]
        keep = ms != 0
        va = va[..., keep, :]
        ma = ms[keep]

    m = np.concatenate([ms, ma])
    n = np.concatenate([ms, -ma])
    vectors = np.concatenate([vp, va], axis=-2)
    order = np.lexsort((n, m))
    return m[order], n[order], vectors[..., order, :]


def site_vectors(state):
    """(m, n, V): every support site and its (unnormalized) spin vector"""
    return stack_sites(state.t, state.plus_diag, state.anti_diag)
