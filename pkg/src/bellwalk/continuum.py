"""
Continuum limit of the walk: two 1+1d Dirac fermions in a synthetic gauge field.

Uses the simplest scaling (all lattice-spacing exponents 1), so the
barred coin fields enter the Dirac equations directly.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .coin import SpinVector
from .config import PACKET_CUTOFF, PACKET_NODES
from .errors import DegenerateSpinor, InvalidArgument

# rows 1000, 0010, 0001, 0100
WALK_MAP = np.array([
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 0, 0, 1],
    [0, 1, 0, 0],
], dtype=complex)


@dataclass(frozen=True)
class ContinuumParams:
    alpha_bar: float
    xi_bar: float
    theta_bar1: float
    theta_bar2: float
    k1: int = 0
    k2: int = 0

    def __post_init__(self):
        for name in ("alpha_bar", "xi_bar", "theta_bar1", "theta_bar2"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgument(f"{name} must be finite")
        for name in ("k1", "k2"):
            if int(getattr(self, name)) != getattr(self, name):
                raise InvalidArgument(f"{name} must be an integer")


@dataclass(frozen=True)
class ContinuumFields:
    a_plus: tuple
    a_minus: tuple
    mass_plus: complex
    mass_minus: complex

    def to_dict(self):
        return {
            "Aplus": list(self.a_plus),
            "Aminus": list(self.a_minus),
            "Mplus": [self.mass_plus.real, self.mass_plus.imag],
            "Mminus": [self.mass_minus.real, self.mass_minus.imag],
        }


def theta_pm(params):
    """(Theta+, Theta-)"""
    a, xi = params.alpha_bar, params.xi_bar
    first = params.theta_bar1 * np.exp(1j * (a - xi + params.k1 * np.pi))
    second = params.theta_bar2 * np.exp(1j * (a + xi + params.k2 * np.pi))
    return complex(first + second), complex(first - second)


def continuum_fields(params):
    """Gauge potentials A(+/-) and mass parameters M(+/-) of the two fermions"""
    plus, minus = theta_pm(params)
    return ContinuumFields(
        a_plus=(params.alpha_bar - params.xi_bar, 0.0),
        a_minus=(params.alpha_bar + params.xi_bar, 0.0),
        mass_plus=(plus - minus) / 2,
        mass_minus=(plus + minus) / 2,
    )


@dataclass(frozen=True)
class DiracSpinor:
    upper: complex
    lower: complex

    @property
    def array(self):
        return np.array([self.upper, self.lower], dtype=complex)

    def norm2(self):
        return float(abs(self.upper) ** 2 + abs(self.lower) ** 2)

    def dot(self, other):
        """self^dagger . other"""
        return complex(np.vdot(self.array, other.array))


def energy(p, m):
    if m < 0:
        raise InvalidArgument(f"mass must be non-negative, got {m}")
    return math.hypot(p, m)


def q_pm(p, m):
    """(Q+, Q-) = (sqrt(p0 + p), sqrt(p0 - p))"""
    p0 = energy(p, m)
    if p0 == 0:
        raise DegenerateSpinor("p = m = 0 gives p0 = 0")
    # the small one of p0 -/+ p from m^2 = (p0 - p)(p0 + p)
    big = p0 + abs(p)
    small = m * m / big
    if p >= 0:
        return math.sqrt(big), math.sqrt(small)
    return math.sqrt(small), math.sqrt(big)


def dirac_u(p, m):
    q_plus, q_minus = q_pm(p, m)
    return DiracSpinor(q_minus, q_plus)


def dirac_v(p, m):
    q_plus, q_minus = q_pm(p, m)
    return DiracSpinor(q_minus, -q_plus)


def mass_identity(p, m):
    """Residuals of (Q-Q+)^2 = m^2 and Q+^2 + Q-^2 = 2 p0"""
    q_plus, q_minus = q_pm(p, m)
    p0 = energy(p, m)
    return {
        "mass": abs((q_minus * q_plus) ** 2 - m * m),
        "sum": abs(q_plus ** 2 + q_minus ** 2 - 2 * p0),
    }


def dispersion(p, V, m, branch=1):
    """E(p) = V + branch * sqrt(p^2 + m^2)"""
    if branch not in (1, -1):
        raise InvalidArgument(f"branch must be +1 or -1, got {branch}")
    return V + branch * energy(p, m)


def positive_energy_window(V, m):
    """Momentum interval where the lower branch is non-negative, or None"""
    if m < 0:
        raise InvalidArgument(f"mass must be non-negative, got {m}")
    if V < m:
        return None
    edge = math.sqrt(V * V - m * m)
    return (-edge, edge)


@dataclass(frozen=True)
class PacketSpec:
    sigma: float
    theta: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise InvalidArgument(f"packet width must be positive, got {self.sigma}")


def packet_coefficients(spec, m, p):
    """Momentum-space coefficients (a_p, b_-p) of a Gaussian packet; p may be an array"""
    if m < 0:
        raise InvalidArgument(f"mass must be non-negative, got {m}")
    p = np.asarray(p, dtype=float)
    p0 = np.hypot(p, m)
    if np.any(p0 == 0):
        raise DegenerateSpinor("packet coefficient requested at p = m = 0")
    q_plus = np.sqrt(np.maximum(p0 + p, 0.0))
    q_minus = np.sqrt(np.maximum(p0 - p, 0.0))
    envelope = (2 * np.pi * spec.sigma ** 2) ** 0.25 * np.exp(-(p * spec.sigma) ** 2 / 4) / np.sqrt(2 * p0)
    c, s = np.cos(spec.theta / 2), np.sin(spec.theta / 2) * np.exp(1j * spec.mu)
    a = envelope * (q_minus * c + q_plus * s)
    b = envelope * (q_plus * c - q_minus * s)
    if a.ndim == 0:
        return complex(a), complex(b)
    return a, b


def packet_norm(spec, m, nodes=PACKET_NODES, cutoff=PACKET_CUTOFF):
    """Trapezoid estimate of the integral of (|a|^2 + |b|^2) dp / 2pi over |p| <= cutoff / sigma"""
    if nodes < 2:
        raise InvalidArgument("need at least 2 quadrature nodes")
    edge = cutoff / spec.sigma
    p = np.linspace(-edge, edge, int(nodes))
    a, b = packet_coefficients(spec, m, p)
    return float(trapezoid(np.abs(a) ** 2 + np.abs(b) ** 2, p) / (2 * np.pi))


def assemble_walk_spinor(psi_plus, psi_minus, transpose=False):
    """
    Walk spin vector M (|up> (x) psi+ + |down> (x) psi-).

    With transpose=True the inverse permutation M^T is applied instead.
    """
    v = np.concatenate([np.asarray(psi_plus, dtype=complex), np.asarray(psi_minus, dtype=complex)])
    if v.shape != (4,):
        raise InvalidArgument("psi+ and psi- must have two components each")
    out = (WALK_MAP.T if transpose else WALK_MAP) @ v
    return SpinVector(*(complex(x) for x in out))


def two_particle_spectrum(p1, p2, alpha, theta1, theta2, signs=(1, 1)):
    """E = 2 alpha + s1 sqrt(p1^2 + theta1^2) + s2 sqrt(p2^2 + theta2^2)"""
    if len(signs) != 2 or any(s not in (1, -1) for s in signs):
        raise InvalidArgument(f"signs must be a pair of +1/-1, got {signs}")
    return 2 * alpha + signs[0] * math.hypot(p1, theta1) + signs[1] * math.hypot(p2, theta2)


def spinor_report(momenta, masses):
    """Worst residual of each spinor identity across a (p, m) sweep"""
    worst = {"uu": 0.0, "vv": 0.0, "uv": 0.0, "mass": 0.0, "sum": 0.0, "swap": 0.0}
    for m in masses:
        for p in momenta:
            if p == 0 and m == 0:
                continue
            p0 = energy(p, m)
            u, v = dirac_u(p, m), dirac_v(p, m)
            flipped = q_pm(-p, m)
            residuals = {
                "uu": abs(u.norm2() - 2 * p0),
                "vv": abs(v.norm2() - 2 * p0),
                "uv": abs(u.dot(dirac_v(-p, m))),
                "swap": abs(flipped[0] - q_pm(p, m)[1]) + abs(flipped[1] - q_pm(p, m)[0]),
                **mass_identity(p, m),
            }
            for key, value in residuals.items():
                worst[key] = max(worst[key], value)
    logging.info(f"Spinor identities over {len(momenta)}x{len(masses)} points: {worst}")
    return worst
