"""
Information measures of the walk.

- probability grids and per-site spin entanglement
- spin-position entanglement E(t)
- entangling power of the evolution, averaged over product initial spins
- sandwiched and plain relative Renyi entropies against the initial spin
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .closed_form import amplitudes_closed, site_propagator
from .coin import SpinVector, evolve, site_vectors
from .config import (
    DEFAULT_N_ALPHA,
    DEFAULT_N_THETA,
    DIVERGENCE_FLOOR,
    DRIFT_TOL,
    SITE_THRESHOLD,
    SPIN_PRESETS,
    resolve_workers,
)
from .errors import BellwalkError, Divergence, InvalidArgument, NormDrift, UndefinedSite
from .linalg import (
    check_hermitian,
    density_from_vector,
    eig_hermitian,
    mat_power,
    partial_trace,
    spectrum_entropy,
    von_neumann_entropy,
)

ENGINES = ("closed", "recursion")
CROSS_CHECK_TOL = 1e-9


# -------- Types --------

@dataclass(frozen=True)
class GridDistribution:
    """Non-negative values on the support sites (m, n) of a walk state"""

    t: int
    m: np.ndarray
    n: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if not (len(self.m) == len(self.n) == len(self.values)):
            raise InvalidArgument("grid columns must have equal length")
        if np.any(np.asarray(self.values) < 0):
            raise InvalidArgument("grid values must be non-negative")

    def total(self):
        return float(np.sum(self.values))

    def entries(self):
        for m, n, v in zip(self.m, self.n, self.values):
            yield int(m), int(n), float(v)


@dataclass(frozen=True)
class SiteGrid:
    """Probability and conditional-spin entanglement per site; entropy is NaN where undefined"""

    t: int
    m: np.ndarray
    n: np.ndarray
    probability: np.ndarray
    entropy: np.ndarray


@dataclass(frozen=True)
class MeasureSeries:
    label: str
    t: np.ndarray
    values: np.ndarray
    diverged: tuple = field(default=())

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.int64)
        values = np.asarray(self.values, dtype=float)
        if t.shape != values.shape:
            raise InvalidArgument(f"series {self.label!r}: {t.size} times for {values.size} values")
        if np.any(np.diff(t) <= 0):
            raise InvalidArgument(f"series {self.label!r}: times must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "diverged", tuple(int(x) for x in self.diverged))

    def __len__(self):
        return len(self.t)

    def samples(self):
        return list(zip(self.t.tolist(), self.values.tolist()))

    def window(self, t0, t1):
        mask = (self.t >= t0) & (self.t <= t1)
        return self.t[mask], self.values[mask]

    def scaled(self, factor, label=None):
        return MeasureSeries(label or self.label, self.t, self.values * factor, self.diverged)


@dataclass(frozen=True)
class QuadratureSpec:
    """Gauss-Legendre in cos(theta), periodic trapezoid in the azimuth, per qubit"""

    n_theta: int = DEFAULT_N_THETA
    n_alpha: int = DEFAULT_N_ALPHA

    def __post_init__(self):
        for name in ("n_theta", "n_alpha"):
            value = getattr(self, name)
            if int(value) != value or value < 2:
                raise InvalidArgument(f"{name} must be an integer >= 2, got {value}")

    def qubit_nodes(self):
        """Single-qubit states cos(theta/2)|0> + e^{i alpha} sin(theta/2)|1> and weights summing to 1"""
        u, wu = np.polynomial.legendre.leggauss(self.n_theta)
        alpha = 2 * np.pi * np.arange(self.n_alpha) / self.n_alpha
        uu, aa = np.meshgrid(u, alpha, indexing="ij")
        states = np.stack([
            np.sqrt((1 + uu) / 2).astype(complex),
            np.exp(1j * aa) * np.sqrt((1 - uu) / 2),
        ], axis=-1).reshape(-1, 2)
        weights = np.outer(wu / 2, np.full(self.n_alpha, 1 / self.n_alpha)).reshape(-1)
        return states, weights

    def doubled(self):
        return QuadratureSpec(2 * self.n_theta, 2 * self.n_alpha)


# -------- Probability and per-site entanglement --------

def probability_grid(state):
    m, n, vectors = site_vectors(state)
    return GridDistribution(state.t, m, n, np.sum(np.abs(vectors) ** 2, axis=-1))


def _conditional_entropies(vectors, keep):
    # vectors: (S, 4) normalized site spinors
    psi = vectors.reshape(-1, 2, 2)
    if keep == "A":
        reduced = np.einsum("sab,scb->sac", psi, psi.conj())
    elif keep == "B":
        reduced = np.einsum("sab,sac->sbc", psi, psi.conj())
    else:
        raise InvalidArgument(f"keep must be 'A' or 'B', got {keep!r}")
    w = np.linalg.eigvalsh(reduced)
    return np.clip(spectrum_entropy(w), 0.0, np.log(2))


def site_entanglement(state, m, n, keep="A"):
    """Entanglement between the two spin qubits conditioned on the walker at (m, n)"""
    ms, ns, vectors = site_vectors(state)
    hit = np.flatnonzero((ms == m) & (ns == n))
    if hit.size == 0:
        raise UndefinedSite(f"site ({m}, {n}) is outside the support at t={state.t}")
    v = vectors[hit[0]]
    p = float(np.sum(np.abs(v) ** 2))
    if p <= SITE_THRESHOLD:
        raise UndefinedSite(f"site ({m}, {n}) has probability {p:.3e} at t={state.t}")
    reduced = partial_trace(v / np.sqrt(p), keep=keep)
    return min(max(von_neumann_entropy(reduced), 0.0), float(np.log(2)))


def site_entanglement_grid(state, keep="A"):
    m, n, vectors = site_vectors(state)
    prob = np.sum(np.abs(vectors) ** 2, axis=-1)
    entropy = np.full(prob.shape, np.nan)
    defined = prob > SITE_THRESHOLD
    if np.any(defined):
        normed = vectors[defined] / np.sqrt(prob[defined])[:, None]
        entropy[defined] = _conditional_entropies(normed, keep)
    logging.debug(f"site grid t={state.t}: {defined.sum()} of {prob.size} sites defined")
    return SiteGrid(state.t, m, n, prob, entropy)


# -------- Reduced spin density --------

def reduced_spin_density(state):
    """tr_pos |Psi><Psi| as a 4x4 matrix"""
    _, _, vectors = site_vectors(state)
    return np.einsum("si,sj->ij", vectors, vectors.conj())


def _check_engine(engine):
    if engine not in ENGINES:
        raise InvalidArgument(f"unknown engine {engine!r}, expected one of {ENGINES}")


def _checked_density(state):
    rho = reduced_spin_density(state)
    tr = np.trace(rho).real
    drift = abs(tr - 1.0)
    if drift > DRIFT_TOL:
        raise NormDrift(state.t, drift)
    return rho / tr


def _closed_density(spin, params, t):
    return _checked_density(amplitudes_closed(spin, params, t))


def reduced_density_series(spin, params, ts, engine="closed", workers=None):
    """Normalized reduced spin densities at the requested times, in order"""
    _check_engine(engine)
    ts = [int(t) for t in ts]
    if any(t < 0 for t in ts):
        raise InvalidArgument("times must be non-negative")
    if engine == "recursion":
        wanted = set(ts)
        found = {}
        for state in evolve(spin, params, max(ts, default=0)):
            if state.t in wanted:
                found[state.t] = _checked_density(state)
        return [found[t] for t in ts]
    workers = resolve_workers(workers)
    return Parallel(n_jobs=workers, prefer="threads")(
        delayed(_closed_density)(spin, params, t) for t in ts
    )


def spin_position_entanglement(spin, params, T, engine="closed", workers=None):
    """E(t) = S(tr_pos rho(t)) for t = 0..T"""
    if int(T) != T or T < 0:
        raise InvalidArgument(f"T must be a non-negative integer, got {T}")
    ts = np.arange(int(T) + 1)
    logging.info(f"Entanglement series: T={T}, engine={engine}")
    densities = reduced_density_series(spin, params, ts, engine=engine, workers=workers)
    values = [float(spectrum_entropy(eig_hermitian(rho)[0])) for rho in densities]
    return MeasureSeries("E", ts, values)


# -------- Entangling power --------

def _linear_entropy_slice(transfer, psi_first, states, weights):
    spinors = np.einsum("a,qb->qab", psi_first, states).reshape(-1, 4)
    rho = np.einsum("ijab,qa,qb->qij", transfer, spinors, spinors.conj())
    purities = np.sum(np.abs(rho) ** 2, axis=(1, 2))
    return float(np.dot(weights, 1.0 - purities))


def entangling_power(params, t, quad=None, workers=None):
    """
    Average linear entropy 1 - tr(rho~(t)^2) over product initial spins.

    The first qubit is the high bit (i = 2a + b).
    """
    if int(t) != t or t < 0:
        raise InvalidArgument(f"time must be a non-negative integer, got {t}")
    quad = quad or QuadratureSpec()
    _, _, K = site_propagator(params, int(t))
    # rho~_ij = sum_ab transfer_ijab psi_a psi*_b
    transfer = np.einsum("sia,sjb->ijab", K, K.conj())
    states, weights = quad.qubit_nodes()
    workers = resolve_workers(workers)
    parts = Parallel(n_jobs=workers, prefer="threads")(
        delayed(_linear_entropy_slice)(transfer, psi, states, weights) for psi in states
    )
    return float(np.dot(weights, np.array(parts)))


def entangling_power_series(params, ts, quad=None, workers=None):
    quad = quad or QuadratureSpec()
    ts = [int(t) for t in ts]
    logging.info(
        f"Entangling power: {len(ts)} times, quadrature {quad.n_theta}x{quad.n_alpha} per qubit"
    )
    workers = resolve_workers(workers)
    values = Parallel(n_jobs=workers, prefer="threads")(
        delayed(entangling_power)(params, t, quad, 1) for t in ts
    )
    return MeasureSeries("epower", ts, values)


# -------- Relative Renyi entropies --------

def _check_alpha(alpha, allow_zero):
    lower_ok = alpha >= 0 if allow_zero else alpha > 0
    if not (lower_ok and alpha < 1):
        bound = "[0, 1)" if allow_zero else "(0, 1)"
        raise InvalidArgument(f"alpha must lie in {bound}, got {alpha}")


def _log_ratio(argument, alpha, what):
    if not argument > DIVERGENCE_FLOOR:
        raise Divergence(f"{what} diverges: trace argument {argument:.3e}")
    return float(np.log(argument) / (alpha - 1))


def srd(rho, sigma, alpha):
    """Sandwiched Renyi divergence D_alpha(rho || sigma), natural log"""
    _check_alpha(alpha, allow_zero=False)
    rho = check_hermitian(rho)
    sigma = check_hermitian(sigma)
    side = mat_power(sigma, (1 - alpha) / (2 * alpha))
    inner = side @ rho @ side
    argument = np.trace(mat_power(0.5 * (inner + inner.conj().T), alpha)).real
    return _log_ratio(argument / np.trace(rho).real, alpha, "SRD")


def rre(rho, sigma, alpha):
    """Relative Renyi entropy (1/(alpha-1)) ln tr(rho^alpha sigma^(1-alpha))"""
    _check_alpha(alpha, allow_zero=True)
    rho = check_hermitian(rho)
    sigma = check_hermitian(sigma)
    argument = np.trace(mat_power(rho, alpha) @ mat_power(sigma, 1 - alpha)).real
    return _log_ratio(argument / np.trace(rho).real, alpha, "RRE")


def classical_renyi(p, q, alpha):
    if alpha == 1:
        raise InvalidArgument("alpha = 1 is the Kullback-Leibler limit, not supported")
    if alpha < 0:
        raise InvalidArgument(f"alpha must be non-negative, got {alpha}")
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InvalidArgument(f"distributions differ in shape: {p.shape} vs {q.shape}")
    if np.any(p < 0) or np.any(q < 0):
        raise InvalidArgument("probabilities must be non-negative")
    support = p > 0
    if np.any(support & (q <= 0)):
        raise InvalidArgument("supp p must lie inside supp q")
    total = np.sum(p[support] ** alpha * q[support] ** (1 - alpha))
    return _log_ratio(total / np.sum(p), alpha, "classical Renyi")


def _close(a, b):
    if np.isinf(a) or np.isinf(b):
        return a == b
    return abs(a - b) <= CROSS_CHECK_TOL * max(1.0, abs(a))


def renyi_series(params, alpha, T, spin=None, engine="closed", cross_check=False,
                 workers=None, start=1):
    """
    (SRD, RRE) of rho(t) against the initial spin projector, t = start..T.

    With sigma = |psi0><psi0| both reduce to overlaps:
    SRD = alpha/(alpha-1) ln <psi0|rho|psi0>, RRE = 1/(alpha-1) ln <psi0|rho^alpha|psi0>.
    Samples where the overlap vanishes are recorded as +inf and listed in diverged.
    """
    _check_alpha(alpha, allow_zero=False)
    if int(T) != T or T < start or start not in (0, 1):
        raise InvalidArgument(f"need T >= {start}, got {T}")
    spin = spin or SpinVector(*SPIN_PRESETS["renyi"])
    psi0 = spin.array
    sigma = density_from_vector(psi0)
    ts = np.arange(start, int(T) + 1)
    logging.info(f"Renyi series: alpha={alpha}, T={T}, engine={engine}")
    densities = reduced_density_series(spin, params, ts, engine=engine, workers=workers)

    srd_values, rre_values, diverged = [], [], []
    for t, rho in zip(ts, densities):
        overlap = np.vdot(psi0, rho @ psi0).real
        powered = np.vdot(psi0, mat_power(rho, alpha) @ psi0).real
        if overlap > DIVERGENCE_FLOOR and powered > DIVERGENCE_FLOOR:
            s_val = alpha / (alpha - 1) * np.log(overlap)
            r_val = np.log(powered) / (alpha - 1)
        else:
            s_val = r_val = np.inf
            diverged.append(int(t))
        if cross_check:
            try:
                s_ref, r_ref = srd(rho, sigma, alpha), rre(rho, sigma, alpha)
            except Divergence:
                s_ref = r_ref = np.inf
            if not (_close(s_val, s_ref) and _close(r_val, r_ref)):
                raise BellwalkError(
                    f"Renyi cross-check failed at t={t}: SRD {s_val} vs {s_ref}, RRE {r_val} vs {r_ref}"
                )
        srd_values.append(float(s_val))
        rre_values.append(float(r_val))

    if diverged:
        logging.warning(f"Renyi series: {len(diverged)} divergent samples, first at t={diverged[0]}")
    return (
        MeasureSeries(f"srd_{alpha:g}", ts, srd_values, diverged),
        MeasureSeries(f"rre_{alpha:g}", ts, rre_values, diverged),
    )