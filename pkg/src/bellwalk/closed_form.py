"""
Exact analytic amplitudes of the Bell-pair walk.

The (0, 3) and (1, 2) amplitude families are polynomials in cos/sin of the
coin angles. Two evaluation routes are provided:

1. "jacobi" (default): F_m and G_m written as Jacobi polynomials and evaluated
   with scipy's three-term recurrence. Stable for t up to ~10^3.
2. "series": the literal terminating Gauss hypergeometric sums. Exact in
   principle but the alternating terms cancel badly once t grows past a few
   dozen, so it is kept as a cross-check for small t.

Both routes give F_t = cos^t and F_{-t} = G_{-t} = 0 (the boundary sites).
"""

import logging
from math import comb, perm

import numpy as np
from scipy.special import eval_jacobi, gamma, poch

from .coin import TWO_PI, WalkState, stack_sites
from .errors import InvalidArgument, UnsupportedArgument

METHODS = ("jacobi", "series")


def _nonpositive_int(value):
    value = float(value)
    return value.is_integer() and value <= 0


def hyp2f1_terminating(a, b, c, z):
    """
    Terminating 2F1(a, b; c; z).

    At least one of a, b must be a non-positive integer. When c is itself a
    non-positive integer the regularized function 2F1/Gamma(c) is returned
    instead, whose first 1 - c terms vanish.
    """
    orders = [-int(round(p)) for p in (a, b) if _nonpositive_int(p)]
    if not orders:
        raise UnsupportedArgument(
            f"2F1({a}, {b}; {c}; z) does not terminate: no non-positive integer upper parameter"
        )
    last = min(orders)

    first = 0
    if _nonpositive_int(c):
        first = 1 - int(round(c))
        if first > last:
            return 0.0
        term = poch(a, first) * poch(b, first) * z ** first / gamma(first + 1)
    else:
        term = 1.0

    total = term
    for k in range(first, last):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
    return total


def _check_site(m, t):
    if int(t) != t or t < 0:
        raise InvalidArgument(f"time must be a non-negative integer, got {t}")
    if int(m) != m or abs(m) > t:
        raise InvalidArgument(f"site m={m} outside [-{t}, {t}]")
    if (t - m) % 2:
        raise InvalidArgument(f"site m={m} has the wrong parity for t={t}")
    return int(m), int(t)


def _trig(angle):
    theta = TWO_PI * angle
    return np.cos(theta), np.sin(theta)


def _f_jacobi(m, t, angle):
    m = np.asarray(m, dtype=np.int64)
    c, s = _trig(angle)
    am = np.abs(m)
    n1 = (t + am) // 2
    n2 = (t - am) // 2
    ratio = np.where(m > 0, n1 / np.maximum(n2, 1), 1.0)
    sign = np.where(n2 % 2, -1.0, 1.0)
    cpow = np.power(c, am)
    poly = eval_jacobi(np.maximum(n2 - 1, 0), am.astype(float), 1.0, 1 - 2 * c * c)
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.where(cpow == 0, 0.0, sign * ratio * s * s * cpow * poly)
    values = np.where(m == -t, 0.0, values)
    return np.where(m == t, c ** t, values).astype(complex)


def _g_jacobi(m, t, angle):
    m = np.asarray(m, dtype=np.int64)
    c, s = _trig(angle)
    upper = m >= 1
    degree = np.where(upper, (t - m) // 2, (t + m) // 2 - 1)
    beta = np.where(upper, m - 1, 1 - m)
    cpow = np.power(c, beta)
    poly = eval_jacobi(np.maximum(degree, 0), 0.0, beta.astype(float), 1 - 2 * s * s)
    with np.errstate(over="ignore", invalid="ignore"):
        values = np.where(cpow == 0, 0.0, s * cpow * poly)
    values = np.where(degree < 0, 0.0, values)
    return -1j * values


def _f_series(m, t, angle):
    c, s = _trig(angle)
    if m == t:
        return complex(c ** t)
    if m == -t:
        return 0j
    n1, n2 = (t + m) // 2, (t - m) // 2
    a, b = (m - t + 2) / 2, (m + t + 2) / 2
    hyp = hyp2f1_terminating(a, b, m + 1, c * c)
    if m >= 0:
        prefactor = comb(n1, n2) * c ** m
    elif abs(c) < 1e-300:
        raise UnsupportedArgument("series route needs cos(2 pi angle) != 0 for m < 0")
    else:
        prefactor = c ** m / perm(n2, n2 - n1)
    return complex((-1) ** n2 * s * s * prefactor * hyp)


def _g_series(m, t, angle):
    c, s = _trig(angle)
    if m == -t:
        return 0j
    if abs(c) < 1e-300:
        raise UnsupportedArgument("series route needs cos(2 pi angle) != 0")
    tan2 = (s / c) ** 2
    hyp = hyp2f1_terminating((2 - m - t) / 2, (m - t) / 2, 1, -tan2)
    return -1j * s * c ** (t - 1) * hyp


def F(m, t, angle, method="jacobi"):
    """F_m(angle) at time t; angle is a fraction of a turn"""
    m, t = _check_site(m, t)
    if method == "jacobi":
        return complex(_f_jacobi([m], t, angle)[0])
    if method == "series":
        return _f_series(m, t, angle)
    raise InvalidArgument(f"unknown method {method!r}, expected one of {METHODS}")


def G(m, t, angle, method="jacobi"):
    """G_m(angle) at time t"""
    m, t = _check_site(m, t)
    if method == "jacobi":
        return complex(_g_jacobi([m], t, angle)[0])
    if method == "series":
        return _g_series(m, t, angle)
    raise InvalidArgument(f"unknown method {method!r}, expected one of {METHODS}")


def _family(t, angle, phase):
    """
    2x2 maps from the initial pair to the pair on one diagonal.

    Returns shape (t + 1, 2, 2): entry k maps (lead, trail) at the origin to
    (lead, trail) at m = -t + 2k. The lead component carries the (1 - delta_{m,-t})
    factor, the trail component the (1 - delta_{m,t}) one.
    """
    blocks = np.zeros((t + 1, 2, 2), dtype=complex)
    if t == 0:
        blocks[0] = np.eye(2)
        return blocks
    m = np.arange(2 - t, t + 1, 2)
    f = _f_jacobi(m, t, angle)
    g = _g_jacobi(m, t, angle)
    blocks[1:, 0, 0] = f
    blocks[1:, 0, 1] = g
    blocks[:-1, 1, 0] = g[::-1]
    blocks[:-1, 1, 1] = f[::-1]
    return phase * blocks


def diagonal_maps(params, t):
    """(plus, anti) per-site 2x2 maps for the (0, 3) and (1, 2) families"""
    if int(t) != t or t < 0:
        raise InvalidArgument(f"time must be a non-negative integer, got {t}")
    t = int(t)
    turns = (t * params.z) % 1.0
    plus = _family(t, params.y, np.exp(-1j * TWO_PI * turns))
    anti = _family(t, params.x, np.exp(1j * TWO_PI * turns))
    return plus, anti


def amplitudes_closed(spin, params, t):
    """The walk state at time t straight from the analytic solution"""
    if not spin.is_normalized():
        raise InvalidArgument(f"initial spin must be normalized, |s| = {spin.norm():.15f}")
    plus, anti = diagonal_maps(params, t)
    return WalkState(
        int(t),
        plus @ np.array([spin.a0, spin.a3]),
        anti @ np.array([spin.a1, spin.a2]),
    )


def site_propagator(params, t):
    """
    Per-site linear maps from the initial spin to the spin vector at each site.

    Returns (m, n, K) with K of shape (S, 4, 4) such that the state at site s
    is K[s] @ spin. Sites are ordered as in coin.site_vectors.
    """
    plus, anti = diagonal_maps(params, t)
    t = int(t)
    # one basis spin per leading index
    plus_in = np.zeros((4, t + 1, 2), dtype=complex)
    anti_in = np.zeros((4, t + 1, 2), dtype=complex)
    plus_in[0] = plus[:, :, 0]
    plus_in[3] = plus[:, :, 1]
    anti_in[1] = anti[:, :, 0]
    anti_in[2] = anti[:, :, 1]
    m, n, vectors = stack_sites(t, plus_in, anti_in)
    logging.debug(f"site_propagator: t={t}, {len(m)} sites")
    return m, n, np.transpose(vectors, (1, 2, 0))
