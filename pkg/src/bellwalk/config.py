"""
Shared configuration for the bellwalk simulator.

Holds:
1. Numerical tolerances used across the library
2. Coin and spin presets for the three reference coin settings
3. Defaults for quadrature, packets and CLI runs
4. Worker-count resolution (BELLWALK_WORKERS)
"""

import logging
import math
import os
from fractions import Fraction

# -------- Tolerances --------
NORM_TOL = 1e-12          # spin / state normalization
UNITARY_TOL = 1e-14       # C C^dagger = I, entrywise
HERMITIAN_TOL = 1e-12     # |H - H^dagger| entrywise
EIG_CLAMP = 1e-12         # spectral values within this of zero are zero
TRACE_TOL = 1e-10         # tr(rho) = 1 for normalized density matrices
SITE_THRESHOLD = 1e-14    # P_{m,n} below this -> conditional state undefined
DIVERGENCE_FLOOR = 1e-300 # trace arguments of log at or below this diverge
DRIFT_TOL = 1e-9          # CLI aborts (exit 3) when the norm drifts further
PROB_TOL = 1e-10          # probability columns re-validated at write time

# -------- Spin on load --------
SPIN_ACCEPT_TOL = 1e-9    # accepted as normalized
SPIN_RENORM_TOL = 1e-6    # renormalized with a warning

# -------- Presets --------
COIN_PRESETS = {
    "p1": (Fraction(1, 8), Fraction(1, 8), Fraction(1, 10)),
    "p2": (Fraction(1, 8), Fraction(1, 12), Fraction(1, 10)),
    "p3": (Fraction(1, 6), Fraction(1, 8), Fraction(1, 10)),
}

_R2 = 1 / math.sqrt(2)
SPIN_PRESETS = {
    # |0> (x) (|0> + |1>)/sqrt2 under i = 2a + b
    "initen": (_R2, _R2, 0j, 0j),
    "renyi": (_R2, 1j * _R2, 0j, 0j),
}

# -------- Quadrature / packets --------
DEFAULT_N_THETA = 8
DEFAULT_N_ALPHA = 8
PACKET_CUTOFF = 12.0      # momentum cutoff in units of 1/sigma
PACKET_NODES = 2048

# -------- CLI defaults --------
DEFAULT_T = {
    "simulate": 100,
    "check-closed-form": 50,
    "entropy-series": 1000,
    "grid": 100,
    "epower": 50,
    "renyi": 100,
    "fit": 1000,
}
DEFAULT_ALPHA = 0.25
DEFAULT_ORACLE_SPINS = 8
DEFAULT_SEED = 0
ORACLE_TOL = 1e-10       # closed form vs recursion, entrywise
SPINOR_TOL = 1e-12       # Dirac spinor identities
PACKET_TOL = 1e-6        # Gaussian packet normalization
FLOAT_FORMAT = ".17g"

# -------- Workers --------
WORKERS_ENV = "BELLWALK_WORKERS"


def resolve_workers(requested=None):
    """
    Number of worker threads for fan-out.

    BELLWALK_WORKERS sets the default and caps any explicit request.
    """
    cap = None
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            cap = max(1, int(raw))
        except ValueError:
            logging.warning(f"Ignoring {WORKERS_ENV}={raw!r}: not an integer")

    workers = requested if requested is not None else (cap or 1)
    workers = max(1, int(workers))
    if cap is not None and workers > cap:
        logging.info(f"Capping workers at {cap} ({WORKERS_ENV})")
        workers = cap
    return workers
