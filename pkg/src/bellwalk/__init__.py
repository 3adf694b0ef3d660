"""Exact simulation and analysis of the 2d quantum walk with a Bell-pair coin."""

from .closed_form import F, G, amplitudes_closed, hyp2f1_terminating, site_propagator
from .coin import (
    CoinParams,
    SpinVector,
    WalkState,
    build_coin,
    build_coin_from_bell,
    build_coin_pauli,
    initial_state,
    simulate,
    step,
)
from .errors import (
    BellwalkError,
    ConfigError,
    DegenerateSpinor,
    Divergence,
    InvalidArgument,
    NormDrift,
    UndefinedSite,
    UnsupportedArgument,
)

__version__ = "0.1.0"
