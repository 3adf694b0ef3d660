"""
Tail models: a constant plus damped oscillations, and linear fits of them.

A term is amplitude * f(omega * t + phase) / t**decay with f one of
sin, cos, sin^2, cos^2. Frequencies and phases are fixed inputs; only the
constant and the amplitudes are fitted, so every fit is a linear least
squares problem.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgument

KINDS = ("sin", "cos", "sin2", "cos2")
PI = math.pi


@dataclass(frozen=True)
class BasisTerm:
    frequency: float
    phase: float = 0.0
    decay: float = 0.0
    kind: str = "sin"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown basis kind {self.kind!r}, expected one of {KINDS}")
        if not (math.isfinite(self.frequency) and math.isfinite(self.phase)):
            raise InvalidArgument("basis frequency and phase must be finite")
        if not (math.isfinite(self.decay) and self.decay >= 0):
            raise InvalidArgument(f"decay power must be >= 0, got {self.decay}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        arg = self.frequency * t + self.phase
        # squared kinds via half-angle identities
        if self.kind == "sin":
            osc = np.sin(arg)
        elif self.kind == "cos":
            osc = np.cos(arg)
        elif self.kind == "sin2":
            osc = 0.5 * (1.0 - np.cos(2 * arg))
        else:
            osc = 0.5 * (1.0 + np.cos(2 * arg))
        return osc / t ** self.decay

    def to_dict(self):
        return {"frequency": self.frequency, "phase": self.phase,
                "decay": self.decay, "kind": self.kind}


@dataclass(frozen=True)
class ModelTerm:
    amplitude: float
    basis: BasisTerm

    def to_dict(self):
        return {"amplitude": self.amplitude, **self.basis.to_dict()}


@dataclass(frozen=True)
class AsymptoticModel:
    constant: float
    terms: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __call__(self, t):
        return eval_model(self, t)

    @property
    def basis(self):
        return [term.basis for term in self.terms]

    def to_dict(self):
        return {"constant": self.constant, "terms": [term.to_dict() for term in self.terms]}


def eval_model(model, t):
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr <= 0):
        raise InvalidArgument("asymptotic models are defined for t > 0 only")
    value = np.full(t_arr.shape, float(model.constant))
    for term in model.terms:
        value = value + term.amplitude * term.basis(t_arr)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class FitReport:
    model: AsymptoticModel
    rms_residual: float
    max_residual: float
    window: tuple
    n_samples: int

    def to_dict(self):
        return {
            "constant": self.model.constant,
            "terms": [term.to_dict() for term in self.model.terms],
            "rmsResidual": self.rms_residual,
            "maxResidual": self.max_residual,
            "window": list(self.window),
            "samples": self.n_samples,
        }


def _window_samples(series, window):
    if window is None:
        last = float(series.t[-1]) if len(series.t) else 0.0
        window = (last / 2, last)
    t0, t1 = window
    if t0 > t1:
        raise InvalidArgument(f"empty window [{t0}, {t1}]")
    t, y = series.window(t0, t1)
    finite = np.isfinite(y)
    if not np.all(finite):
        logging.warning(f"Dropping {np.sum(~finite)} non-finite samples from window [{t0}, {t1}]")
        t, y = t[finite], y[finite]
    return (t0, t1), t.astype(float), y


def fit_tail(series, basis, window=None):
    """Least-squares constant and amplitudes for fixed basis terms over a window (default [T/2, T])"""
    basis = list(basis)
    window, t, y = _window_samples(series, window)
    need = 2 + len(basis)
    if t.size < need:
        raise InvalidArgument(f"window {window} holds {t.size} samples, need at least {need}")
    if np.any(t <= 0):
        raise InvalidArgument("fit windows must start after t = 0")

    design = np.column_stack([np.ones_like(t)] + [b(t) for b in basis])
    scale = np.linalg.norm(design, axis=0)
    if np.any(scale == 0):
        raise InvalidArgument("a basis term vanishes on every sample in the window")
    solution, _, rank, _ = np.linalg.lstsq(design / scale, y, rcond=None)
    if rank < design.shape[1]:
        raise InvalidArgument(f"rank-deficient fit ({rank} of {design.shape[1]} columns independent)")
    coeffs = solution / scale

    residual = y - design @ coeffs
    model = AsymptoticModel(
        float(coeffs[0]),
        [ModelTerm(float(a), b) for a, b in zip(coeffs[1:], basis)],
    )
    report = FitReport(
        model,
        float(np.sqrt(np.mean(residual ** 2))),
        float(np.max(np.abs(residual))),
        window,
        int(t.size),
    )
    logging.info(f"Fit over {window}: constant={model.constant:.6g}, rms={report.rms_residual:.3e}")
    return report


def tail_constant(series, window):
    """Mean of the samples in window"""
    _, _, y = _window_samples(series, window)
    if y.size == 0:
        raise InvalidArgument(f"no samples in window {window}")
    return float(np.mean(y))


# -------- Reference tails --------

def _b(freq, phase, decay, kind):
    return BasisTerm(freq, phase, decay, kind)


TAIL_BASES = {
    ("entanglement", "p1"): [_b(PI / 2, 0.0, 2.0, "cos2"), _b(PI / 4, PI / 8, 2.5, "sin2")],
    ("entanglement", "p2"): [_b(PI / 6, PI / 12, 0.5, "cos2"), _b(PI / 4, PI / 8, 0.5, "sin2")],
    ("entanglement", "p3"): [_b(PI / 4, PI / 8, 0.5, "cos2"), _b(PI / 3, PI / 6, 0.5, "sin2")],
    ("epower", "p1"): [_b(-PI / 2, PI / 8, 0.25, "sin")],
    ("epower", "p2"): [_b(PI / 3, PI / 12, 0.25, "sin"), _b(PI / 2, PI / 16, 0.25, "sin")],
    ("epower", "p3"): [_b(PI / 2, 0.0, 0.25, "sin"), _b(-2 * PI / 3, PI / 6, 0.25, "sin")],
    ("renyi", "p1"): [_b(PI / 4, PI / 16, 1.5, "sin"), _b(PI / 2, PI / 16, 0.5, "cos")],
    ("renyi", "p2"): [_b(PI / 3, PI / 12, 0.5, "cos"), _b(PI / 2, PI / 8, 0.5, "cos")],
    ("renyi", "p3"): [_b(-PI / 2, PI / 6, 0.5, "sin"), _b(2 * PI / 3, PI / 4, 0.5, "cos")],
}

# (constant, amplitudes...) matching TAIL_BASES term order
REFERENCE_COEFFICIENTS = {
    ("entanglement", "p1", None): (0.693156, -0.25, 0.5),
    ("entanglement", "p2", None): (0.69212, -0.0207781, -0.046477),
    ("entanglement", "p3", None): (0.695062, -0.042797, -0.0567782),
    ("epower", "p1", None): (0.671914, -0.0318321),
    ("epower", "p2", None): (0.662477, 0.00779714, 0.0131973),
    ("epower", "p3", None): (0.676256, 0.0123798, -0.0219393),
    ("srd", "p1", 0.25): (0.379594, 0.106996, -0.157844),
    ("srd", "p2", 0.25): (0.352781, -0.0568579, -0.0932246),
    ("srd", "p3", 0.25): (0.401346, -0.113507, -0.0769188),
    ("rre", "p1", 0.25): (0.389889, 0.0955922, -0.179794),
    ("rre", "p2", 0.25): (0.363284, -0.0645552, -0.10113),
    ("rre", "p3", 0.25): (0.411921, -0.118399, -0.0762127),
    ("rre", "p1", 0.5): (1.15822, 0.300902, -0.51888),
    ("rre", "p2", 0.5): (1.07782, -0.185198, -0.296234),
    ("rre", "p3", 0.5): (1.22452, -0.353662, -0.228691),
    ("rre", "p1", 0.75): (3.44391, 0.937397, -1.49066),
    ("rre", "p2", 0.75): (3.20219, -0.532561, -0.864633),
    ("rre", "p3", 0.75): (3.64189, -1.04617, -0.68791),
}

QUANTITIES = ("entanglement", "epower", "srd", "rre")


def tail_basis(quantity, preset):
    if quantity not in QUANTITIES:
        raise InvalidArgument(f"unknown quantity {quantity!r}, expected one of {QUANTITIES}")
    family = "renyi" if quantity in ("srd", "rre") else quantity
    try:
        return list(TAIL_BASES[(family, preset)])
    except KeyError:
        raise InvalidArgument(f"no reference tail basis for preset {preset!r}") from None


def reference_model(quantity, preset, alpha=None):
    """Reference tail model, or None when no fit is known for this combination"""
    basis = tail_basis(quantity, preset)
    key = (quantity, preset, None if alpha is None else float(alpha))
    coeffs = REFERENCE_COEFFICIENTS.get(key)
    if coeffs is None:
        return None
    return AsymptoticModel(coeffs[0], [ModelTerm(a, b) for a, b in zip(coeffs[1:], basis)])
