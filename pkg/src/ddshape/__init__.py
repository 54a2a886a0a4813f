"""Shaped pi-pulses for energy-efficient high-field decoupling sequences.

Subpackages by concern:

* :mod:`ddshape.quantum` - dense linear algebra on small Hilbert spaces
* :mod:`ddshape.model` - spin systems, hyperfine vectors, Hamiltonians
* :mod:`ddshape.modulation` - modulation functions and harmonic weights
* :mod:`ddshape.shaper` - shaped pi-pulse synthesis
* :mod:`ddshape.simulator` - sequence integration and spectrum scans
* :mod:`ddshape.metrics` / :mod:`ddshape.config` / :mod:`ddshape.cli` -
  energy accounting, configuration and the command-line entry point
* :mod:`ddshape.kernels` - numba-accelerated hot loops with a pure-numpy
  fallback (set ``DDSHAPE_BACKEND=numpy``)
"""

__version__ = "0.1.0"

from .model import ClassicalSignal, Nucleus, SpinSystem
from .modulation import (
    SequencePlan,
    f_l_instantaneous,
    f_l_numeric,
    f_l_tophat,
    required_alpha,
)
from .shaper import ShapedPulse, beta_analytic
from .simulator import (
    Instantaneous,
    SpectrumResult,
    TopHat,
    predict_signal,
    run_sequence,
    scan_spectrum,
)

__all__ = [
    "__version__",
    "ClassicalSignal",
    "Nucleus",
    "SpinSystem",
    "SequencePlan",
    "f_l_instantaneous",
    "f_l_numeric",
    "f_l_tophat",
    "required_alpha",
    "ShapedPulse",
    "beta_analytic",
    "Instantaneous",
    "TopHat",
    "SpectrumResult",
    "predict_signal",
    "run_sequence",
    "scan_spectrum",
]
