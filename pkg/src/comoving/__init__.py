"""Matter-wave optics of pulsed comoving magnetic potentials."""
__version__ = "0.1.0"

from .errors import ConfigError, NumericalFailure
from .kernels import BACKEND
from .constants import SI, AtomSpecies, ZeemanState, argon_state, lande_g, zeeman_amplitude
from .pulse import PulseShape, PulseSignal, PulseTrain, spectrum, spectrum_derivative
from .semiclassical import (ComovingParams, group_velocity, min_group_velocity,
                            phase_shift, phase_shift_asymptotic, spatial_shift,
                            spatial_shift_asymptotic)

__all__ = [
    "__version__", "BACKEND", "ConfigError", "NumericalFailure", "SI", "AtomSpecies",
    "ZeemanState", "argon_state", "lande_g", "zeeman_amplitude", "PulseShape", "PulseSignal",
    "PulseTrain", "spectrum", "spectrum_derivative", "ComovingParams", "group_velocity",
    "min_group_velocity", "phase_shift", "phase_shift_asymptotic", "spatial_shift",
    "spatial_shift_asymptotic",
]
