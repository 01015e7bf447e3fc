"""Relativistic spin path integrals: SU(2) characters and kernels, Lorentz
spin frames, propagators and multiparticle amplitudes."""

from .groups import LorentzTransform, SO4Element
from .kernels import KernelParams, SingularInputError
from .minkowski import ETA
from .representations import RepLabel, SpinLabel
from .spin import DIRAC, SCALAR, VECTOR, LorentzRepresentation, build_spin_frame

__all__ = [
    "DIRAC",
    "ETA",
    "KernelParams",
    "LorentzRepresentation",
    "LorentzTransform",
    "RepLabel",
    "SCALAR",
    "SO4Element",
    "SingularInputError",
    "SpinLabel",
    "VECTOR",
    "build_spin_frame",
]

__version__ = "0.1.0"
