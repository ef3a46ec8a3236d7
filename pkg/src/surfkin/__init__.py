"""Numerical kinematics of surfaces: moving frames, connectors, polar
decomposition of surface deformations, energy modes and exact deformation
families."""

from . import errors, tensor3
from .profile import parse_profile

__all__ = ["errors", "tensor3", "parse_profile"]
__version__ = "0.1.0"
