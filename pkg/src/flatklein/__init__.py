"""Flat Klein bottles and flat tori assembled from folded cylinder strips."""
from .atlas import AtlasMap, FigureConfig, FlatDomain, Orientability, build_atlas, exceptional_sets, orientability
from .errors import ConfigurationError, ConstructionError, DomainError, FlatKleinError, MeshError, PolicyError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AtlasMap", "BACKEND", "ConfigurationError", "ConstructionError", "DomainError", "FigureConfig",
    "FlatDomain", "FlatKleinError", "MeshError", "Orientability", "PolicyError", "build_atlas",
    "exceptional_sets", "orientability",
]
