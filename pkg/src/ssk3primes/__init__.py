"""Supersingular K3 primes for rank-20 Dynkin types, via lattice computations."""

from .dynkin import DynkinType, enumerate_types, parse
from .pipeline import Options, TypeReport, analyze, batch

__all__ = ["DynkinType", "Options", "TypeReport", "analyze", "batch", "enumerate_types", "parse"]
__version__ = "0.1.0"
