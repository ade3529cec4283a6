"""Discrete de Rham complexes on cuboids: spectral gaps, integral identities,
pullbacks, and damped Maxwell-type evolution at desk scale."""

__version__ = "0.1.0"
