"""Asymptotic iteration method for Schrodinger problems on finite intervals."""

from .aim_engine import (
    AimPair,
    EigenResult,
    ExactSolvabilityCertificate,
    aim_iterate,
    certify_spectrum,
    delta_terminates_identically,
    eigenvalues_numeric,
    iterate_exact,
    spectrum_from_certificate,
    wavefunction_eval,
)
from .exact_algebra import ComplexExact, ParamPoly, PolyRing, RatFunc, real_roots
from .perturbation import PerturbationSeries, alpha_correction, energy_coefficient, perturbation_series, series_eval
from .potentials import (
    PotentialSpec,
    build_cotangent_complex,
    build_double_cosine,
    build_sine_squared,
    build_tangent_squared,
)
from .series_jets import Jet, jet_from_ratfunc

__all__ = [
    "AimPair", "EigenResult", "ExactSolvabilityCertificate", "aim_iterate", "certify_spectrum",
    "delta_terminates_identically", "eigenvalues_numeric", "iterate_exact", "spectrum_from_certificate",
    "wavefunction_eval", "ComplexExact", "ParamPoly", "PolyRing", "RatFunc", "real_roots",
    "PerturbationSeries", "alpha_correction", "energy_coefficient", "perturbation_series", "series_eval",
    "PotentialSpec", "build_cotangent_complex", "build_double_cosine", "build_sine_squared",
    "build_tangent_squared", "Jet", "jet_from_ratfunc",
]
