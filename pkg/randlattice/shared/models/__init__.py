"""Shared Pydantic models for randlattice services."""

from .base import BaseModel, Estimate
from .space import FrequencyVector, KorobovSpace, TrigPolynomial, WeightKind, WeightScheme, support
from .primes import CrtResidues, PrimeBand
from .construct import Certificate, GeneratingVector, GoodSetCriterion
from .rule import Integrand, IntegrandKind, RandomRuleDraw
from .analysis import ErrorReport, OmegaProfile
from .bounds import BoundParams, ChainTerms, TractabilityResult
from .experiment import ConvergenceResult, ConvergenceRow, ExperimentConfig, SlopeFit

__all__ = [
    "BaseModel",
    "Estimate",
    "FrequencyVector",
    "KorobovSpace",
    "TrigPolynomial",
    "WeightKind",
    "WeightScheme",
    "support",
    "CrtResidues",
    "PrimeBand",
    "Certificate",
    "GeneratingVector",
    "GoodSetCriterion",
    "Integrand",
    "IntegrandKind",
    "RandomRuleDraw",
    "ErrorReport",
    "OmegaProfile",
    "BoundParams",
    "ChainTerms",
    "TractabilityResult",
    "ConvergenceResult",
    "ConvergenceRow",
    "ExperimentConfig",
    "SlopeFit",
]
