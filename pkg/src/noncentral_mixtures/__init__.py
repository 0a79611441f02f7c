"""Mixture representations of noncentral distributions.

Noncentral laws of ``|X + delta|`` and ``(X + delta)^2`` for normal, logistic
and hyperbolic secant ``X``, written as countable mixtures with explicit
weights, plus tools that check those identities numerically.
"""

from .distributions import NoncentralParam, make_rng
from .mixtures import (
    MixtureRepresentation,
    altnormal_representation,
    chisq_test_power,
    classical_chisq,
    hypsec_representation,
    logistic_representation,
    noncentral_chisq_k,
    poisson_mixture_from_altnormal,
)
from .series import BuiltinSpec, SeriesSpec, builtin_spec

__version__ = "0.1.0"

__all__ = [
    "BuiltinSpec",
    "MixtureRepresentation",
    "NoncentralParam",
    "SeriesSpec",
    "altnormal_representation",
    "builtin_spec",
    "chisq_test_power",
    "classical_chisq",
    "hypsec_representation",
    "logistic_representation",
    "make_rng",
    "noncentral_chisq_k",
    "poisson_mixture_from_altnormal",
]
