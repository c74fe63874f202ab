"""Relative submajorization of families of positive operators.

Decision procedures (conic feasibility over Choi operators), the spectral
monotones that characterize the asymptotic and catalytic relaxations, and
thermodynamic and hypothesis-testing applications.
"""
from .errors import *  # noqa: F401,F403
from .families import FamilyPair, FiniteMeasure
from .feasibility import (ChoiOperator, FeasibilityReport, decide_exact_transform, decide_submajorization,
                          decide_submajorization_classical)
from .linalg import BACKEND
from .means import MeanProgram, geometric_mean
from .spectrum import SpectralPoint, evaluate, sweep_decide

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ChoiOperator", "FamilyPair", "FeasibilityReport", "FiniteMeasure", "MeanProgram",
    "SpectralPoint", "decide_exact_transform", "decide_submajorization", "decide_submajorization_classical",
    "evaluate", "geometric_mean", "sweep_decide", "__version__",
]
