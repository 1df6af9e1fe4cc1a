"""Exact computations for K3 differential operators, eta products and BCOV cusp forms."""
from .exactalg import Q, Rational, RatMatrix, UniPoly, q
from .qseries import LogSeries, PuiseuxSeries
from .etaprod import EtaQuotient, eta_bcov
from .pfode import ThetaOperator

__version__ = "0.1.0"

__all__ = [
    "Q",
    "Rational",
    "RatMatrix",
    "UniPoly",
    "q",
    "LogSeries",
    "PuiseuxSeries",
    "EtaQuotient",
    "eta_bcov",
    "ThetaOperator",
]
