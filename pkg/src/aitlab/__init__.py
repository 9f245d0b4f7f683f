"""Desk-scale algorithmic information theory: a concrete base machine, prefix
codes, Kraft-Chaitin allocation, a constant-dispatch optimal machine, Omega
lower bounds and a handful of incompressibility-method counting demos.

Bit strings are plain Python ``str`` objects over ``'0'``/``'1'``; the empty
string is the empty word.
"""

from aitlab.errors import (
    AitError,
    BudgetExceeded,
    Infeasible,
    InvalidInput,
    InvalidWitness,
    MalformedCode,
    NotFound,
    TooLarge,
)
from aitlab.dyadic import Dyadic

__all__ = [
    "AitError",
    "BudgetExceeded",
    "Dyadic",
    "Infeasible",
    "InvalidInput",
    "InvalidWitness",
    "MalformedCode",
    "NotFound",
    "TooLarge",
]
