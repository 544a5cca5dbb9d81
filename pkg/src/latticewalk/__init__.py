"""Exact event algebra and random-walk mechanics on a cubic lattice.

Core layers:

* :mod:`latticewalk.algebra` -- canonical decision-DAG event sets over
  move-symbol sequences, with exact rational measure;
* :mod:`latticewalk.walk` -- exact moments (mean path, velocity,
  acceleration, covariance trace) of the lattice walk;
* :mod:`latticewalk.dynamics` -- table evolution under force schedules
  and the force/acceleration proportionality;
* :mod:`latticewalk.simulate` -- reproducible Monte Carlo cross-checks;
* :mod:`latticewalk.service` -- FastAPI wrapper exposing the workflows;
* :mod:`latticewalk.cli` -- thin command-line client.
"""

from .algebra import Arena, EventSet
from .errors import (
    ArenaMismatch,
    DepthExceedsTable,
    ExpressionSyntaxError,
    IndexOutOfRange,
    LatticeWalkError,
    ProbabilityOverflow,
)
from .tables import StepProbabilityTable
from .walk import LatticeConfig

__all__ = [
    "Arena",
    "EventSet",
    "StepProbabilityTable",
    "LatticeConfig",
    "LatticeWalkError",
    "ArenaMismatch",
    "DepthExceedsTable",
    "IndexOutOfRange",
    "ProbabilityOverflow",
    "ExpressionSyntaxError",
]

__version__ = "0.1.0"
