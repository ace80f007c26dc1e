"""confinv: scalar differential invariants of conformal structures.

The package has two halves that check each other:

* a jet-level curvature pipeline (``jets``, ``metric_io``, ``tensors``,
  ``invariants``) that evaluates conformal invariants of a metric given by a
  small text file, and
* exact counting machinery (``counting``, ``spencer``, ``orbits``) that
  reproduces the dimension counts those invariants must satisfy, by
  closed-form formulas and by brute-force rank computations over the
  rationals.

See README.md for usage; ``python -m confinv --help`` for the CLI.
"""

from .counting import CountReport, hilbert, poincare, trdeg
from .errors import ConfinvError
from .invariants import (
    canonicalized_invariants,
    evaluate_invariants,
    invariance_residuals,
    jacobian_rank,
)
from .jets import EXACT, FLOAT, Jet
from .metric_io import MetricSpec, build_metric_jet, load_metric, parse_metric
from .tensors import DiffeoJet, MetricJet, TensorJet
from .verify import run_suite

__all__ = [
    "ConfinvError",
    "CountReport",
    "DiffeoJet",
    "EXACT",
    "FLOAT",
    "Jet",
    "MetricJet",
    "MetricSpec",
    "TensorJet",
    "build_metric_jet",
    "canonicalized_invariants",
    "evaluate_invariants",
    "hilbert",
    "invariance_residuals",
    "jacobian_rank",
    "load_metric",
    "parse_metric",
    "poincare",
    "run_suite",
    "trdeg",
]

__version__ = "0.1.0"
