"""mbtop: a numerical laboratory for the Maxwell-Bloch top family.

Subpackages:

* :mod:`mbtop.core` -- parameters, vector field, first integrals, and the
  family of Hamilton-Poisson realizations;
* :mod:`mbtop.poly` -- polynomial bracket arithmetic and Poisson-axiom
  verification;
* :mod:`mbtop.integrate` -- time integration with invariant-drift
  instrumentation (compiled kernel with pure-Python fallback);
* :mod:`mbtop.pendulum` -- reduction to the pendulum on level surfaces;
* :mod:`mbtop.stability` -- equilibrium families and their spectral and
  nonlinear classification;
* :mod:`mbtop.g4` -- the optimal-control system on the nilpotent group of
  unipotent 4x4 matrices and its bridge back to the top family;
* :mod:`mbtop.cli` -- command-line front end.
"""

from .core import (
    Params,
    Realization,
    RealizationBundle,
    make_params,
    preset,
    vector_field,
    first_integrals,
    realization,
    named_realization,
)
# note: the `integrate` *function* lives in mbtop.integrate; it is not
# re-exported here so the submodule name stays importable.
from .integrate import IntegratorSpec, Trajectory, backend_name, drift_report

__all__ = [
    "Params",
    "Realization",
    "RealizationBundle",
    "make_params",
    "preset",
    "vector_field",
    "first_integrals",
    "realization",
    "named_realization",
    "IntegratorSpec",
    "Trajectory",
    "backend_name",
    "drift_report",
]

__version__ = "0.1.0"
