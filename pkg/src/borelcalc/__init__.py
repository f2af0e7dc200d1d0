"""Borel-transform tools for linear equations of infinite order."""

import os as _os

_threads = _os.environ.get("BORELCALC_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from .errors import BorelcalcError, DomainError, InputError, NumericalError  # noqa: E402
from .numerics import Circle, Rectangle, contour_integrate, uniform_grid  # noqa: E402

__version__ = "0.1.0"
