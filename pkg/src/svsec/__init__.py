"""Non-defectivity of secant varieties of Segre-Veronese varieties."""

from .config import Config
from .core import (
    AbundanceClass,
    HoraceInapplicable,
    InputError,
    SecantProblem,
    abundance,
    ambient_count,
    bc_window,
    critical_values,
    expected_dimension,
    expected_rank,
    horace_numbers,
)
from .certificate import Certificate

__version__ = "0.1.0"
