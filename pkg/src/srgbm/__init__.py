"""Geometric Brownian motion under stochastic resetting: simulation and closed forms."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ModelParams,
    RngStream,
    SimGrid,
    Trajectory,
    final_positions,
    generate_ensemble,
    sample_last_reset_time,
    sample_position_exact,
    simulate_euler,
)
from .exceptions import (  # noqa: E402
    BracketingError,
    DiscretizationError,
    NumericalError,
    ParameterError,
    QuadratureError,
    RegimeError,
    SrgbmError,
)
