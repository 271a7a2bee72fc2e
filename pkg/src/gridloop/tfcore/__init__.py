"""Transfer-function and state-space core.

Exact rational arithmetic with guarded pole/zero cancellation,
controllable-canonical realization, frequency responses, H2/H-infinity
norms, and fixed-step RK4 simulation.
"""

from gridloop.tfcore.polynomial import Polynomial
from gridloop.tfcore.rational import (
    CANCEL_TOL,
    PoleEvaluationError,
    RationalTF,
    TfArithmeticError,
    tf_arith,
    tf_eval,
)
from gridloop.tfcore.statespace import (
    FrequencyResponse,
    ImaginaryAxisPoleError,
    ImproperRealizationError,
    StateSpace,
    default_grid,
    freq_response,
    ss_add,
    ss_eigenvalues,
    ss_gain,
    ss_scale,
    ss_series,
    tf_to_ss,
)
from gridloop.tfcore.norms import (
    UnstableSystemError,
    h2_lyapunov,
    h2_quadrature,
    hinf_peak,
    response_callable,
    sys_norms,
)
from gridloop.tfcore.simulate import (
    DtTooLargeError,
    SimResult,
    SimulationDivergedError,
    rk4_gains,
    simulate_lti,
)

__all__ = [
    "Polynomial",
    "RationalTF",
    "tf_arith",
    "tf_eval",
    "CANCEL_TOL",
    "TfArithmeticError",
    "PoleEvaluationError",
    "StateSpace",
    "FrequencyResponse",
    "tf_to_ss",
    "ss_eigenvalues",
    "freq_response",
    "default_grid",
    "ss_series",
    "ss_add",
    "ss_scale",
    "ss_gain",
    "ImproperRealizationError",
    "ImaginaryAxisPoleError",
    "sys_norms",
    "h2_lyapunov",
    "h2_quadrature",
    "hinf_peak",
    "response_callable",
    "UnstableSystemError",
    "simulate_lti",
    "rk4_gains",
    "SimResult",
    "SimulationDivergedError",
    "DtTooLargeError",
]
