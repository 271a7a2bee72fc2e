"""gridloop: small-signal dynamics and feedforward-controller synthesis
for reconfigurable microgrids.

Subpackages and modules
-----------------------
tfcore
    Polynomial/rational transfer-function algebra, state-space
    realizations, frequency responses, system norms, fixed-step LTI
    simulation.
netmodel
    dq-frame network admittance model, switch states, operating-point
    solver, topology-change step injections.
devices
    Linearized synchronous-generator, inverter, and ZIP-load blocks.
reduction
    Assembly of the network-coupled microgrid model and the
    reconfiguration response transfer functions a(s), b(s), p(s).
control
    Feedback-loop transfer functions, feedforward-controller synthesis,
    delay/parameter-error robustness analysis.
scenario
    Switching timelines, disturbance traces, piecewise-LTI closed-loop
    simulation, metrics, sensitivity sweeps.
cli
    Command-line frontend (``gridloop model|bode|simulate|sweep``).
"""

from gridloop._backend import backend_name

__version__ = "0.1.0"

__all__ = ["backend_name", "__version__"]
