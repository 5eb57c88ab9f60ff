"""Python bindings for the ovsafe car-following safety toolkit."""

from ._ovsafe import (
    BarrierTable,
    DerivedConstants,
    DomainError,
    Model,
    ModelParams,
    __version__,
    build_barrier,
    drift_sign_functional,
    integrate_deterministic,
    optimal_velocity,
    run_sweep,
    simulate_path,
    wilson_interval,
    working_delta,
)

__all__ = [
    "BarrierTable",
    "DerivedConstants",
    "DomainError",
    "Model",
    "ModelParams",
    "__version__",
    "build_barrier",
    "drift_sign_functional",
    "integrate_deterministic",
    "optimal_velocity",
    "run_sweep",
    "simulate_path",
    "wilson_interval",
    "working_delta",
]
