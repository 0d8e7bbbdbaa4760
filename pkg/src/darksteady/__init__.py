"""Dissipative generation of electron-nuclear entanglement in an optically
pumped spin system.

The package splits into layers: ``linalg`` (dense superoperator helpers),
``model`` (Hamiltonians, collapse operators, target states), ``engine``
(Lindblad integration and steady states), ``pulses`` (the pulsed protocol
with its error models), ``config``/``experiments``/``cli`` (reproducible
experiment runs).
"""

from .config import ExperimentConfig, PulseOptions, parse_config, render_config, resolve_params
from .engine import (
    Liouvillian,
    SteadyStateResult,
    Trajectory,
    build_liouvillian,
    evolve_fixed_step,
    evolve_propagator,
    fidelity,
    purity,
    stationarity_residual,
    steady_state,
)
from .errors import (
    ConfigError,
    DarksteadyError,
    DimensionError,
    DomainError,
    NonUniqueSteadyState,
    NumericalError,
    StepSizeError,
)
from .experiments import run_experiment
from .linalg import SpaceLayout, dagger, expm, kron, partial_trace, unvectorize, vectorize
from .model import (
    SystemParams,
    TargetStates,
    basis_labels,
    build_collapse_ops,
    build_hamiltonian,
    build_operators,
    default_target,
    mixed_ground_state,
    target_states,
)
from .pulses import (
    ElectronRotation,
    FreeEvolution,
    Idle,
    NuclearRotation,
    OpticalPump,
    PulseSequence,
    dd_error,
    run_sequence,
    standard_cycle,
    subspace_rotation,
    t2star_sweep,
)
from .version import __version__

__all__ = [
    "ConfigError",
    "DarksteadyError",
    "DimensionError",
    "DomainError",
    "ElectronRotation",
    "ExperimentConfig",
    "FreeEvolution",
    "Idle",
    "Liouvillian",
    "NonUniqueSteadyState",
    "NuclearRotation",
    "NumericalError",
    "OpticalPump",
    "PulseOptions",
    "PulseSequence",
    "SpaceLayout",
    "SteadyStateResult",
    "StepSizeError",
    "SystemParams",
    "TargetStates",
    "Trajectory",
    "__version__",
    "basis_labels",
    "build_collapse_ops",
    "build_hamiltonian",
    "build_liouvillian",
    "build_operators",
    "dagger",
    "dd_error",
    "default_target",
    "evolve_fixed_step",
    "evolve_propagator",
    "expm",
    "fidelity",
    "kron",
    "mixed_ground_state",
    "parse_config",
    "partial_trace",
    "purity",
    "render_config",
    "resolve_params",
    "run_experiment",
    "run_sequence",
    "stationarity_residual",
    "standard_cycle",
    "steady_state",
    "subspace_rotation",
    "t2star_sweep",
    "target_states",
    "unvectorize",
    "vectorize",
]
