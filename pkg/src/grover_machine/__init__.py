"""Grover search on three registers and the constraint machine that reproduces its measurement."""

from .classical import (
    Gate,
    QueryTranscript,
    ReversibleGateNetwork,
    classical_search,
    evaluate_gate_network,
    exact_mean_queries,
)
from .histories import History, enumerate_histories, history_outcome_distribution
from .machine import (
    Q,
    BooleanNetwork,
    ConstraintMachine,
    CoordinateId,
    MachineMovement,
    build_machine,
    check_exclusivity,
    delta_network,
    derive_linking_equations,
    enumerate_movements,
    movement_populations,
    movement_to_assignment,
    parse_network,
    sample_movement,
)
from .populations import PopulationVector
from .quantum import (
    MeasurementRecord,
    RegisterLayout,
    StateVector,
    apply_diffusion,
    apply_oracle,
    grover_run,
    measure,
    prepare_input,
    qubit_populations,
    success_probability,
)

__version__ = "0.1.0"
