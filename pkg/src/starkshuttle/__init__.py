"""Ion-transport trajectories and the D.C. Stark errors they cause."""

from .atomic import (
    AtomicModel,
    Polarization,
    StateDecomposition,
    StateTerm,
    load_model,
    susceptibility,
)
from .errors import ConvergenceError, StarkError, TruncationError, ValidationError
from .motion import BE9, CA40, IonSpecies, coherent_evolution, field_profile, fock_oracle
from .stark import (
    QubitDefinition,
    be9_hyperfine_qubit,
    ca40_sd_qubit,
    decoherence_error,
    decoherence_ratio,
    decoherence_report,
    dephasing,
    first_order_amplitude,
    min_phase,
    phase_coefficient,
    qubit_preset,
    second_order_amplitude,
    threshold_time,
)
from .trajectory import (
    Trajectory,
    WellProgram,
    constant_well,
    ion_from_well,
    make_optimal_trajectory,
    make_quintic_trajectory,
    make_ramped_trajectory,
    make_sampled_trajectory,
    optimal_well,
    rowe_well,
    sampled_well,
    well_from_ion,
    zeta,
)

__version__ = "0.1.0"
