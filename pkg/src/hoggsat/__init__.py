"""Single-step structured quantum search over 1-SAT, with an NMR-ensemble
emulation layer (pseudo-pure state preparation by temporal averaging, pulse
sequence verification, tomography-style readout, and error analysis)."""

from .formula import (
    Clause,
    Formula,
    FormulaParseError,
    Literal,
    assignment_bits,
    conflict_counts,
    conflicts,
    grover_success_probability,
    hamming_distance,
    negate_variable,
    parse_assignment_bits,
    parse_formula,
    reverse_bits,
    solutions,
    variable_value,
)
from .hogg import (
    WgwReport,
    gamma_matrix,
    leading_phase_normalized,
    measure_distribution,
    mixing_matrix,
    phase_matrix,
    run_pipeline,
    verify_wgw,
    walsh_apply,
    walsh_hadamard,
)
from .pulse import (
    EMPTY_SEQUENCE,
    JDelay,
    LoweredProgram,
    NotTensorFactorable,
    Pulse,
    PulseParseError,
    PulseSequence,
    SequenceVerification,
    TableRow,
    THREE_SPIN_TABLE,
    compile_diagonal,
    parse_pulse_sequence,
    prep_pulse_program,
    program_unitary,
    reduce_sequence,
    search_unitary,
    sequence_to_unitary,
    verify_table_sequence,
)
from .spin_sim import (
    ALANINE,
    CNot,
    ErrorMetrics,
    Experiment,
    Flip,
    MEASURED_PREP_DIAG,
    MEASURED_SEARCH_DIAGS,
    NoPopulationContrast,
    PrepScheme,
    SchemeParseError,
    SpectralLine,
    SpinSystem,
    SpinSystemParseError,
    TomographyResult,
    apply_gate,
    builtin_prep_scheme,
    diag_tomography,
    error_metrics,
    experiment_unitary,
    format_z_terms,
    four_spin_prep_scheme,
    gate_unitary,
    ideal_population_vector,
    lint_scheme,
    parse_measured_vector,
    parse_prep_scheme,
    parse_spin_system,
    run_experiment,
    run_prep_scheme,
    significant_terms,
    stick_spectrum,
    target_pseudo_pure,
    thermal_state,
    three_spin_prep_scheme,
    z_product,
    z_product_decomposition,
    zero_off_diagonal,
)

__version__ = "1.0.0"
