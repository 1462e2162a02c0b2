"""Simulation and design laboratory for time-modulated leaky-wave antennas.

Subpackages cover the radiation model of a binary-coded antenna
(``array_model``), the coding-sequence design problems and their relaxations
(``objectives``), a branch-and-bound solver with an enumeration oracle
(``solver``), learned node-pruning policies (``pruning``), waveform-level link
and secrecy simulation (``link``), and scenario/CLI plumbing (``scenario``,
``cli``).
"""

from .array_model import (
    ArrayConfig,
    CodingSchedule,
    HarmonicPattern,
    array_factor_1d,
    array_factor_2d,
    channel_gain,
    cumulative_phase,
    fourier_coefficient,
    fourier_coefficients,
    harmonic_weight,
    harmonic_weights,
    harmonic_weights_from_steps,
    magnitude_db,
    pattern_sweep,
    shifter_phase,
    shifter_phases,
    step_values_1d,
    step_values_2d,
    step_values_channel,
    time_domain_pattern,
)
from .objectives import (
    PROBLEM_KINDS,
    DecisionVector,
    DMProblem,
    DMVerifyReport,
    VerifyOptions,
    make_evaluator,
    objective_value,
    relaxed_objective,
    relaxed_objective_grad,
    step_shifters,
    verify_dm_constraints,
)
from .seeding import child_rng, child_seed
from .solver import (
    FEATURE_COLUMNS,
    OracleResult,
    SolveLimits,
    SolveReport,
    exhaustive_oracle,
    solve,
    solve_relaxation,
)
from .pruning import (
    NodeFeatures,
    PruningNet,
    TrainingCorpus,
    collect_training_data,
    load_trace,
    make_policy,
    save_trace,
    speed_metric,
    train_policy,
)
from .link import (
    CHANNEL_KINDS,
    ChannelRealization,
    LinkResult,
    OFDMConfig,
    awgn,
    ber_sweep_angle,
    ber_sweep_snr,
    evm_squared,
    exponential_correlation,
    generate_channel,
    post_equalization_sinr,
    qpsk_demodulate,
    qpsk_modulate,
    qpsk_theory_ber,
    received_subcarriers_channel,
    received_subcarriers_freespace,
    secrecy_capacity,
    subcarrier_weight_table,
    time_domain_subcarriers,
)
from .scenario import (
    DEFAULTS,
    build_array,
    build_limits,
    build_ofdm,
    build_problem,
    build_verify,
    eval_eve_csi,
    grid_values,
    load_scenario,
    read_schedule_file,
    resolve_scenario,
    schedule_from_scenario,
    write_schedule_file,
)

__version__ = "0.1.0"
