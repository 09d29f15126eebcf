"""Simulation laboratory for key generation via a randomly configured
reflecting surface.

The package models a static-channel deadlock broken by random per-round
phase configurations: propagation and channel sampling (propagation),
surface phase control (irs), observation, correlation, and rate analysis
(keygen), time-slot allocation for encrypted transmission (allocation),
Poisson eavesdropper fields (stochgeo), and experiment drivers with a CLI
(harness, cli).
"""

from .allocation import (AllocationResult, edt_rate, mrt_rate, optimal_q_bisection,
                         q_max_slots, run_algorithm_1)
from .harness import (ExperimentConfig, aggregate_rows, config_from_mapping,
                      config_to_dict, parse_config_file, read_csv_rows, rows_to_csv,
                      run_allocation_sweep, run_ppp_sweep, run_scheme_comparison,
                      run_validation_suite, summary_to_json, trial_rng)
from .irs import PhaseConfig, combined_channel, mrt_phase_config, phase_grid, random_phase_config
from .keygen import (CorrelationEstimates, KeyMaterial, ObservationRecord,
                     analytic_correlations, autocorrelation_theoretical,
                     conditional_mutual_information, estimate_correlations,
                     kgr_closed_form, kgr_sample_average, normalize, observe_rounds,
                     otp_xor, quantize_keys)
from .propagation import (SPEED_OF_LIGHT, ChannelSet, Geometry, PathLossModel,
                          eve_correlation_coefficient, linear_gain, path_loss_db,
                          sample_channel_set)
from .stochgeo import (PppConfig, expected_min_distance, independent_envelope_cross_moment,
                       kgr_ppp, nearest_eve_pdf, rho_e_max, sample_ppp)

__version__ = "0.1.0"

__all__ = [
    "AllocationResult", "ChannelSet", "CorrelationEstimates", "ExperimentConfig",
    "Geometry", "KeyMaterial", "ObservationRecord", "PathLossModel", "PhaseConfig",
    "PppConfig", "SPEED_OF_LIGHT", "aggregate_rows", "analytic_correlations",
    "autocorrelation_theoretical", "combined_channel", "conditional_mutual_information",
    "config_from_mapping", "config_to_dict", "edt_rate", "estimate_correlations",
    "eve_correlation_coefficient", "expected_min_distance",
    "independent_envelope_cross_moment", "kgr_closed_form", "kgr_ppp",
    "kgr_sample_average", "linear_gain", "mrt_phase_config", "mrt_rate", "normalize",
    "nearest_eve_pdf", "observe_rounds", "optimal_q_bisection", "otp_xor",
    "parse_config_file", "path_loss_db", "phase_grid", "q_max_slots", "quantize_keys",
    "random_phase_config", "read_csv_rows", "rho_e_max", "rows_to_csv",
    "run_algorithm_1", "run_allocation_sweep", "run_ppp_sweep",
    "run_scheme_comparison", "run_validation_suite", "sample_channel_set",
    "sample_ppp", "summary_to_json", "trial_rng",
]
