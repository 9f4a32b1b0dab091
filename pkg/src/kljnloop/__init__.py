"""KLJN key exchange with parasitic DC ground-loop sources: simulator, attack, defenses."""

from .analytic import AnalyticPrediction, erf, exceed_probability, predict, predict_bit_success, predict_curve
from .defense import DefenseAction, compensate_dc, dc_block, dc_loop_alarm, scale_noise
from .errors import ConfigError, DegenerateEstimateError, InsufficientDataError, InvalidParameterError
from .eve import (
    AttackOutcome,
    DcEstimates,
    GuessStats,
    classify_state_from_ac,
    estimate_dc_sources,
    guess_bit,
    run_attack,
    threshold_voltage,
)
from .exchange import ExchangeRun, draw_bit_state, infer_peer_resistance, run_key_exchange, snap_resistance
from .experiment import ExperimentConfig, SweepReport, emit_report, load_report, parse_config, run_experiment
from .physics import (
    BOLTZMANN,
    BitState,
    SystemParams,
    WireTrace,
    johnson_rms,
    simulate_bep,
    wire_ac_rms,
    wire_dc_current,
    wire_dc_voltage,
)

__version__ = "0.1.0"
