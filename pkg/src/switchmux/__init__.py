"""switchmux: link-level simulator of a switched-antenna multi-user receiver.

A single RF chain sampled at K times the per-user bandwidth, with each
antenna gated by a 1/K duty-cycled on-off code, carries K "virtual" receive
chains. The package implements the switching-code math, the despreading that
recovers the virtual chains, phase-aligned antenna grouping, OFDM modem,
channel models, digital combining, baseline architectures (digital, hybrid,
FDMA) and the power/energy models, plus a deterministic Monte-Carlo
experiment runner.
"""

__version__ = "0.1.0"

from .dsp import Rng, SampleStream, add_awgn, dft, fractional_delay, idft
from .codes import (
    PhaseMatrix,
    SwitchCode,
    code_spectrum,
    generate_codes,
    phase_matrix,
    superpose,
)
from .config import ConfigError, ExperimentConfig, build_config, load_config, parse_config_text
from .despread import VirtualChainSet, freq_despread, time_despread
from .frontend import (
    FrontendConfig,
    SwitchMatrix,
    capture_hybrid,
    capture_physical,
    capture_switched,
)
from .grouping import GroupingConfig, GroupingError, inphase_select, random_switch_matrix
from .channel import ChannelSet, RoomScene, ray_trace, rayleigh
from .waveform import OfdmConfig, build_frame, recover_bits
from .equalize import (
    apply_combiner,
    estimate_channel,
    nullspace_weights,
    true_effective_channel,
    zf_weights,
)
from .metrics import PowerReport, adc_power, bits_per_joule, capacity, evm, power, sinr
from .runner import run_sweep, run_trial, sweep_combos

__all__ = [
    "Rng",
    "SampleStream",
    "add_awgn",
    "dft",
    "fractional_delay",
    "idft",
    "PhaseMatrix",
    "SwitchCode",
    "code_spectrum",
    "generate_codes",
    "phase_matrix",
    "superpose",
    "ConfigError",
    "ExperimentConfig",
    "build_config",
    "load_config",
    "parse_config_text",
    "VirtualChainSet",
    "freq_despread",
    "time_despread",
    "FrontendConfig",
    "SwitchMatrix",
    "capture_hybrid",
    "capture_physical",
    "capture_switched",
    "GroupingConfig",
    "GroupingError",
    "inphase_select",
    "random_switch_matrix",
    "ChannelSet",
    "RoomScene",
    "ray_trace",
    "rayleigh",
    "OfdmConfig",
    "build_frame",
    "recover_bits",
    "apply_combiner",
    "estimate_channel",
    "nullspace_weights",
    "true_effective_channel",
    "zf_weights",
    "PowerReport",
    "adc_power",
    "bits_per_joule",
    "capacity",
    "evm",
    "power",
    "sinr",
    "run_sweep",
    "run_trial",
    "sweep_combos",
    "__version__",
]
