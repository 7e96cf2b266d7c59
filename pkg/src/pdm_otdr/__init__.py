"""Simulator for polarization-multiplexed coherent phase-OTDR probing."""
from .channel import ChannelRealization, generate_channel, tap_intensity_profile, true_phase
from .linksim import NoiseConfig, ReceivedField, simulate_rx
from .metrics import det_relative_error, max_length, mechanical_bandwidth, phase_error, spatial_resolution
from .receiver import EstimatedResponse, differential_phase, estimate, extract_phase
from .sequences import (DualPolSequence, Scheme, build_probe, generate_cazac, generate_golay_pair, mate_pair,
                        probe_for_length)

__all__ = [
    "ChannelRealization",
    "DualPolSequence",
    "EstimatedResponse",
    "NoiseConfig",
    "ReceivedField",
    "Scheme",
    "build_probe",
    "det_relative_error",
    "differential_phase",
    "estimate",
    "extract_phase",
    "generate_cazac",
    "generate_channel",
    "generate_golay_pair",
    "mate_pair",
    "max_length",
    "mechanical_bandwidth",
    "phase_error",
    "probe_for_length",
    "simulate_rx",
    "spatial_resolution",
    "tap_intensity_profile",
    "true_phase",
]
