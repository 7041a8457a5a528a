"""Pulse-level compilation for globally driven ZZ-coupled qubit arrays."""

from .device import Device, build_conveyor, build_ladder, chain, load_fixture, validate
from .rotor import Rotation, compose, compose_all, euler_transverse, inverse
from .synth import GlobalPulse, synth_targets, verify_sequence

__all__ = [
    "Device",
    "GlobalPulse",
    "Rotation",
    "build_conveyor",
    "build_ladder",
    "chain",
    "compose",
    "compose_all",
    "euler_transverse",
    "inverse",
    "load_fixture",
    "synth_targets",
    "validate",
    "verify_sequence",
]
