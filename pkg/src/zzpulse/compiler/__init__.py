"""Circuit to pulse-schedule compilation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..blockade import apply_schedule, basis_index, check_size, fidelity
from ..device import Device
from ..errors import ResourceLimitError
from .circuit import Circuit, Gate, parse_circuit, reference_simulate
from .conveyor import ConveyorBackend
from .schedule import Emitter, Schedule, physical_su2

MAX_LOGICAL_QUBITS = 12


@dataclass
class Placement:
    """Where logical qubits live on the device plus the fixed background."""

    sites: list[int]
    background: list[int] = field(default_factory=list)


def embed_logical(d: Device, psi: np.ndarray, placement: Placement) -> np.ndarray:
    """Device state for a logical state (qubit 1 most significant)."""
    check_size(d.num_sites)
    n = len(placement.sites)
    if psi.shape != (1 << n,):
        raise ValueError(f"logical state has shape {psi.shape}, expected ({1 << n},)")
    out = np.zeros(1 << d.num_sites, dtype=complex)
    for idx in np.flatnonzero(psi):
        excited = list(placement.background)
        excited += [placement.sites[q] for q in range(n) if (idx >> (n - 1 - q)) & 1]
        out[basis_index(d.num_sites, excited)] = psi[idx]
    return out


def conveyor_placement(d: Device, positions) -> Placement:
    return Placement([d.layout["q_sites"][p - 1] for p in positions])


def compile_circuit(circuit: Circuit, d: Device, **options) -> tuple[Schedule, Placement, Placement]:
    """Lower ``circuit`` onto ``d``.

    Returns the schedule and the initial and final placements.  The device
    state after the schedule equals ``schedule.phase`` times the ideal output
    embedded with the final placement.
    """
    if circuit.n != d.num_logical:
        raise ResourceLimitError(f"circuit has {circuit.n} qubits, device holds {d.num_logical}")
    if d.architecture == "conveyor":
        be = ConveyorBackend(d)
        start = conveyor_placement(d, be.positions)
        for k, g in enumerate(circuit.gates):
            be.lower(g, k)
        if options.get("restore", True):
            be.go_home(len(circuit.gates))
        steps = be.em.take()
        sched = Schedule(steps, be.em.phase, be.trace, final_positions=list(be.positions))
        return sched, start, conveyor_placement(d, be.positions)
    if d.architecture == "ladder":
        from .ladder import compile_ladder

        return compile_ladder(circuit, d, **options)
    raise ValueError(f"no compiler for architecture {d.architecture!r}")


@dataclass
class RunResult:
    fidelity: float
    final_state: np.ndarray
    expected: np.ndarray


def run_schedule(circuit: Circuit, d: Device, sched: Schedule, start: Placement, end: Placement,
                 initial: str | None = None) -> RunResult:
    """Simulate ``sched`` from an embedded logical basis state and compare with the reference."""
    if circuit.n > MAX_LOGICAL_QUBITS:
        raise ResourceLimitError(f"reference simulation is limited to {MAX_LOGICAL_QUBITS} qubits")
    psi0 = np.zeros(1 << circuit.n, dtype=complex)
    psi0[int(initial, 2) if initial else 0] = 1.0
    dev0 = embed_logical(d, psi0, start)
    out = apply_schedule(dev0, d, sched.steps)
    expected = sched.phase * embed_logical(d, reference_simulate(circuit, initial), end)
    return RunResult(fidelity(expected, out), out, expected)


__all__ = [
    "Circuit",
    "Emitter",
    "Gate",
    "Placement",
    "RunResult",
    "Schedule",
    "compile_circuit",
    "embed_logical",
    "parse_circuit",
    "physical_su2",
    "reference_simulate",
    "run_schedule",
]
