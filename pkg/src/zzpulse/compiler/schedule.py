"""Schedules and the pulse emitter shared by the architecture back ends."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..blockade import ScheduleStep, steps_for
from ..device import SUBGROUPS, Device
from ..rotor import Rotation, compose_all
from ..synth import GlobalPulse, synth_targets

# Logical |0> is |g> and |1> is |e>, and rotor matrices use the (|e>, |g>)
# order, so a logical matrix is brought over by swapping both indices.
_SWAP = np.array([[0, 1], [1, 0]], dtype=complex)

PI_X = Rotation(math.pi, (1.0, 0.0, 0.0))
PI_X_INV = Rotation(-math.pi, (1.0, 0.0, 0.0))
TWO_PI = Rotation(2 * math.pi, (1.0, 0.0, 0.0))


def physical_su2(u_logical: np.ndarray) -> tuple[Rotation, complex]:
    """Split a logical 1-qubit unitary into ``(R, c)`` with ``U = c * matrix(R)`` on hardware."""
    u = _SWAP @ np.asarray(u_logical, dtype=complex) @ _SWAP
    c = cmath.sqrt(np.linalg.det(u))
    return Rotation.from_matrix(u / c), c


@dataclass
class Schedule:
    steps: list[ScheduleStep] = field(default_factory=list)
    #: final device state == phase * (ideal logical state, embedded)
    phase: complex = 1.0 + 0j
    tracker_trace: list[dict] = field(default_factory=list)
    device_ref: str = ""
    final_positions: list[int] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        steps = []
        for s in self.steps:
            p = s.pulse.normalized()
            steps.append({"species": s.species, "theta": p.theta, "phi": p.phi})
        return {
            "device_ref": self.device_ref,
            "steps": steps,
            "phase_ledger": {"re": self.phase.real, "im": self.phase.imag},
            "tracker_trace": self.tracker_trace,
            "final_positions": self.final_positions,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Schedule":
        steps = [ScheduleStep(s["species"], GlobalPulse(float(s["theta"]), float(s["phi"]))) for s in data["steps"]]
        ph = data.get("phase_ledger", {"re": 1.0, "im": 0.0})
        return cls(
            steps=steps,
            phase=complex(ph["re"], ph["im"]),
            tracker_trace=list(data.get("tracker_trace", [])),
            device_ref=data.get("device_ref", ""),
            final_positions=list(data.get("final_positions", [])),
        )

    @classmethod
    def from_json(cls, text: str) -> "Schedule":
        return cls.from_dict(json.loads(text))


class Emitter:
    """Collects per-subgroup rotations and lowers them to global pulses.

    Rotations queued for one species are multiplied out per subgroup and
    synthesised as a single pulse train when the other species is needed
    (or on :meth:`flush`).  ``phase`` accumulates the factor by which the
    realised operation differs from the logical gates it stands for.
    """

    def __init__(self, device: Device):
        self.device = device
        self.steps: list[ScheduleStep] = []
        self.phase: complex = 1.0 + 0j
        self._species: str | None = None
        self._pending: dict[str, list[Rotation]] = {}

    def rotate(self, species: str, subgroup: str, r: Rotation) -> None:
        if self._species is not None and self._species != species:
            self.flush()
        self._species = species
        self._pending.setdefault(subgroup, []).append(r)

    def gate(self, species: str, subgroup: str, u_logical: np.ndarray) -> None:
        """Logical gate on every site of a subgroup; the discarded phase goes to the ledger."""
        r, c = physical_su2(u_logical)
        count = len(self.device.sites_in(species, subgroup))
        self.phase *= c ** (-count)
        self.rotate(species, subgroup, r)

    def pulse(self, species: str, subgroup: str) -> None:
        """Full 2*pi turn on one subgroup (the native blockade phase gate)."""
        self.rotate(species, subgroup, TWO_PI)

    def flush(self) -> None:
        if self._species is None:
            return
        species = self._species
        n = self.device.subgroup_count(species)
        targets = [compose_all(self._pending.get(SUBGROUPS[j], [])) for j in range(n)]
        unknown = set(self._pending) - set(SUBGROUPS[:n])
        if unknown:
            raise ValueError(f"species {species} has no subgroup(s) {sorted(unknown)}")
        self.steps.extend(steps_for(species, synth_targets(targets)))
        self._species = None
        self._pending = {}

    def take(self) -> list[ScheduleStep]:
        self.flush()
        out, self.steps = self.steps, []
        return out
