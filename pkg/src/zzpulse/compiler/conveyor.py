"""Conveyor-belt back end: swap layers, routing, and hub-based entangling gates.

Ring positions are numbered ``1..n`` (``Q_k`` sits at site ``2(k-1)``).  A
``T1`` layer swaps the pairs ``(1,2), (3,4), ...`` through the crossed
mediators, a ``T2`` layer swaps ``(2,3), ..., (n,1)`` through the regular
ones.  The hub touches positions 2, 3 and 4.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..blockade import ScheduleStep
from ..device import Device
from ..errors import CompileError
from .circuit import Gate, one_qubit_matrix
from .schedule import PI_X, PI_X_INV, Emitter

H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)

ODD_CLASS = ("regular", "double_crossed")  # B subgroups of Q1, Q3, Q5, ...
EVEN_CLASS = ("crossed",)
LAYER_MEDIATOR = {"T1": "crossed", "T2": "regular"}
HUB_POSITIONS = (2, 3, 4)
GATE_POSITION = 1


def layer_pairs(n: int, which: str) -> list[tuple[int, int]]:
    if which == "T1":
        return [(k, k + 1) for k in range(1, n, 2)]
    if which == "T2":
        return [(k, k % n + 1) for k in range(2, n + 1, 2)]
    raise ValueError(f"unknown layer {which!r}")


def layer_map(n: int, which: str) -> dict[int, int]:
    """Where the content of each position ends up after one layer."""
    out = {}
    for a, b in layer_pairs(n, which):
        out[a], out[b] = b, a
    return out


def belt_permutation(n: int, steps: int) -> dict[int, int]:
    """Position map of ``steps`` full turns (``T1`` then ``T2``), composed layer by layer."""
    t1, t2 = layer_map(n, "T1"), layer_map(n, "T2")
    perm = {k: k for k in range(1, n + 1)}
    for _ in range(steps):
        perm = {k: t2[t1[v]] for k, v in perm.items()}
    return perm


def cyclic_oracle(n: int, steps: int) -> dict[int, int]:
    """Closed form of :func:`belt_permutation`: odd positions move +2 per turn, even ones -2."""
    out = {}
    for k in range(1, n + 1):
        shift = 2 * steps if k % 2 else -2 * steps
        out[k] = (k - 1 + shift) % n + 1
    return out


class ConveyorBackend:
    """Lowers logical gates to pulses while tracking where each logical qubit sits."""

    def __init__(self, device: Device):
        if device.architecture != "conveyor":
            raise ValueError("device is not a conveyor")
        self.device = device
        self.n = device.n
        self.em = Emitter(device)
        #: positions[q] = ring position (1-based) of logical qubit q
        self.positions = list(range(1, self.n + 1))
        self.trace: list[dict] = []

    # -- primitives -------------------------------------------------------

    def _class_gate(self, subgroups, u) -> None:
        for sg in subgroups:
            self.em.gate("B", sg, u)

    def _flip(self, subgroups, undo=False) -> None:
        for sg in subgroups:
            self.em.rotate("B", sg, PI_X_INV if undo else PI_X)

    def _pair_cz(self, mediator: str) -> None:
        """CZ on every pair linked by a mediator of the given subgroup."""
        self._flip(ODD_CLASS + EVEN_CLASS)
        self.em.pulse("A", mediator)
        self._flip(ODD_CLASS + EVEN_CLASS, undo=True)

    def swap_layer(self, which: str) -> None:
        med = LAYER_MEDIATOR[which]
        for target in (EVEN_CLASS, ODD_CLASS, EVEN_CLASS):
            self._class_gate(target, H)
            self._pair_cz(med)
            self._class_gate(target, H)
        move = layer_map(self.n, which)
        self.positions = [move[p] for p in self.positions]

    def rotate_belt(self, turns: int) -> None:
        for _ in range(turns):
            self.swap_layer("T1")
            self.swap_layer("T2")

    def hub_ccz(self) -> None:
        """CCZ on whatever sits at positions 2, 3, 4."""
        self._flip(("regular", "crossed"))
        self.em.pulse("A", "double_crossed")
        self._flip(("regular", "crossed"), undo=True)

    def hub_cz_outer(self) -> None:
        """CZ between positions 2 and 4, independent of position 3."""
        self._flip(("crossed",))
        self.em.pulse("A", "double_crossed")
        self._flip(("crossed",), undo=True)
        self._flip(("regular", "crossed"))
        self.em.pulse("A", "double_crossed")
        self._flip(("regular", "crossed"), undo=True)

    def gate_at_front(self, u) -> None:
        self.em.gate("B", "double_crossed", u)

    # -- routing ----------------------------------------------------------

    def _search(self, goal) -> list[str]:
        """Shortest list of layers after which ``goal(positions)`` holds.

        Layers act as a dihedral group on the ring, so there are at most
        ``2n`` configurations and a plain BFS is cheap.
        """
        moves = {w: layer_map(self.n, w) for w in ("T1", "T2")}
        start = tuple(self.positions)
        seen = {start: []}
        queue = deque([start])
        while queue:
            cur = queue.popleft()
            if goal(cur):
                return seen[cur]
            for w, mv in moves.items():
                nxt = tuple(mv[p] for p in cur)
                if nxt not in seen:
                    seen[nxt] = seen[cur] + [w]
                    queue.append(nxt)
        return None

    def route(self, goal, index: int, label: str) -> None:
        layers = self._search(goal)
        if layers is None:
            raise CompileError(f"cannot route operands of {label} onto the required sites", index)
        for w in layers:
            self.swap_layer(w)
        self.trace.append({"gate": index, "op": label, "layers": layers, "positions": list(self.positions)})

    # -- logical gates ----------------------------------------------------

    def one_qubit(self, q: int, u, index: int, label: str) -> None:
        self.route(lambda pos: pos[q] == GATE_POSITION, index, label)
        self.gate_at_front(u)

    def ccz(self, qs, index: int, label: str) -> None:
        self.route(lambda pos: {pos[q] for q in qs} == set(HUB_POSITIONS), index, label)
        self.hub_ccz()

    def cz(self, a: int, b: int, index: int, label: str) -> None:
        outer = lambda pos: {pos[a], pos[b]} == {2, 4}
        mixed = lambda pos: {pos[a], pos[b]} in ({2, 3}, {3, 4})
        cheap = self._search(outer)
        general = self._search(mixed)
        if cheap is not None and (general is None or len(cheap) <= len(general)):
            self.route(outer, index, label)
            self.hub_cz_outer()
            return
        if general is None:
            raise CompileError(f"cannot route operands of {label} onto the hub", index)
        self.route(mixed, index, label)
        # CZ(a,b) = CCZ(a,b,c) X_c CCZ(a,b,c) X_c with c the remaining hub leg;
        # X_c visits the front and every layer used is undone in reverse
        third = ({2, 3, 4} - {self.positions[a], self.positions[b]}).pop()
        c = self.positions.index(third)
        park = self._search(lambda pos: pos[c] == GATE_POSITION)
        for _ in range(2):
            self.hub_ccz()
            for w in park:
                self.swap_layer(w)
            self.gate_at_front(X)
            for w in reversed(park):
                self.swap_layer(w)

    def lower(self, g: Gate, index: int) -> None:
        label = f"{g.name}#{index}"
        if len(g.qubits) == 1:
            self.one_qubit(g.qubits[0], one_qubit_matrix(g), index, label)
        elif g.name == "CZ":
            self.cz(*g.qubits, index, label)
        elif g.name == "CNOT":
            c, t = g.qubits
            self.one_qubit(t, H, index, label)
            self.cz(c, t, index, label)
            self.one_qubit(t, H, index, label)
        elif g.name == "SWAP":
            a, b = g.qubits
            self.positions[a], self.positions[b] = self.positions[b], self.positions[a]
            self.trace.append({"gate": index, "op": label, "layers": [], "positions": list(self.positions)})
        elif g.name == "CCZ":
            self.ccz(g.qubits, index, label)
        elif g.name == "CCX":
            t = g.qubits[2]
            self.one_qubit(t, H, index, label)
            self.ccz(g.qubits, index, label)
            self.one_qubit(t, H, index, label)
        else:
            raise CompileError(f"no lowering for {g.name}", index)

    def go_home(self, index: int) -> bool:
        """Bring every qubit back to its starting site if the layers can; report success."""
        home = tuple(range(1, self.n + 1))
        if self._search(lambda pos: tuple(pos) == home) is None:
            return False
        self.route(lambda pos: tuple(pos) == home, index, "home")
        return True


# -- functional front ends --------------------------------------------------


@dataclass
class PositionTracker:
    """Logical qubit -> ring position (1-based).

    ``parity`` records the class a qubit started in: odd-class qubits travel
    one way round the ring and even-class qubits the other.
    """

    positions: list[int]
    parity: list[int] = field(default_factory=list)

    def __post_init__(self):
        if sorted(self.positions) != list(range(1, len(self.positions) + 1)):
            raise ValueError("positions must be a permutation of 1..n")
        if not self.parity:
            self.parity = [p % 2 for p in self.positions]

    @classmethod
    def identity(cls, n: int) -> "PositionTracker":
        return cls(list(range(1, n + 1)))


def swap_layer(d: Device, which: str) -> list[ScheduleStep]:
    be = ConveyorBackend(d)
    be.swap_layer(which)
    return be.em.take()


def rotate_belt(d: Device, tracker: PositionTracker, turns: int) -> tuple[list[ScheduleStep], PositionTracker]:
    be = ConveyorBackend(d)
    be.positions = list(tracker.positions)
    be.rotate_belt(turns)
    return be.em.take(), PositionTracker(list(be.positions), list(tracker.parity))


def synth_1q(d: Device, u, tracker: PositionTracker, q: int) -> tuple[list[ScheduleStep], complex]:
    """Steps applying logical ``u`` to qubit ``q``, which must sit at the gate site; also the phase ledger."""
    if tracker.positions[q] != GATE_POSITION:
        raise CompileError(f"qubit {q + 1} is at position {tracker.positions[q]}, not at the gate site")
    be = ConveyorBackend(d)
    be.gate_at_front(u)
    return be.em.take(), be.em.phase


def synth_ccz_hub(d: Device) -> list[ScheduleStep]:
    if d.layout.get("hub") is None:
        raise CompileError("device has no hub")
    be = ConveyorBackend(d)
    be.hub_ccz()
    return be.em.take()
