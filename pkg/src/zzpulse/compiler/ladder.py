"""Ladder back end: gates at the information-carrying column and the shift search.

The register sits on one B column ``b`` (the ICC).  B sites to its left are
excited, everything to its right is ground, and every A site is ground.
Row ``r`` owns one special B site at column ``b = r``; a single-qubit gate on
row ``r`` therefore needs the ICC at ``b = r``, and a CZ between rows
``r, r+1`` needs it at the connector column ``b = r``.
"""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..blockade import ScheduleStep, apply_subgroup_rotations, basis_index
from ..device import Device, ladder_icc_sites, ladder_site, ladder_special_subgroup
from ..errors import UnsupportedOperation
from ..rotor import Rotation
from .circuit import Circuit, Gate, one_qubit_matrix
from .schedule import PI_X, PI_X_INV, Emitter, Schedule

B_SUBGROUPS = ("regular", "crossed", "double_crossed")


def background_sites(d: Device, b: int) -> list[int]:
    """Excited B sites left of column ``b``."""
    return [ladder_site(d, r, 2 * bb) for r in range(1, d.layout["rows"] + 1) for bb in range(b)]


def ladder_placement(d: Device, b: int):
    from . import Placement

    return Placement(ladder_icc_sites(d, b), background_sites(d, b))


def required_column(g: Gate, index: int) -> int:
    """ICC column a gate needs (rows are 1-based, so row ``q+1``)."""
    if len(g.qubits) == 1:
        return g.qubits[0] + 1
    if g.name == "CZ":
        a, b = sorted(g.qubits)
        if b != a + 1:
            raise UnsupportedOperation(f"CZ on ladder rows {a + 1} and {b + 1}: only adjacent rows are coupled", index)
        return a + 1
    raise UnsupportedOperation(
        f"{g.name} needs the register at more than one column, which requires an interface shift", index
    )


class LadderBackend:
    def __init__(self, device: Device, column: int):
        if device.architecture != "ladder":
            raise ValueError("device is not a ladder")
        n = device.layout["rows"]
        if not 1 <= column <= n:
            raise ValueError(f"ICC column must be in 1..{n}, got {column}")
        self.device = device
        self.column = column
        self.em = Emitter(device)

    def one_qubit(self, row: int, u, index: int) -> None:
        sg = ladder_special_subgroup(row)
        if len(self.device.sites_in("B", sg)) != 1:
            # other rows share this subgroup and sit unblocked in the background
            raise UnsupportedOperation(f"row {row} shares its gate subgroup with another row", index)
        self.em.gate("B", sg, u)

    def cz(self, row: int) -> None:
        """CZ between rows ``row`` and ``row+1`` through their connector."""
        for sg in B_SUBGROUPS:
            self.em.rotate("B", sg, PI_X)
        self.em.pulse("A", "crossed")
        for sg in B_SUBGROUPS:
            self.em.rotate("B", sg, PI_X_INV)
        # connectors left of the ICC see two flipped Neel sites and fire too
        self.em.phase *= (-1) ** (row - 1)

    def lower(self, g: Gate, index: int) -> None:
        if required_column(g, index) != self.column:
            raise UnsupportedOperation(f"{g.name} needs the register at column {required_column(g, index)}", index)
        if len(g.qubits) == 1:
            self.one_qubit(g.qubits[0] + 1, one_qubit_matrix(g), index)
        else:
            self.cz(min(g.qubits) + 1)


def compile_ladder(circuit: Circuit, d: Device, icc_column: int | None = None, **_):
    cols = {required_column(g, k) for k, g in enumerate(circuit.gates)}
    if icc_column is None:
        if len(cols) > 1:
            first = next(k for k, g in enumerate(circuit.gates) if required_column(g, k) != required_column(circuit.gates[0], 0))
            raise UnsupportedOperation("circuit needs more than one ICC column; interface shifts are not available", first)
        icc_column = cols.pop() if cols else d.layout["icc_column"]
    be = LadderBackend(d, icc_column)
    for k, g in enumerate(circuit.gates):
        be.lower(g, k)
    sched = Schedule(be.em.take(), be.em.phase, [{"icc_column": icc_column}], final_positions=list(range(1, d.n + 1)))
    place = ladder_placement(d, icc_column)
    return sched, place, place


# -- interface shift search ----------------------------------------------------

SHIFT_SUBGROUPS = (("A", "regular"), ("A", "crossed"), ("B", "regular"), ("B", "crossed"), ("B", "double_crossed"))
SHIFT_ANGLES = (math.pi / 2, math.pi, 2 * math.pi)
KEY_DIGITS = 8


@dataclass(frozen=True)
class ShiftMove:
    species: str
    subgroup: str
    theta: float

    def rotation(self) -> Rotation:
        return Rotation(self.theta, (1.0, 0.0, 0.0))

    def to_dict(self) -> dict:
        return {"species": self.species, "subgroup": self.subgroup, "theta": self.theta}


@dataclass
class ShiftResult:
    found: bool
    moves: list[ShiftMove] = field(default_factory=list)
    certificate: dict = field(default_factory=dict)


def _shift_probes(d: Device, b: int) -> list[int]:
    """Basis indices of the 2**n register states with the ICC at column ``b``."""
    n = d.layout["rows"]
    out = []
    for x in range(1 << n):
        bits = format(x, f"0{n}b")
        excited = background_sites(d, b) + [ladder_site(d, r, 2 * b) for r in range(1, n + 1) if bits[r - 1] == "1"]
        out.append(basis_index(d.num_sites, excited))
    return out


class _SparseEngine:
    """Blockade rotations on sparse states (dict index -> amplitude)."""

    def __init__(self, d: Device):
        self.nb = [sum(1 << k for k in d.neighbors(i)) for i in range(d.num_sites)]
        self.members = {sg: [s.id for s in d.sites if (s.species, s.subgroup) == sg] for sg in SHIFT_SUBGROUPS}

    def apply(self, state: dict, sg, theta: float) -> dict:
        c, s = math.cos(theta / 2), -1j * math.sin(theta / 2)
        for i in self.members[sg]:
            bit, nm = 1 << i, self.nb[i]
            new: dict = {}
            for idx, a in state.items():
                if idx & nm != nm:
                    new[idx] = new.get(idx, 0) + a
                    continue
                new[idx] = new.get(idx, 0) + c * a
                new[idx ^ bit] = new.get(idx ^ bit, 0) + s * a
            state = {k: v for k, v in new.items() if abs(v) > 1e-12}
        return state


def _round(z: complex) -> tuple[float, float]:
    return (round(z.real, KEY_DIGITS) + 0.0, round(z.imag, KEY_DIGITS) + 0.0)


def _key(states: list[dict]) -> tuple:
    """Per-probe phase-normalised states plus the cross ratio of the removed phases.

    Two nodes with equal keys differ by per-qubit phase frames only, so they
    meet the shift contract together or not at all.
    """
    phases, parts = [], []
    for st in states:
        k0 = min(st)
        ph = st[k0] / abs(st[k0])
        phases.append(ph)
        parts.append(tuple((k, *_round(v / ph)) for k, v in sorted(st.items())))
    # phases factor into per-qubit frames iff every one of these ratios is 1
    n = len(phases).bit_length() - 1
    ratios = []
    for x in range(len(phases)):
        singles = [1 << q for q in range(n) if x >> q & 1]
        if len(singles) > 1:
            r = phases[x] * phases[0] ** (len(singles) - 1)
            for y in singles:
                r /= phases[y]
            ratios.append(_round(r))
    return (tuple(parts), tuple(ratios))


def _explore(engine: _SparseEngine, start: list[dict], depth: int, inverse: bool) -> dict:
    """All distinct keys reachable within ``depth`` moves, with a shortest move list."""
    moves = [(i, th) for i in range(len(SHIFT_SUBGROUPS)) for th in SHIFT_ANGLES]
    seen = {_key(start): []}
    frontier = [(start, [], None)]
    for _ in range(depth):
        nxt = []
        for states, path, last in frontier:
            for i, th in moves:
                # moves on one species commute, so keep them in subgroup order
                if last is not None and SHIFT_SUBGROUPS[last][0] == SHIFT_SUBGROUPS[i][0] and i < last:
                    continue
                sg = SHIFT_SUBGROUPS[i]
                new = [engine.apply(s, sg, -th if inverse else th) for s in states]
                k = _key(new)
                if k in seen:
                    continue
                seen[k] = path + [(i, th)]
                nxt.append((new, seen[k], i))
        frontier = nxt
    return seen


def _digest(keys) -> str:
    h = hashlib.sha256()
    for k in sorted(repr(k) for k in keys):
        h.update(k.encode())
    return h.hexdigest()


def meet_in_middle(d: Device, starts: list[dict], goals: list[dict], max_depth: int = 8):
    """Shortest move list taking ``starts`` to ``goals`` up to per-qubit phase frames.

    Every distinct node within ``ceil(max_depth/2)`` moves of the starts is
    matched against every node within ``floor(max_depth/2)`` inverse moves of
    the goals, so a miss covers every sequence of up to ``max_depth`` moves.
    Returns ``(moves or None, forward_nodes, backward_nodes)``.
    """
    engine = _SparseEngine(d)
    fwd = _explore(engine, starts, (max_depth + 1) // 2, inverse=False)
    bwd = _explore(engine, goals, max_depth // 2, inverse=True)
    best = None
    for k, path in fwd.items():
        back = bwd.get(k)
        if back is None:
            continue
        cand = path + list(reversed(back))
        if best is None or len(cand) < len(best):
            best = cand
    moves = None if best is None else [ShiftMove(*SHIFT_SUBGROUPS[i], th) for i, th in best]
    return moves, fwd, bwd


def search_shift(d: Device, src: int = 1, dst: int = 2, max_depth: int = 8) -> ShiftResult:
    """Look for a subgroup-pulse sequence moving the register from column ``src`` to ``dst``."""
    t0 = time.perf_counter()
    starts = [{i: 1.0 + 0j} for i in _shift_probes(d, src)]
    goals = [{i: 1.0 + 0j} for i in _shift_probes(d, dst)]
    moves, fwd, bwd = meet_in_middle(d, starts, goals, max_depth)
    cert = {
        "source_column": src,
        "target_column": dst,
        "max_depth": max_depth,
        "angles": list(SHIFT_ANGLES),
        "subgroups": [list(s) for s in SHIFT_SUBGROUPS],
        "forward_nodes": len(fwd),
        "backward_nodes": len(bwd),
        "forward_digest": _digest(fwd),
        "backward_digest": _digest(bwd),
        "seconds": time.perf_counter() - t0,
    }
    return ShiftResult(moves is not None, moves or [], cert)


def apply_moves(psi: np.ndarray, d: Device, moves) -> np.ndarray:
    for mv in moves:
        rots = [Rotation.identity()] * d.subgroup_count(mv.species)
        rots[B_SUBGROUPS.index(mv.subgroup)] = mv.rotation()
        psi = apply_subgroup_rotations(psi, d, mv.species, rots)
    return psi


def check_shift_contract(d: Device, moves, src: int = 1, dst: int = 2, atol: float = 1e-9) -> bool:
    """Does ``moves`` carry every register state from ``src`` to ``dst`` up to per-qubit phases?

    Uses the dense blockade engine, independent of the sparse search.
    """
    n = d.layout["rows"]
    srcs, dsts = _shift_probes(d, src), _shift_probes(d, dst)
    lam = []
    for i, j in zip(srcs, dsts):
        psi = np.zeros(1 << d.num_sites, dtype=complex)
        psi[i] = 1.0
        out = apply_moves(psi, d, moves)
        if abs(abs(out[j]) - 1.0) > atol:
            return False
        lam.append(out[j])
    # a product of per-qubit phases: log(lam) is affine in the bits
    lam = np.array(lam)
    for x in range(1 << n):
        pred = lam[0]
        for q in range(n):
            bit = 1 << (n - 1 - q)
            if x & bit:
                pred *= lam[bit] / lam[0]
        if abs(lam[x] - pred) > atol:
            return False
    return True


def shift_interface(d: Device, direction: int) -> list[ScheduleStep]:
    """Steps moving the register one column right (``+1``) or left (``-1``).

    No verified move sequence exists within the searched depth (see
    :func:`search_shift`), so this always reports the operation as
    unsupported rather than emit an unverified sequence.
    """
    if d.architecture != "ladder":
        raise ValueError("device is not a ladder")
    if direction not in (1, -1):
        raise ValueError(f"direction must be +1 or -1, got {direction!r}")
    raise UnsupportedOperation(
        "no verified interface-shift sequence is available (depth-8 search exhausted); "
        "ladder circuits must keep every gate at one register column"
    )
