"""Logical circuits: the ``gqc`` text format and a reference statevector simulator.

Format::

    qubits 3
    H q1            # comment
    RX 0.5 q2
    R 1.0 0 0 1 q1
    CNOT q1 q2
    CCX q1 q2 q3

Qubits are 1-based in text and 0-based in :class:`Gate`.  In reference
states qubit 1 is the most significant bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ParseError, ResourceLimitError

ONE_QUBIT = {"H", "RX", "RY", "RZ", "R", "X"}
ARITY = {"H": 1, "X": 1, "RX": 1, "RY": 1, "RZ": 1, "R": 1, "CZ": 2, "CNOT": 2, "SWAP": 2, "CCX": 3, "CCZ": 3}
N_PARAMS = {"RX": 1, "RY": 1, "RZ": 1, "R": 4}
MAX_REFERENCE_QUBITS = 12


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __str__(self):
        args = [f"{p:.17g}" for p in self.params] + [f"q{q + 1}" for q in self.qubits]
        return " ".join([self.name, *args])


@dataclass
class Circuit:
    n: int
    gates: list[Gate] = field(default_factory=list)

    def append(self, name: str, *qubits: int, params=()) -> "Circuit":
        self.gates.append(Gate(name, tuple(qubits), tuple(float(p) for p in params)))
        return self

    def to_text(self) -> str:
        return "\n".join([f"qubits {self.n}", *map(str, self.gates)]) + "\n"


def _number(tok: str, line: int) -> float:
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"malformed number {tok!r}", line) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite number {tok!r}", line)
    return v


def _qubit(tok: str, n: int, line: int) -> int:
    if not (tok.startswith("q") and tok[1:].isdigit()):
        raise ParseError(f"expected a qubit like q1, got {tok!r}", line)
    q = int(tok[1:])
    if not 1 <= q <= n:
        raise ParseError(f"qubit {tok} out of range 1..{n}", line)
    return q - 1


def parse_circuit(text: str) -> Circuit:
    circuit = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if circuit is None:
            if toks[0] != "qubits" or len(toks) != 2 or not toks[1].isdigit() or int(toks[1]) < 1:
                raise ParseError("first statement must be 'qubits <n>'", lineno)
            circuit = Circuit(int(toks[1]))
            continue
        name = toks[0].upper()
        if name not in ARITY or name == "CCZ":
            raise ParseError(f"unknown gate {toks[0]!r}", lineno)
        k, arity = N_PARAMS.get(name, 0), ARITY[name]
        if len(toks) != 1 + k + arity:
            raise ParseError(f"{name} takes {k} number(s) and {arity} qubit(s)", lineno)
        params = tuple(_number(t, lineno) for t in toks[1 : 1 + k])
        qubits = tuple(_qubit(t, circuit.n, lineno) for t in toks[1 + k :])
        if len(set(qubits)) != len(qubits):
            raise ParseError(f"{name} operands must be distinct", lineno)
        if name == "R" and math.hypot(*params[1:]) == 0:
            raise ParseError("rotation axis must be non-zero", lineno)
        circuit.gates.append(Gate(name, qubits, params))
    if circuit is None:
        raise ParseError("empty circuit (missing 'qubits <n>')", 1)
    return circuit


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def one_qubit_matrix(g: Gate) -> np.ndarray:
    """Logical 2x2 matrix in the (|0>, |1>) basis."""
    if g.name == "H":
        return _H.copy()
    if g.name == "X":
        return _X.copy()
    if g.name == "R":
        theta, *n = g.params
        n = np.asarray(n) / np.linalg.norm(n)
        gen = n[0] * _X + n[1] * _Y + n[2] * _Z
    else:
        theta = g.params[0]
        gen = {"RX": _X, "RY": _Y, "RZ": _Z}[g.name]
    return math.cos(theta / 2) * np.eye(2) - 1j * math.sin(theta / 2) * gen


def _apply_1q(psi: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    t = psi.reshape((2,) * n)
    t = np.moveaxis(np.tensordot(u, t, axes=([1], [q])), 0, q)
    return t.reshape(-1)


def _phase_where(psi: np.ndarray, n: int, qubits, values) -> np.ndarray:
    t = psi.reshape((2,) * n).copy()
    idx = [slice(None)] * n
    for q, v in zip(qubits, values):
        idx[q] = v
    t[tuple(idx)] *= -1
    return t.reshape(-1)


def apply_gate(psi: np.ndarray, g: Gate, n: int) -> np.ndarray:
    if g.name in ONE_QUBIT:
        return _apply_1q(psi, one_qubit_matrix(g), g.qubits[0], n)
    if g.name == "CZ":
        return _phase_where(psi, n, g.qubits, (1, 1))
    if g.name == "CCZ":
        return _phase_where(psi, n, g.qubits, (1, 1, 1))
    if g.name in ("CNOT", "CCX"):
        *controls, target = g.qubits
        t = psi.reshape((2,) * n).copy()
        idx = [slice(None)] * n
        for c in controls:
            idx[c] = 1
        sel = tuple(idx)
        t[sel] = np.flip(t[sel], axis=target - sum(1 for c in controls if c < target))
        return t.reshape(-1)
    if g.name == "SWAP":
        a, b = g.qubits
        t = psi.reshape((2,) * n)
        return np.swapaxes(t, a, b).reshape(-1).copy()
    raise ValueError(f"unknown gate {g.name}")


def reference_simulate(circuit: Circuit, initial: str | None = None) -> np.ndarray:
    """Dense logical statevector after ``circuit``, starting from ``|0...0>`` or ``initial``."""
    n = circuit.n
    if n > MAX_REFERENCE_QUBITS:
        raise ResourceLimitError(f"reference simulation is limited to {MAX_REFERENCE_QUBITS} qubits")
    psi = np.zeros(1 << n, dtype=complex)
    psi[int(initial, 2) if initial else 0] = 1.0
    for g in circuit.gates:
        psi = apply_gate(psi, g, n)
    return psi
