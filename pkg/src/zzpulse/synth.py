"""Global bang-bang pulse synthesis for geometrically scaled Rabi couplings.

Subgroup ``j`` (1-based) of a species sees ``2**(j-1)`` times the base Rabi
frequency, so one global pulse ``(theta, phi)`` rotates subgroup ``j`` by
``2**(j-1) * theta`` about ``(cos phi, sin phi, 0)``.  :func:`synth_targets`
returns a pulse list whose per-subgroup product equals an arbitrary list of
target rotations *exactly*, so the residual global phase is always ``+1``.

Construction, for ``N`` subgroups:

* ``N == 1``: the X-Y-X Euler split of the target.
* ``N > 1``: solve subgroups ``2..N`` as an ``(N-1)``-subgroup problem, then
  lift every pulse through :func:`suppress_first` (identity on subgroup 1,
  the same pulse on the rest).  Subgroup 1 is then fixed with one
  :func:`rotate_first` block per Euler factor of its target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .rotor import Rotation, TransverseAxis, euler_transverse, matrix_distance

MAX_SUBGROUPS = 8
#: ``len(synth_targets(T)) <= LENGTH_CONSTANT * 4**(N-1)``
LENGTH_CONSTANT = 8


@dataclass(frozen=True)
class GlobalPulse:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("pulse parameters must be finite")

    @property
    def axis(self) -> TransverseAxis:
        return TransverseAxis(self.phi)

    def normalized(self) -> "GlobalPulse":
        """Same rotation with ``theta >= 0`` (a negative angle flips the phase by pi)."""
        if self.theta >= 0:
            return self
        return GlobalPulse(-self.theta, math.remainder(self.phi + math.pi, 2 * math.pi))

    def inverse(self) -> "GlobalPulse":
        return GlobalPulse(-self.theta, self.phi)


def pulse_to_rotations(p: GlobalPulse, n: int) -> list[Rotation]:
    if n < 1:
        raise ValueError("need at least one subgroup")
    axis = p.axis.vector
    return [Rotation(2 ** (j - 1) * p.theta, axis) for j in range(1, n + 1)]


def suppress_first(theta: float, a: TransverseAxis, n: int) -> list[GlobalPulse]:
    """Four pulses acting as identity on subgroup 1 and ``R(2**(j-2) theta, a)`` on ``j >= 2``.

    On subgroup 1 the two half turns about the orthogonal axis ``b`` flip the
    second quarter-angle pulse, so it cancels the first; on subgroup 2 the
    half turns become ``-I`` twice and on ``j >= 3`` they are ``+I``.
    """
    if n < 2:
        raise ValueError("suppress_first needs at least two subgroups")
    b = a.orthogonal()
    q = 0.25 * theta
    return [
        GlobalPulse(q, a.phi),
        GlobalPulse(math.pi, b.phi),
        GlobalPulse(q, a.phi),
        GlobalPulse(math.pi, b.phi + math.pi),
    ]


def rotate_first(theta: float, a: TransverseAxis, n: int) -> list[GlobalPulse]:
    """Five pulses giving ``R(theta, a)`` on subgroup 1 and identity elsewhere."""
    # All factors share the axis a on subgroups >= 2, so the order is free.
    return suppress_first(-2.0 * theta, a, n) + [GlobalPulse(theta, a.phi)]


def _check_targets(targets: Sequence[Rotation]) -> None:
    if not 1 <= len(targets) <= MAX_SUBGROUPS:
        raise ValueError(f"number of subgroups must lie in [1, {MAX_SUBGROUPS}], got {len(targets)}")


def synth_targets(targets: Sequence[Rotation]) -> list[GlobalPulse]:
    """Pulse list realising ``targets[j]`` on subgroup ``j+1`` for every ``j``."""
    targets = list(targets)
    _check_targets(targets)
    return _synth(targets)


def _synth(targets: list[Rotation]) -> list[GlobalPulse]:
    n = len(targets)
    first = euler_transverse(targets[0])
    if n == 1:
        return [GlobalPulse(angle, ax.phi) for angle, ax in first]
    pulses: list[GlobalPulse] = []
    for p in _synth(targets[1:]):
        pulses.extend(suppress_first(p.theta, p.axis, n))
    for angle, ax in first:
        pulses.extend(rotate_first(angle, ax, n))
    return pulses


def length_bound(n: int) -> int:
    return LENGTH_CONSTANT * 4 ** (n - 1)


def sequence_products(pulses: Sequence[GlobalPulse], n: int) -> list[Rotation]:
    """Per-subgroup product of a pulse list (first pulse acts first)."""
    q = np.zeros((n, 4))
    q[:, 0] = 1.0
    scale = 2.0 ** np.arange(n)
    for p in pulses:
        half = 0.5 * p.theta * scale
        c, s = np.cos(half), np.sin(half)
        ax, ay = math.cos(p.phi), math.sin(p.phi)
        # left-multiply by (c, s*ax, s*ay, 0)
        w, x, y, z = q[:, 0].copy(), q[:, 1].copy(), q[:, 2].copy(), q[:, 3].copy()
        q[:, 0] = c * w - s * (ax * x + ay * y)
        q[:, 1] = c * x + s * ax * w + s * ay * z
        q[:, 2] = c * y + s * ay * w - s * ax * z
        q[:, 3] = c * z + s * (ax * y - ay * x)
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    return [Rotation.from_quaternion(row) for row in q]


def verify_sequence(
    pulses: Sequence[GlobalPulse], targets: Sequence[Rotation], up_to_phase: bool = True
) -> float:
    """Largest per-subgroup distance between the realised product and its target.

    Distances are normalised Frobenius (``||A - B||_F / sqrt(2)``), minimised
    over a global phase per subgroup unless ``up_to_phase`` is false.
    """
    targets = list(targets)
    products = sequence_products(pulses, len(targets))
    return max(
        matrix_distance(t.matrix(), p.matrix(), up_to_phase=up_to_phase)
        for t, p in zip(targets, products)
    )


def residual_phases(pulses: Sequence[GlobalPulse], targets: Sequence[Rotation]) -> list[complex]:
    """Per-subgroup phase ``c_j`` with ``product_j ~= c_j * target_j``."""
    targets = list(targets)
    products = sequence_products(pulses, len(targets))
    out = []
    for t, p in zip(targets, products):
        ov = np.vdot(t.matrix(), p.matrix()) / 2.0
        out.append(complex(ov / abs(ov)) if abs(ov) > 1e-12 else 1.0 + 0j)
    return out
