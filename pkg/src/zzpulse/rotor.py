"""Exact SU(2) axis-angle algebra.

Matrices are written in the (|e>, |g>) basis, so ``|e> = (1, 0)`` and
``|g> = (0, 1)``.  A drive with phase ``phi`` rotates about the transverse
axis ``(cos phi, sin phi, 0)``.

Rotations are stored unreduced: ``R(2*pi, n) = -I`` and the period is ``4*pi``.
Composition goes through unit quaternions ``(cos(t/2), sin(t/2) * n)``, which
is the SU(2) element ``w*I - i*(v . sigma)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

X_AXIS = (1.0, 0.0, 0.0)
Y_AXIS = (0.0, 1.0, 0.0)
Z_AXIS = (0.0, 0.0, 1.0)

_AXIS_TOL = 1e-12


def _unit(v) -> tuple[float, float, float]:
    a = np.asarray(v, dtype=float).reshape(3)
    norm = float(np.linalg.norm(a))
    if not np.isfinite(norm) or norm == 0.0:
        raise ValueError(f"axis must be a finite non-zero 3-vector, got {v!r}")
    a = a / norm
    return (float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class Rotation:
    """``exp(-i theta/2 n.sigma)``; ``axis`` is normalised on construction."""

    theta: float
    axis: tuple[float, float, float] = X_AXIS

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "axis", _unit(self.axis))

    @classmethod
    def identity(cls) -> "Rotation":
        return cls(0.0, Z_AXIS)

    @classmethod
    def from_quaternion(cls, q) -> "Rotation":
        w, x, y, z = (float(c) for c in q)
        norm = math.sqrt(w * w + x * x + y * y + z * z)
        w, x, y, z = w / norm, x / norm, y / norm, z / norm
        s = math.sqrt(x * x + y * y + z * z)
        if s < 1e-300:
            # +I or -I; keep the sign through theta
            return cls(0.0 if w > 0 else 2 * math.pi, Z_AXIS)
        return cls(2.0 * math.atan2(s, w), (x / s, y / s, z / s))

    @classmethod
    def from_matrix(cls, u: np.ndarray) -> "Rotation":
        """Inverse of :meth:`matrix` for an SU(2) input (determinant 1)."""
        u = np.asarray(u, dtype=complex)
        w = 0.5 * (u[0, 0] + u[1, 1]).real
        x = -0.5 * (u[0, 1] + u[1, 0]).imag
        y = 0.5 * (u[1, 0] - u[0, 1]).real
        z = -0.5 * (u[0, 0] - u[1, 1]).imag
        return cls.from_quaternion((w, x, y, z))

    @property
    def quaternion(self) -> np.ndarray:
        h = 0.5 * self.theta
        k = self.theta / math.pi
        if k == round(k) and abs(k) < 2**52:
            # whole multiples of pi: use the exact cos/sin table so that
            # R(2 pi) is exactly -I and R(pi) has no round-off leakage
            c, s = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[int(round(k)) % 4]
            return np.array([c, s * self.axis[0], s * self.axis[1], s * self.axis[2]])
        s = math.sin(h)
        return np.array([math.cos(h), s * self.axis[0], s * self.axis[1], s * self.axis[2]])

    def matrix(self) -> np.ndarray:
        w, x, y, z = self.quaternion
        return np.array(
            [[w - 1j * z, -1j * x - y], [-1j * x + y, w + 1j * z]],
            dtype=complex,
        )

    def __matmul__(self, other: "Rotation") -> "Rotation":
        return compose(self, other)

    def distance(self, other: "Rotation", up_to_phase: bool = False) -> float:
        return matrix_distance(self.matrix(), other.matrix(), up_to_phase=up_to_phase)


@dataclass(frozen=True)
class TransverseAxis:
    phi: float

    @property
    def vector(self) -> tuple[float, float, float]:
        return (math.cos(self.phi), math.sin(self.phi), 0.0)

    def orthogonal(self) -> "TransverseAxis":
        return TransverseAxis(self.phi + 0.5 * math.pi)


def _qmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # SU(2) product a*b in the (w, v) representation: the vector part picks
    # up v_a x v_b because (-i a.sigma)(-i b.sigma) = -(a.b) - i (a x b).sigma
    wa, va = a[0], a[1:]
    wb, vb = b[0], b[1:]
    w = wa * wb - float(np.dot(va, vb))
    v = wa * vb + wb * va + np.cross(va, vb)
    return np.concatenate(([w], v))


def compose(r2: Rotation, r1: Rotation) -> Rotation:
    """Rotation whose matrix is ``r2.matrix() @ r1.matrix()`` (r1 acts first)."""
    q = _qmul(r2.quaternion, r1.quaternion)
    out = Rotation.from_quaternion(q)
    if out.theta == 0.0 and abs(r1.theta) > 0.0:
        # keep a meaningful axis when the product is exactly the identity
        return Rotation(0.0, r1.axis)
    return out


def compose_all(rotations) -> Rotation:
    """Product of an apply-first-first sequence of rotations."""
    q = np.array([1.0, 0.0, 0.0, 0.0])
    for r in rotations:
        q = _qmul(r.quaternion, q)
        q /= np.linalg.norm(q)
    return Rotation.from_quaternion(q)


def inverse(r: Rotation) -> Rotation:
    return Rotation(-r.theta, r.axis)


def conjugate_axis(phi: float, n, m) -> tuple[float, float, float]:
    """SO(3) image of ``m`` under a rotation by ``phi`` about ``n`` (Rodrigues)."""
    n = np.array(_unit(n))
    m = np.array(_unit(m))
    c, s = math.cos(phi), math.sin(phi)
    out = m * c + np.cross(n, m) * s + n * float(np.dot(n, m)) * (1.0 - c)
    return _unit(out)


def euler_transverse(r: Rotation, atol: float = 1e-14) -> list[tuple[float, TransverseAxis]]:
    """Split ``r`` into at most three rotations about axes in the xy-plane.

    Returns ``[(angle, axis), ...]`` in application order.  The product is
    exactly ``r`` (no residual phase); an X-Y-X Euler form is used, with the
    Y factor absorbed when it is trivial or a half turn.
    """
    w, x, y, z = r.quaternion
    if abs(x) < atol and abs(y) < atol and abs(z) < atol and w > 0:
        return []
    nx, ny, nz = r.axis
    if abs(nz) < _AXIS_TOL:
        return [(r.theta, TransverseAxis(math.atan2(ny, nx)))]

    # Relabel (x, y, z) -> (z', x', y') so the X-Y-X form becomes Z'-X'-Z',
    # whose quaternion is (cb*cos(s), sb*cos(d), sb*sin(d), cb*sin(s)) with
    # s = (a + c)/2, d = (a - c)/2 and cb, sb = cos(b/2), sin(b/2).
    wp, zp, xp, yp = w, x, y, z
    half_b = math.atan2(math.hypot(xp, yp), math.hypot(wp, zp))
    s = math.atan2(zp, wp) if math.hypot(wp, zp) > atol else 0.0
    d = math.atan2(yp, xp) if math.hypot(xp, yp) > atol else 0.0
    a, c, b = s + d, s - d, 2.0 * half_b

    x_axis, y_axis = TransverseAxis(0.0), TransverseAxis(0.5 * math.pi)
    if math.hypot(xp, yp) <= atol:
        return [(a + c, x_axis)]
    if math.hypot(wp, zp) <= atol:
        # Ry(pi) Rx(c) = Rx(-c) Ry(pi): only two factors needed
        return [(b, y_axis), (a - c, x_axis)] if abs(a - c) > atol else [(b, y_axis)]
    out = []
    if abs(c) > atol:
        out.append((c, x_axis))
    out.append((b, y_axis))
    if abs(a) > atol:
        out.append((a, x_axis))
    return out


def matrix_distance(a: np.ndarray, b: np.ndarray, up_to_phase: bool = False) -> float:
    """Normalised Frobenius distance ``||a - b||_F / sqrt(2)``.

    With ``up_to_phase`` the distance is minimised over a global phase on
    ``b``; for 2x2 unitaries this is ``sqrt(2 - |tr(a^dag b)|)``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if up_to_phase:
        # the optimal phase aligns b with a; subtracting directly avoids the
        # cancellation in sqrt(2 - |tr|)
        ov = np.vdot(b, a)
        if abs(ov) > 0:
            b = b * (ov / abs(ov))
    return float(np.linalg.norm(a - b) / math.sqrt(2.0))
