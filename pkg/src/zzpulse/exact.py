"""Exact rotating-frame dynamics for piecewise-constant global drives.

With ``hbar = 1`` the Hamiltonian during a segment driving species ``chi`` is

    H = sum_{i in chi} (Omega_i / 2) (e^{i phi} |g><e| + h.c.)_i
        + sum_{<i,j>} 2 zeta |e_i e_j><e_i e_j|

with ``Omega_i = 2**(j-1) * Omega`` for a site in subgroup ``j``.  Each segment
is propagated by an exact sparse matrix exponential.  Units: ``zeta`` sets
the time scale, and ``eta = zeta / Omega`` selects the drive strength.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .blockade import ScheduleStep, apply_schedule, fidelity
from .device import Device
from .errors import ResourceLimitError, ZZPulseError

MAX_EXACT_SITES = 12
#: below this the exponential's round-off dominates and a tolerance cannot be honoured
TOL_FLOOR = 1e-13


@dataclass(frozen=True)
class DriveSegment:
    species: str
    duration: float
    omega: float
    phi: float = 0.0

    def __post_init__(self):
        if self.duration < 0:
            raise ValueError("segment duration must be non-negative")


class ToleranceError(ZZPulseError):
    pass


def _check_exact_size(d: Device) -> None:
    if d.num_sites > MAX_EXACT_SITES:
        raise ResourceLimitError(f"exact simulation is limited to {MAX_EXACT_SITES} sites, device has {d.num_sites}")


def interaction_diagonal(d: Device) -> np.ndarray:
    """Diagonal of the ZZ part: ``2 zeta`` per edge whose two ends are excited."""
    m = d.num_sites
    idx = np.arange(1 << m)
    diag = np.zeros(1 << m)
    for i, j in d.edges:
        both_e = (((idx >> i) & 1) == 0) & (((idx >> j) & 1) == 0)
        diag += 2.0 * d.zeta * both_e
    return diag


def rf_hamiltonian(d: Device, seg: DriveSegment) -> sp.csr_matrix:
    m = d.num_sites
    dim = 1 << m
    idx = np.arange(dim)
    rows, cols, vals = [], [], []
    for s in d.sites:
        if s.species != seg.species or seg.omega == 0:
            continue
        amp = 0.5 * seg.omega * s.multiplier
        src = idx[((idx >> s.id) & 1) == 0]  # site in |e>
        dst = src | (1 << s.id)  # same state with the site in |g>
        # <g|H|e> = amp e^{i phi}, <e|H|g> its conjugate
        rows += [dst, src]
        cols += [src, dst]
        vals += [np.full(src.size, amp * np.exp(1j * seg.phi)), np.full(src.size, amp * np.exp(-1j * seg.phi))]
    diag = interaction_diagonal(d)
    rows.append(idx)
    cols.append(idx)
    vals.append(diag.astype(complex))
    h = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    )
    return h


def evolve_exact(psi: np.ndarray, d: Device, segs: Sequence[DriveSegment], tol: float = 1e-9) -> np.ndarray:
    _check_exact_size(d)
    if tol < TOL_FLOOR:
        raise ToleranceError(f"tolerance {tol:g} is below the attainable floor {TOL_FLOOR:g}")
    out = np.array(psi, dtype=complex, copy=True)
    norm0 = np.linalg.norm(out)
    for seg in segs:
        if seg.duration == 0:
            continue
        h = rf_hamiltonian(d, seg)
        out = expm_multiply(-1j * seg.duration * h, out)
    if abs(np.linalg.norm(out) - norm0) > 10 * tol:
        raise ToleranceError("norm drift exceeds 10*tol")
    return out


def step_to_segment(step: ScheduleStep, omega: float) -> DriveSegment:
    """Equal-area segment: ``omega * T = |theta|``; negative angles flip the phase."""
    p = step.pulse.normalized()
    return DriveSegment(step.species, p.theta / omega, omega, p.phi)


def blockade_infidelity(
    d: Device, steps: Sequence[ScheduleStep], eta: float, psi0: np.ndarray, tol: float = 1e-9
) -> float:
    omega = d.zeta / eta
    segs = [step_to_segment(s, omega) for s in steps]
    exact = evolve_exact(psi0, d, segs, tol)
    ideal = apply_schedule(psi0, d, steps, fuse=False)
    return max(0.0, 1.0 - fidelity(ideal, exact))


def blockade_error_sweep(
    d: Device,
    steps: Sequence[ScheduleStep],
    etas: Sequence[float],
    tol: float = 1e-9,
    state: np.ndarray | None = None,
    sort: bool = True,
    jobs: int = 1,
) -> list[tuple[float, float]]:
    """``(eta, 1 - F)`` rows comparing exact dynamics with the blockade model.

    ``state`` defaults to all-ground.  Each eta is an independent job; the
    output order never depends on ``jobs``.
    """
    _check_exact_size(d)
    if state is None:
        state = np.zeros(1 << d.num_sites, dtype=complex)
        state[-1] = 1.0
    etas = [float(e) for e in etas]
    if any(not math.isfinite(e) or e <= 0 for e in etas):
        raise ValueError("eta values must be positive and finite")

    def job(eta):
        return blockade_infidelity(d, steps, eta, state, tol)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            vals = list(pool.map(job, etas))
    else:
        vals = [job(e) for e in etas]
    rows = list(zip(etas, vals))
    if sort:
        rows.sort(key=lambda r: r[0])
    return rows
