"""Ideal blockade-model statevector engine.

A pulse on species ``chi`` rotates every site ``i`` of that species by
``R(2**(j-1) theta, n_phi)`` on the part of the state where all neighbours of
``i`` are in ``|g>``, and leaves the rest alone.

State layout: a flat complex vector of length ``2**M``.  Bit ``k`` of the
amplitude index is the local basis index of site ``k`` in the (|e>, |g>)
ordering, so a set bit means ``|g>`` and the all-ground state is the last
index.  Use :func:`basis_index` / :func:`product_state` rather than building
indices by hand.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .device import Device
from .errors import ResourceLimitError
from .rotor import Rotation
from .synth import GlobalPulse, sequence_products

DEFAULT_MAX_SITES = 20
E, G = 0, 1  # local basis indices


def max_sites() -> int:
    return int(os.environ.get("ZZPULSE_MAX_QUBITS", DEFAULT_MAX_SITES))


def check_size(m: int) -> None:
    if m > max_sites():
        raise ResourceLimitError(
            f"{m} sites exceed the statevector cap of {max_sites()} (set ZZPULSE_MAX_QUBITS)"
        )


@dataclass(frozen=True)
class ScheduleStep:
    species: str
    pulse: GlobalPulse

    def inverse(self) -> "ScheduleStep":
        return ScheduleStep(self.species, self.pulse.inverse())


def steps_for(species: str, pulses: Iterable[GlobalPulse]) -> list[ScheduleStep]:
    return [ScheduleStep(species, p) for p in pulses]


def invert_schedule(steps: Sequence[ScheduleStep]) -> list[ScheduleStep]:
    return [s.inverse() for s in reversed(steps)]


def basis_index(m: int, excited: Iterable[int]) -> int:
    idx = (1 << m) - 1
    for k in excited:
        idx &= ~(1 << k)
    return idx


def excited_sites(index: int, m: int) -> list[int]:
    return [k for k in range(m) if not (index >> k) & 1]


def product_state(m: int, excited: Iterable[int] = ()) -> np.ndarray:
    check_size(m)
    psi = np.zeros(1 << m, dtype=complex)
    psi[basis_index(m, excited)] = 1.0
    return psi


def site_product_state(locals_: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of per-site 2-vectors given in site-id order."""
    check_size(len(locals_))
    psi = np.ones(1, dtype=complex)
    for v in locals_:
        # site k is bit k, so later sites are more significant
        psi = np.kron(np.asarray(v, dtype=complex), psi)
    return psi


def _axis(m: int, site: int) -> int:
    return m - 1 - site


def apply_site_rotation(psi: np.ndarray, d: Device, site: int, u: np.ndarray) -> None:
    """In place: apply 2x2 ``u`` to ``site`` where all its neighbours are ``|g>``."""
    m = d.num_sites
    t = psi.reshape((2,) * m)
    idx: list = [slice(None)] * m
    for k in d.neighbors(site):
        idx[_axis(m, k)] = G
    idx = tuple(idx)
    sub = t[idx]
    ax = _axis(m, site)
    pos = ax - sum(1 for k in d.neighbors(site) if _axis(m, k) < ax)
    new = np.tensordot(u, sub, axes=([1], [pos]))
    t[idx] = np.moveaxis(new, 0, pos)


def _check_dim(psi: np.ndarray, d: Device) -> None:
    if psi.shape != (1 << d.num_sites,):
        raise ValueError(f"state has shape {psi.shape}, device needs ({1 << d.num_sites},)")


def apply_subgroup_rotations(psi: np.ndarray, d: Device, species: str, rotations: Sequence[Rotation]) -> np.ndarray:
    """Apply ``rotations[j-1]`` (blockade-controlled) to every site of subgroup ``j``."""
    _check_dim(psi, d)
    out = np.array(psi, dtype=complex, copy=True)
    mats = [r.matrix() for r in rotations]
    for s in d.sites:
        if s.species != species:
            continue
        j = s.subgroup_index
        if j > len(mats):
            raise ValueError(f"no rotation given for subgroup {j} of species {species}")
        apply_site_rotation(out, d, s.id, mats[j - 1])
    return out


def apply_step(psi: np.ndarray, d: Device, step: ScheduleStep) -> np.ndarray:
    n = d.subgroup_count(step.species)
    rots = sequence_products([step.pulse], n)
    return apply_subgroup_rotations(psi, d, step.species, rots)


def apply_schedule(psi: np.ndarray, d: Device, steps: Sequence[ScheduleStep], fuse: bool = True) -> np.ndarray:
    """Apply ``steps`` in order.

    With ``fuse`` each run of consecutive same-species steps is first
    multiplied out per subgroup and applied once.  This is exact: within such
    a run no neighbour of a driven site changes, so the controlled rotations
    on one site compose like plain SU(2) elements.
    """
    _check_dim(psi, d)
    if not fuse:
        for st in steps:
            psi = apply_step(psi, d, st)
        return psi
    out = np.array(psi, dtype=complex, copy=True)
    k = 0
    while k < len(steps):
        species = steps[k].species
        run = []
        while k < len(steps) and steps[k].species == species:
            run.append(steps[k].pulse)
            k += 1
        rots = sequence_products(run, d.subgroup_count(species))
        out = apply_subgroup_rotations(out, d, species, rots)
    return out


def init_state(d: Device, logical: str, icc_column: int | None = None) -> np.ndarray:
    """Encode a logical bitstring (``'0'`` -> ``|g>``, ``'1'`` -> ``|e>``).

    Conveyor: bit ``k`` goes to ``Q_{k+1}``; mediators and hub start in ``|g>``.
    Ladder: bits go down the information-carrying column, B sites to its left
    are excited (Neel), everything to its right is ground (ferromagnetic).
    """
    if len(logical) != d.num_logical or set(logical) - {"0", "1"}:
        raise ValueError(f"need a {d.num_logical}-character 0/1 string, got {logical!r}")
    excited = []
    if d.architecture == "ladder":
        from .device import ladder_site

        b = d.layout["icc_column"] if icc_column is None else icc_column
        for r in range(1, d.layout["rows"] + 1):
            for bb in range(b):
                excited.append(ladder_site(d, r, 2 * bb))
            if logical[r - 1] == "1":
                excited.append(ladder_site(d, r, 2 * b))
    else:
        excited = [q for q, bit in zip(d.logical_map, logical) if bit == "1"]
    return product_state(d.num_sites, excited)


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


def dump_amplitudes(psi: np.ndarray, m: int, threshold: float = 1e-12) -> list[dict]:
    """Nonzero amplitudes as records with the excited-site list of each basis state."""
    out = []
    for idx in np.flatnonzero(np.abs(psi) > threshold):
        a = complex(psi[idx])
        out.append({"index": int(idx), "excited": excited_sites(int(idx), m), "re": a.real, "im": a.imag})
    return out
