import math

import numpy as np
import pytest

from oracles import basis, species_operator
from zzpulse.blockade import (
    ScheduleStep,
    apply_schedule,
    apply_subgroup_rotations,
    basis_index,
    dump_amplitudes,
    excited_sites,
    fidelity,
    init_state,
    invert_schedule,
    product_state,
)
from zzpulse.device import build_conveyor, build_ladder, chain, ladder_site
from zzpulse.errors import ResourceLimitError
from zzpulse.rotor import Rotation
from zzpulse.synth import GlobalPulse, synth_targets


def test_isolated_half_turn():
    d = chain("A")
    out = apply_schedule(product_state(1, []), d, [ScheduleStep("A", GlobalPulse(math.pi, 0.0))])
    # R(pi, x)|g> = -i|e>
    assert np.allclose(out, [-1j, 0])


def test_excited_neighbour_blocks():
    d = chain("AB")
    psi = product_state(2, [1])
    out = apply_schedule(psi, d, [ScheduleStep("A", GlobalPulse(math.pi, 0.0))])
    assert np.allclose(out, psi)


def test_mediator_phase_gate_on_chain():
    d = chain("BAB")
    step = [ScheduleStep("A", GlobalPulse(2 * math.pi, 0.0))]
    for outer in ([], [0], [2], [0, 2]):
        psi = product_state(3, outer)
        out = apply_schedule(psi, d, step)
        assert np.allclose(out, (-1 if not outer else 1) * psi)


def test_fused_equals_stepwise():
    d = build_conveyor(4)
    rng = np.random.default_rng(1)
    steps = [ScheduleStep(rng.choice(["A", "B"]), GlobalPulse(rng.uniform(-4, 4), rng.uniform(-3, 3))) for _ in range(30)]
    psi = rng.normal(size=512) + 1j * rng.normal(size=512)
    psi /= np.linalg.norm(psi)
    a = apply_schedule(psi, d, steps, fuse=True)
    b = apply_schedule(psi, d, steps, fuse=False)
    assert np.max(np.abs(a - b)) < 1e-12


def test_subgroup_rotations_match_dense_operator():
    d = build_conveyor(4)
    rng = np.random.default_rng(2)
    rots = [Rotation(rng.uniform(-6, 6), rng.normal(size=3)) for _ in range(3)]
    psi = rng.normal(size=512) + 1j * rng.normal(size=512)
    op = species_operator(d, "B", [r.matrix() for r in rots])
    out = apply_subgroup_rotations(psi, d, "B", rots)
    assert np.max(np.abs(out - op @ psi)) < 1e-12


def test_inverse_schedule_restores_state():
    d = build_conveyor(4)
    steps = [ScheduleStep("B", p) for p in synth_targets([Rotation(0.3, (1, 2, 3)), Rotation(1.0, (0, 1, 0)), Rotation(2.0, (1, 0, 0))])]
    steps += [ScheduleStep("A", GlobalPulse(0.8, 0.1))]
    psi = init_state(d, "1010")
    back = apply_schedule(apply_schedule(psi, d, steps), d, invert_schedule(steps))
    assert fidelity(psi, back) > 1 - 1e-12


def test_basis_helpers():
    idx = basis_index(4, [0, 2])
    assert excited_sites(idx, 4) == [0, 2]
    assert basis_index(3, []) == 7
    assert dump_amplitudes(product_state(3, [1]), 3) == [{"index": 5, "excited": [1], "re": 1.0, "im": 0.0}]


def test_init_state_conveyor():
    d = build_conveyor(4)
    psi = init_state(d, "1001")
    assert np.allclose(psi, basis(9, [0, 6]))


def test_init_state_ladder_background():
    d = build_ladder(2)
    psi = init_state(d, "00")
    # left buffer B sites excited, ICC zeros, rest ground
    expected = basis(d.num_sites, [ladder_site(d, 1, 0), ladder_site(d, 2, 0)])
    assert np.allclose(psi, expected) and abs(np.linalg.norm(psi) - 1) < 1e-15


def test_init_state_rejects_bad_bits():
    with pytest.raises(ValueError):
        init_state(build_conveyor(4), "10")


def test_size_cap(monkeypatch):
    monkeypatch.setenv("ZZPULSE_MAX_QUBITS", "4")
    with pytest.raises(ResourceLimitError):
        product_state(5)


def test_fidelity_shape_mismatch():
    with pytest.raises(ValueError):
        fidelity(np.zeros(2), np.zeros(4))
