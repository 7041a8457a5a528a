"""One test per acceptance criterion, each at its stated tolerance and time limit."""

import itertools
import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE
from oracles import basis, phase_distance, pulse_products, species_operator, su2
from zzpulse.blockade import ScheduleStep, apply_schedule, fidelity, product_state, steps_for
from zzpulse.cli import main
from zzpulse.compiler import compile_circuit, run_schedule
from zzpulse.compiler.circuit import parse_circuit
from zzpulse.compiler.conveyor import PositionTracker, rotate_belt
from zzpulse.compiler.ladder import check_shift_contract, search_shift
from zzpulse.device import FIXTURE_DIR, build_conveyor, build_ladder, chain, load_fixture, validate
from zzpulse.exact import DriveSegment, blockade_error_sweep, evolve_exact
from zzpulse.rotor import IDENTITY, Rotation, TransverseAxis, compose, conjugate_axis, inverse
from zzpulse.synth import GlobalPulse, length_bound, suppress_first, synth_targets, verify_sequence


@contextmanager
def criterion(num, limit=None):
    """Record PASS/FAIL for criterion ``num``; the body stores its detail in the yielded dict."""
    info = {"detail": ""}
    t0 = time.perf_counter()
    ok = False
    try:
        yield info
        elapsed = time.perf_counter() - t0
        if limit is not None:
            assert elapsed < limit, f"took {elapsed:.1f} s, limit {limit} s"
        ok = True
    finally:
        elapsed = time.perf_counter() - t0
        detail = f"{info['detail']} ({elapsed:.2f} s)"
        ACCEPTANCE[num] = (ok, detail)
        print(f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}")


def _rand_rotation(rng):
    return Rotation(rng.uniform(-2 * math.pi, 2 * math.pi), rng.normal(size=3))


def test_01_su2_suite():
    with criterion(1, limit=5) as info:
        rng = np.random.default_rng(101)
        worst = 0.0
        for _ in range(10_000):
            a, b = _rand_rotation(rng), _rand_rotation(rng)
            ma, mb = a.matrix(), b.matrix()
            worst = max(worst, np.max(np.abs(compose(a, b).matrix() - ma @ mb)))
            worst = max(worst, np.max(np.abs(inverse(a).matrix() - ma.conj().T)))
            conj = Rotation(b.theta, conjugate_axis(a.theta, a.axis, b.axis)).matrix()
            worst = max(worst, np.max(np.abs(ma @ mb @ ma.conj().T - conj)))
        full = [Rotation(2 * math.pi, rng.normal(size=3)).matrix() for _ in range(100)]
        exact = all(np.array_equal(m, -IDENTITY) for m in full)
        info["detail"] = f"max deviation {worst:.2e}, R(2pi)=-I exact: {exact}"
        assert worst < 1e-12 and exact


def test_02_global_synthesis():
    with criterion(2, limit=30) as info:
        rng = np.random.default_rng(202)
        worst, longest = 0.0, {}
        for n in (1, 2, 3):
            for _ in range(100):
                targets = [_rand_rotation(rng) for _ in range(n)]
                pulses = synth_targets(targets)
                worst = max(worst, verify_sequence(pulses, targets))
                assert len(pulses) <= length_bound(n)
                longest[n] = max(longest.get(n, 0), len(pulses))
        info["detail"] = f"max distance {worst:.2e}, longest {longest}"
        assert worst < 1e-9


def test_03_suppress_first_identity():
    with criterion(3) as info:
        rng = np.random.default_rng(303)
        worst_first, worst_rest = 0.0, 0.0
        for n in (2, 3, 4):
            for _ in range(50):
                theta, a = rng.uniform(-2 * math.pi, 2 * math.pi), TransverseAxis(rng.uniform(-math.pi, math.pi))
                pulses = suppress_first(theta, a, n)
                prods = pulse_products([(p.theta, p.phi) for p in pulses], n)
                worst_first = max(worst_first, phase_distance(prods[0], np.eye(2)))
                for j in range(2, n + 1):
                    worst_rest = max(worst_rest, phase_distance(prods[j - 1], su2(2 ** (j - 2) * theta, a.vector)))
        info["detail"] = f"subgroup 1 {worst_first:.2e}, lifted {worst_rest:.2e}"
        assert worst_first < 1e-12 and worst_rest < 1e-12


def test_04_corollary_on_conveyor():
    with criterion(4) as info:
        d = load_fixture("conveyor_n4")
        rng = np.random.default_rng(404)
        worst = 0.0
        for _ in range(25):
            targets = [_rand_rotation(rng) for _ in range(3)]
            steps = steps_for("B", synth_targets(targets))
            op = species_operator(d, "B", [su2(t.theta, t.axis) for t in targets])
            psi = rng.normal(size=512) + 1j * rng.normal(size=512)
            psi /= np.linalg.norm(psi)
            out = apply_schedule(psi, d, steps)
            worst = max(worst, np.linalg.norm(out - op @ psi))
        info["detail"] = f"max distance to dense W product {worst:.2e}"
        assert worst < 1e-9


def test_05_native_phase_gates():
    with criterion(5) as info:
        two_pi = su2(2 * math.pi, (1, 0, 0))
        d3 = chain("BAB")
        sim = np.column_stack(
            [apply_schedule(np.eye(8, dtype=complex)[:, k], d3, [ScheduleStep("A", GlobalPulse(2 * math.pi))]) for k in range(8)]
        )
        dense = species_operator(d3, "A", [two_pi])
        # restricted to mediator |g> (bit 1 set), outer pair in order (gg, ge, eg, ee)
        outer = {(1, 1): 0, (1, 0): 1, (0, 1): 2, (0, 0): 3}
        block = np.zeros((4, 4), dtype=complex)
        for (b0, b2), r in outer.items():
            for (c0, c2), c in outer.items():
                block[r, c] = sim[b0 | 2 | b2 << 2, c0 | 2 | c2 << 2]
        chain_ok = np.allclose(block, np.diag([-1, 1, 1, 1]), atol=1e-15) and np.allclose(sim, dense, atol=1e-15)

        d9 = load_fixture("conveyor_n4")
        hub = d9.layout["hub"]
        legs = d9.layout["hub_legs"]
        eye = np.eye(2, dtype=complex)
        rots = [Rotation.identity(), Rotation.identity(), Rotation(2 * math.pi, (1, 0, 0))]
        steps = steps_for("A", synth_targets(rots))
        dense9 = species_operator(d9, "A", [eye, eye, two_pi])
        worst = 0.0
        for k in range(512):
            if not (k >> hub) & 1:
                continue  # hub starts in |g>
            psi = np.zeros(512, dtype=complex)
            psi[k] = 1
            want = -1 if all((k >> q) & 1 for q in legs) else 1
            out = apply_schedule(psi, d9, steps)
            worst = max(worst, abs(out[k] - want), np.linalg.norm(dense9 @ psi - want * psi))
        info["detail"] = f"chain diag(-1,1,1,1): {chain_ok}, hub max deviation {worst:.1e}"
        assert chain_ok and worst < 1e-12


@pytest.mark.parametrize("n", [4, 6, 8])
def test_06_conveyor_transport(n):
    key = 6
    with criterion(key) as info:
        d = build_conveyor(n)
        q_sites = d.layout["q_sites"]
        patterns = [[k] for k in range(1, n + 1)] + [[1, 2], [1, 2, 3], list(range(1, n + 1, 3))]
        one_turn, _ = rotate_belt(d, PositionTracker.identity(n), 1)
        worst = 1.0
        for occ in patterns:
            psi = basis(d.num_sites, [q_sites[p - 1] for p in occ])
            for t in range(1, n + 1):
                psi = apply_schedule(psi, d, one_turn)
                # oracle: odd positions advance by 2 per turn, even ones go back by 2
                moved = [((p - 1 + (2 if p % 2 else -2) * t) % n) + 1 for p in occ]
                worst = min(worst, fidelity(psi, basis(d.num_sites, [q_sites[p - 1] for p in moved])))
        _, tr = rotate_belt(d, PositionTracker.identity(n), 1)
        opposite = all((tr.positions[q] - (q + 1)) % n == (2 if (q + 1) % 2 else n - 2) for q in range(n))
        prev = ACCEPTANCE.get(key, (True, ""))
        info["detail"] = f"n={n}: min fidelity {worst:.12f}, counter-rotating {opposite}"
        assert worst > 1 - 1e-9 and opposite and prev[0]
        if prev[1]:
            info["detail"] = prev[1].rsplit(" (", 1)[0] + "; " + info["detail"]


def test_07_end_to_end():
    with criterion(7, limit=60) as info:
        d = load_fixture("conveyor_n4")
        cases = [("bell", ["0000"]), ("ghz3", ["0000"]), ("toffoli", ["".join(b) + "0" for b in itertools.product("01", repeat=3)])]
        worst_f, worst_anc = 1.0, 1.0
        mediators = d.layout["mediators"] + [d.layout["hub"]]
        for name, inits in cases:
            c = parse_circuit((FIXTURE_DIR / f"{name}.gqc").read_text())
            sched, start, end = compile_circuit(c, d)
            for x in inits:
                r = run_schedule(c, d, sched, start, end, x)
                worst_f = min(worst_f, r.fidelity)
                idx = np.arange(512)
                ground = np.all([(idx >> m) & 1 for m in mediators], axis=0)
                worst_anc = min(worst_anc, float(np.sum(np.abs(r.final_state[ground]) ** 2)))
        info["detail"] = f"min fidelity {worst_f:.12f}, ancilla |g> weight {worst_anc:.12f}"
        assert worst_f >= 1 - 1e-6 and worst_anc >= 1 - 1e-6


def test_08_blockade_regime():
    with criterion(8, limit=60) as info:
        etas = [5, 10, 20, 50, 100]
        rows = blockade_error_sweep(
            chain("BAB"), [ScheduleStep("A", GlobalPulse(math.pi))], etas, state=product_state(3, [0]), sort=False
        )
        vals = [v for _, v in rows]
        monotone = all(b <= a for a, b in zip(vals, vals[1:]))
        single = chain("A")
        worst = 0.0
        for eta in etas:
            omega = single.zeta / eta
            out = evolve_exact(np.array([0, 1], dtype=complex), single, [DriveSegment("A", math.pi / omega, omega)])
            worst = max(worst, np.linalg.norm(out - Rotation(math.pi, (1, 0, 0)).matrix() @ np.array([0, 1])))
        info["detail"] = "infidelities " + ", ".join(f"{v:.2e}" for v in vals) + f"; isolated error {worst:.1e}"
        assert monotone and vals[-1] < 1e-2 and worst < 1e-9


def test_09_site_counts():
    with criterion(9) as info:
        ladders = {n: build_ladder(n) for n in (2, 3, 4)}
        belts = {n: build_conveyor(n) for n in (4, 6, 8)}
        ok = all(d.num_sites == 2 * n * n + 4 * n - 1 and validate(d).ok for n, d in ladders.items())
        ok &= all(d.num_sites == 2 * n + 1 and validate(d).ok for n, d in belts.items())
        info["detail"] = "ladder " + str({n: d.num_sites for n, d in ladders.items()}) + ", conveyor " + str(
            {n: d.num_sites for n, d in belts.items()}
        )
        assert ok


def test_10_ladder_aligned_gates():
    with criterion(10) as info:
        d = load_fixture("ladder_n2")
        worst = 1.0
        # CZ across the connector with the register at column 1, and a
        # Hadamard on row 2's double-crossed site with the register at column 2
        for text in ("qubits 2\nCZ q1 q2", "qubits 2\nH q1\nCZ q1 q2", "qubits 2\nH q2", "qubits 2\nH q2\nRY 0.3 q2"):
            c = parse_circuit(text)
            sched, start, end = compile_circuit(c, d)
            for x in ("00", "01", "10", "11"):
                r = run_schedule(c, d, sched, start, end, x)
                worst = min(worst, r.fidelity)
        assert d.sites[d.layout["row_sites"][1][4]].subgroup == "double_crossed"
        info["detail"] = f"min fidelity {worst:.12f}"
        assert worst >= 1 - 1e-9


def test_11_shift_search():
    with criterion(11, limit=60) as info:
        d = load_fixture("ladder_n2")
        first = search_shift(d)
        second = search_shift(d)
        deterministic = (first.found, first.moves, first.certificate["forward_digest"], first.certificate["backward_digest"]) == (
            second.found, second.moves, second.certificate["forward_digest"], second.certificate["backward_digest"]
        )
        pinned = json.loads((FIXTURE_DIR / "ladder_n2_shift_search.json").read_text())
        cert = dict(first.certificate)
        cert.pop("seconds")
        cert["found"] = first.found
        cert["moves"] = [m.to_dict() for m in first.moves]
        if first.found:
            checked = check_shift_contract(d, first.moves)
            outcome = f"sequence of {len(first.moves)} moves, contract holds: {checked}"
        else:
            # a certificate is only meaningful if it covers the stated depth
            checked = cert["max_depth"] == 8 and cert["forward_nodes"] > 0 and cert["backward_nodes"] > 0
            outcome = f"exhausted depth 8 ({cert['forward_nodes']} + {cert['backward_nodes']} nodes)"
        info["detail"] = f"{outcome}; deterministic {deterministic}; matches pinned {cert == pinned}"
        assert checked and deterministic and cert == pinned


def test_12_cli_determinism(tmp_path, capsys):
    with criterion(12) as info:
        reports = []
        for k in range(2):
            rep = tmp_path / f"report{k}.json"
            code = main(["compile", "--device", "conveyor_n4", "--circuit", "bell", "--run", "--report", str(rep)])
            assert code == 0
            reports.append(rep.read_bytes())
        sweeps = []
        for k in range(2):
            out = tmp_path / f"sweep{k}.csv"
            main(["sweep", "--device", "chain_bab", "--schedule", "center_pi", "--etas", "50,5,20", "--excite", "0",
                  "--out", str(out), "--jobs", str(1 + 2 * k)])
            sweeps.append(out.read_text())
        order = [line.split(",")[0] for line in sweeps[0].splitlines()[1:]]
        capsys.readouterr()
        info["detail"] = f"reports identical {reports[0] == reports[1]}, sweeps identical {sweeps[0] == sweeps[1]}, order {order}"
        assert reports[0] == reports[1] and sweeps[0] == sweeps[1] and order == ["50.0", "5.0", "20.0"]
