"""Exit criteria, one test per criterion.

Each criterion records a PASS/FAIL line that is printed in the terminal
summary (see ``conftest.pytest_terminal_summary``).
"""

import itertools
import math
import subprocess
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from grover_machine import classical, histories, machine, quantum
from grover_machine.machine import Q, CoordinateId
from helpers import SQ2, bitstrings, state_from_terms

RESULTS: list[str] = []
EXACT = 1e-12


@contextmanager
def criterion(number, title, max_seconds=None):
    start = time.perf_counter()
    ok = False
    detail = ""
    try:
        yield
        elapsed = time.perf_counter() - start
        detail = f"{elapsed:.3f}s"
        if max_seconds is not None:
            assert elapsed < max_seconds, f"took {elapsed:.2f}s, limit {max_seconds}s"
        ok = True
    except AssertionError as exc:
        detail = str(exc).splitlines()[0] if str(exc) else "assertion failed"
        raise
    finally:
        RESULTS.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})")


def tv(p, q):
    return 0.5 * float(np.abs(np.asarray(p, float) - np.asarray(q, float)).sum())


def test_ac1_grover_n4_exact():
    with criterion(1, "N=4 one oracle call reaches the output state exactly", 1.0):
        lay = quantum.RegisterLayout(2)
        state = quantum.apply_diffusion(quantum.apply_oracle(quantum.prepare_input(lay)))
        expected = {}
        for k in bitstrings(2):
            expected[(k, k, 0)] = 1 / (2 * SQ2)
            expected[(k, k, 1)] = -1 / (2 * SQ2)
        assert np.max(np.abs(state.amplitudes - state_from_terms(2, expected))) <= EXACT
        assert abs(quantum.success_probability(state) - 1.0) <= EXACT
        assert state.oracle_calls == 1
        run = quantum.grover_run(lay)
        assert run.oracle_calls == 1
        assert np.max(np.abs(run.amplitudes - state.amplitudes)) <= EXACT


def test_ac2_intermediate_states_bit_exact():
    with criterion(2, "phase-flip sign pattern and forced K=01 collapse", 1.0):
        lay = quantum.RegisterLayout(2)
        flipped = quantum.apply_oracle(quantum.prepare_input(lay))
        a = 1 / (4 * SQ2)
        second = {}
        for k, x in itertools.product(bitstrings(2), repeat=2):
            sign = -1 if k == x else 1
            second[(k, x, 0)] = sign * a
            second[(k, x, 1)] = -sign * a
        assert np.max(np.abs(flipped.amplitudes - state_from_terms(2, second))) <= EXACT
        assert np.array_equal(np.sign(flipped.amplitudes.real), np.sign(state_from_terms(2, second).real))

        output = quantum.apply_diffusion(flipped)
        rec = quantum.measure(output, "K", np.random.default_rng(0), outcome="01")
        collapsed = state_from_terms(2, {("01", "01", 0): 1 / SQ2, ("01", "01", 1): -1 / SQ2})
        assert abs(rec.probability - 0.25) <= EXACT
        assert np.max(np.abs(rec.state.amplitudes - collapsed)) <= EXACT


def _brute_force(network, fixed=None):
    out = set()
    for rows in itertools.product(*(range(len(t.rows)) for t in network.tables)):
        if fixed and rows[fixed[0]] != fixed[1]:
            continue
        vals = {}
        if all(
            vals.setdefault(var, bit) == bit
            for i, j in enumerate(rows)
            for var, bit in network.tables[i].row_values(j).items()
        ):
            out.add(rows)
    return out


def test_ac3_movement_counts():
    with criterion(3, "16 movements pushing Q, 4 pushing C23, diagonal with delta=1", 1.0):
        net = machine.delta_network()
        mach = machine.build_machine(net, 2.0)
        push_q = machine.enumerate_movements(mach, Q)
        push_c23 = machine.enumerate_movements(mach, "C23")
        assert len(push_q) == 16
        assert len(push_c23) == 4
        assert {m.rows for m in push_q} == _brute_force(net)
        assert {m.rows for m in push_c23} == _brute_force(net, (2, 3))
        pairs = set()
        for m in push_c23:
            assert m.assignment["δ"] == 1
            pairs.add((machine.register_value(m.assignment, "k", 2), machine.register_value(m.assignment, "x", 2)))
        assert pairs == {(k, k) for k in range(4)}


def test_ac4_exclusivity_power_mean():
    with criterion(4, "10,000 split assignments always violate the power equation", 5.0):
        net = machine.delta_network()
        gen = np.random.default_rng(4)
        false_passes = 0
        for chi in (1.5, 2.0, 3.0):
            mach = machine.build_machine(net, chi)
            for _ in range(10_000):
                table = int(gen.integers(3))
                draws = gen.uniform(0, 1, size=12)
                values = {CoordinateId(i, j): float(draws[4 * i + j]) for i in range(3) for j in range(4)}
                n_pos = int(gen.integers(2, 5))
                movers = gen.choice(4, size=n_pos, replace=False)
                for j in range(4):
                    if j not in movers:
                        values[CoordinateId(table, j)] = 0.0
                values[Q] = sum(values[CoordinateId(table, j)] for j in range(4))
                report = machine.check_exclusivity(mach, values)
                assert report.tables[table].sum_ok
                assert report.tables[table].n_positive >= 2
                if table not in report.power_violations:
                    false_passes += 1
        assert false_passes == 0, f"{false_passes} false passes"


def test_ac5_population_map():
    with criterion(5, "coordinate ratios give collapsed and pre-measurement populations"):
        mach = machine.build_machine(machine.delta_network())
        lay = quantum.RegisterLayout(2)
        output = quantum.grover_run(lay)
        qubits = ["k0", "k1", "x0", "x1"]
        for m in machine.enumerate_movements(mach, "C23"):
            k = machine.register_value(m.assignment, "k", 2)
            pops = machine.movement_populations(mach, m, qubits)
            collapsed = quantum.qubit_populations(quantum.measure(output, "K", None, outcome=k).state)
            values = m.coordinate_values(mach)
            # k0 read off the first table: rows 0, 1 have k0 = 0
            assert pops["k0"] == (values[CoordinateId(0, 0)] + values[CoordinateId(0, 1)],
                                  values[CoordinateId(0, 2)] + values[CoordinateId(0, 3)])
            for q in qubits:
                assert pops[q] in ((1.0, 0.0), (0.0, 1.0))
                assert max(abs(pops[q][0] - collapsed[q][0]), abs(pops[q][1] - collapsed[q][1])) <= EXACT
        idle = machine.movement_populations(mach, None, qubits)
        before = quantum.qubit_populations(output)
        for q in qubits:
            assert idle.is_indeterminate(q)
            assert idle[q] == (0.5, 0.5)
            assert max(abs(idle[q][0] - before[q][0]), abs(idle[q][1] - before[q][1])) <= EXACT


def test_ac6_distribution_equivalence():
    with criterion(6, "quantum, machine and history (k, x) laws agree within TV 0.02", 10.0):
        trials = 100_000
        q_rng, m_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(6).spawn(2))
        state = quantum.grover_run(quantum.RegisterLayout(2))
        q = quantum.sample_joint(state, trials, q_rng) / trials

        mach = machine.build_machine(machine.delta_network())
        moves, counts = machine.sample_movement_counts(mach, "C23", m_rng, trials)
        m = np.zeros((4, 4))
        for mv, c in zip(moves, counts):
            m[machine.register_value(mv.assignment, "k", 2), machine.register_value(mv.assignment, "x", 2)] += c / trials

        h = histories.history_outcome_distribution(2)
        for name, d in {"q-m": tv(q, m), "q-h": tv(q, h), "m-h": tv(m, h)}.items():
            assert d < 0.02, f"{name} total variation {d:.4f}"


def test_ac7_classical_baseline():
    with criterion(7, "classical mean 2.25 +/- 0.02, exact 9/4, worst case 3", 5.0):
        mean = classical.monte_carlo_mean_queries(2, 100_000, np.random.default_rng(7))
        assert abs(mean - 2.25) <= 0.02, f"mean {mean}"
        assert classical.exact_mean_queries(4, exhaustive=True) == Fraction(9, 4)
        assert max(classical.worst_case_queries(4, o) for o in itertools.permutations(range(4))) == 3


def test_ac8_scaling():
    with criterion(8, "success after floor(pi/4 sqrt N) rounds matches closed form", 10.0):
        for n_bits in (4, 6, 8):
            lay = quantum.RegisterLayout(n_bits)
            r = math.floor(math.pi / 4 * math.sqrt(lay.N))
            closed = math.sin((2 * r + 1) * math.asin(1 / math.sqrt(lay.N))) ** 2
            state = quantum.grover_run(lay)
            assert abs(quantum.success_probability(state) - closed) <= 1e-4
            assert state.oracle_calls == r <= math.sqrt(lay.N)
        assert abs(math.sin(7 * math.asin(0.25)) ** 2 - 0.9613) <= 1e-4


def test_ac9_determinism():
    with criterion(9, "identical seeds give byte-identical JSON reports"):
        commands = [
            ["grover", "--n", "3", "--seed", "11"],
            ["machine", "sample", "--network", "paper_n4.network", "--push", "C23", "--trials", "5000", "--seed", "11"],
            ["baseline", "--n", "2", "--trials", "5000", "--seed", "11"],
            ["compare", "--n", "2", "--network", "paper_n4.network", "--trials", "5000", "--seed", "11"],
        ]
        for argv in commands:
            full = [sys.executable, "-m", "grover_machine", "--format", "json", *argv]
            first = subprocess.run(full, capture_output=True, check=True).stdout
            second = subprocess.run(full, capture_output=True, check=True).stdout
            assert first and first == second, f"{argv[0]} output differs"
