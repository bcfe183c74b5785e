"""Classical query baselines and a reversible three-bit gate evaluator."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from .errors import GateStructureError


@dataclass(frozen=True)
class QueryTranscript:
    """Oracle calls made while searching for ``k``.

    ``queries`` holds ``(x, delta(k, x))`` pairs in call order.  When every
    candidate but one has been ruled out the answer is inferred without a
    further call, so ``answer`` need not appear among the queries.
    """

    k: int
    queries: tuple[tuple[int, int], ...]
    answer: int

    @property
    def query_count(self) -> int:
        return len(self.queries)

    @property
    def inferred(self) -> bool:
        return not self.queries or self.queries[-1][1] == 0


def search_candidates(k: int, order: Sequence[int]) -> QueryTranscript:
    """Probe ``order`` until delta(k, x) = 1, inferring the last candidate."""
    order = [int(x) for x in order]
    if len(set(order)) != len(order):
        raise ValueError("probe order repeats a candidate")
    if k not in order:
        raise ValueError(f"k={k} is not among the candidates")
    queries = []
    for x in order[:-1]:
        hit = int(x == k)
        queries.append((x, hit))
        if hit:
            return QueryTranscript(k, tuple(queries), x)
    if not queries:
        # a lone candidate still costs one confirming call
        queries.append((order[0], 1))
    return QueryTranscript(k, tuple(queries), order[-1])


def classical_search(
    n_bits: int,
    k: int,
    probe_order: Sequence[int] | None = None,
    rng: np.random.Generator | None = None,
) -> QueryTranscript:
    """Search N = 2**n_bits drawers; random probe order unless one is given."""
    n = 1 << n_bits
    if not 0 <= k < n:
        raise ValueError(f"k={k} out of range for N={n}")
    if probe_order is None:
        if rng is None:
            raise ValueError("need either probe_order or rng")
        probe_order = rng.permutation(n)
    elif sorted(int(x) for x in probe_order) != list(range(n)):
        raise ValueError("probe_order must be a permutation of range(N)")
    return search_candidates(k, probe_order)


def monte_carlo_mean_queries(n_bits: int, trials: int, rng: np.random.Generator) -> float:
    """Mean query count with k and the probe order both uniformly random."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = 1 << n_bits
    ks = rng.integers(n, size=trials)
    total = 0
    for k in ks:
        total += classical_search(n_bits, int(k), rng=rng).query_count
    return total / trials


def exact_mean_queries(N: int, exhaustive: bool | None = None) -> Fraction:
    """Mean query count over uniform k and uniform probe orders, as a fraction.

    With ``exhaustive`` (default for N <= 8) every (k, order) pair is run.
    Otherwise only the position of k within the order is enumerated, each
    position being hit by the same number of orders.
    """
    if exhaustive is None:
        exhaustive = N <= 8
    if exhaustive:
        total, count = 0, 0
        for order in itertools.permutations(range(N)):
            for k in range(N):
                total += search_candidates(k, order).query_count
                count += 1
        return Fraction(total, count)
    order = list(range(N))
    return Fraction(sum(search_candidates(k, order).query_count for k in range(N)), N)


def worst_case_queries(N: int, probe_order: Sequence[int] | None = None) -> int:
    order = list(range(N)) if probe_order is None else list(probe_order)
    return max(search_candidates(k, order).query_count for k in range(N))


def grover_beats_classical(N: int) -> bool:
    return math.floor(math.pi / 4 * math.sqrt(N)) < exact_mean_queries(N, exhaustive=False)


# --------------------------------------------------------------------------
# Reversible gates

GateKind = Literal["toffoli", "fredkin"]


@dataclass(frozen=True)
class Gate:
    """Toffoli: ``lines = (c1, c2, target)``.  Fredkin: ``(control, a, b)``."""

    kind: GateKind
    lines: tuple[int, int, int]

    def __post_init__(self) -> None:
        if self.kind not in ("toffoli", "fredkin"):
            raise GateStructureError(f"unknown gate kind {self.kind!r}")
        if len(self.lines) != 3 or len(set(self.lines)) != 3:
            raise GateStructureError(f"{self.kind} gate needs 3 distinct lines, got {self.lines}")


@dataclass(frozen=True)
class ReversibleGateNetwork:
    n_lines: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        for g in self.gates:
            if any(not 0 <= line < self.n_lines for line in g.lines):
                raise GateStructureError(f"{g.kind} gate on {g.lines} exceeds {self.n_lines} lines")

    def reversed(self) -> ReversibleGateNetwork:
        # both gate kinds are self-inverse
        return ReversibleGateNetwork(self.n_lines, tuple(reversed(self.gates)))


def evaluate_gate_network(
    net: ReversibleGateNetwork, bits: Sequence[int]
) -> tuple[tuple[int, ...], int]:
    """Run the gates in order.

    Returns the output bits and the largest number of bits any single gate
    event processes together (3 for a nonempty network, 0 otherwise).
    """
    if len(bits) != net.n_lines:
        raise GateStructureError(f"expected {net.n_lines} input bits, got {len(bits)}")
    state = [int(b) for b in bits]
    if any(b not in (0, 1) for b in state):
        raise ValueError("input bits must be 0 or 1")
    touched = 0
    for g in net.gates:
        a, b, c = g.lines
        if g.kind == "toffoli":
            state[c] ^= state[a] & state[b]
        elif state[a]:
            state[b], state[c] = state[c], state[b]
        touched = max(touched, len(g.lines))
    return tuple(state), touched
