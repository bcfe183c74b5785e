"""Classical histories that know half of the solution bits in advance.

A history fixes ``n/2`` of the bits of ``k`` (their values are given for
free) and finds the rest by a classical search over the ``sqrt(N)``
candidates compatible with the known bits.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .classical import QueryTranscript, search_candidates
from .errors import UnsupportedError

OrderMode = Literal["all", "rotations"]
MAX_HISTORIES = 200_000


@dataclass(frozen=True)
class History:
    k: int
    known_bits: tuple[int, ...]
    known_values: tuple[int, ...]
    probe_order: tuple[int, ...]
    transcript: QueryTranscript

    @property
    def query_count(self) -> int:
        return self.transcript.query_count


def _bit(value: int, position: int, n_bits: int) -> int:
    # position 0 is the most significant bit
    return (value >> (n_bits - 1 - position)) & 1


def residual_candidates(n_bits: int, known_bits: tuple[int, ...], known_values: tuple[int, ...]) -> list[int]:
    return [
        x
        for x in range(1 << n_bits)
        if all(_bit(x, b, n_bits) == v for b, v in zip(known_bits, known_values))
    ]


def _check_even(n_bits: int) -> None:
    if n_bits < 2 or n_bits % 2:
        raise UnsupportedError(f"half-known histories need an even n_bits >= 2, got {n_bits}")


def enumerate_histories(n_bits: int, k: int, orders: OrderMode = "all") -> list[History]:
    """Every (known half of the bits, residual probe order) pair for ``k``.

    ``orders="all"`` runs every permutation of the residual candidates;
    ``"rotations"`` only the cyclic shifts of the sorted list, which still
    puts k at each probe position equally often and stays cheap for n >= 6.
    """
    _check_even(n_bits)
    if not 0 <= k < 1 << n_bits:
        raise ValueError(f"k={k} out of range for n_bits={n_bits}")
    if orders not in ("all", "rotations"):
        raise ValueError(f"unknown order mode {orders!r}")
    if orders == "all":
        count = math.comb(n_bits, n_bits // 2) * math.factorial(1 << (n_bits // 2))
        if count > MAX_HISTORIES:
            raise UnsupportedError(f"{count} histories per k; use orders='rotations' for n_bits={n_bits}")
    out = []
    for known in itertools.combinations(range(n_bits), n_bits // 2):
        values = tuple(_bit(k, b, n_bits) for b in known)
        cands = residual_candidates(n_bits, known, values)
        if orders == "all":
            perms = itertools.permutations(cands)
        else:
            perms = (tuple(cands[i:] + cands[:i]) for i in range(len(cands)))
        for order in perms:
            out.append(History(k, known, values, tuple(order), search_candidates(k, order)))
    return out


def history_outcome_distribution(n_bits: int, orders: OrderMode = "all") -> np.ndarray:
    """P(k, answer) with k uniform and histories uniform given k, shape (N, N)."""
    _check_even(n_bits)
    n = 1 << n_bits
    dist = np.zeros((n, n))
    for k in range(n):
        hs = enumerate_histories(n_bits, k, orders)
        for h in hs:
            dist[k, h.transcript.answer] += 1.0 / (n * len(hs))
    return dist


def residual_worst_case(n_bits: int) -> int:
    """Worst-case residual queries: sqrt(N) - 1 with last-candidate inference."""
    _check_even(n_bits)
    return (1 << (n_bits // 2)) - 1


def scaling_table(bit_counts=(2, 4, 6, 8)) -> list[dict]:
    rows = []
    for n_bits in bit_counts:
        N = 1 << n_bits
        residual = residual_worst_case(n_bits)
        grover = math.floor(math.pi / 4 * math.sqrt(N))
        rows.append({"N": N, "residual_worst": residual, "grover_calls": grover, "ratio": grover / residual})
    return rows
