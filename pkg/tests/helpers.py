"""Shared test helpers, independent of the package internals."""

import math

import numpy as np

SQ2 = math.sqrt(2.0)


def basis_index(k: str, x: str, v: int) -> int:
    """Flat index written out from the documented order: K bits, X bits, V."""
    return int(k + x + str(v), 2)


def state_from_terms(n_bits: int, terms: dict[tuple[str, str, int], complex]) -> np.ndarray:
    amps = np.zeros(1 << (2 * n_bits + 1), dtype=complex)
    for (k, x, v), a in terms.items():
        amps[basis_index(k, x, v)] = a
    return amps


def bitstrings(n_bits: int) -> list[str]:
    return [format(i, f"0{n_bits}b") for i in range(1 << n_bits)]
