"""State-vector simulation of three-register Grover search.

Registers: K holds the oracle's choice ``k``, X the query argument ``x`` and
V a single result qubit prepared in (|0> - |1>)/sqrt(2).  The flat amplitude
array is indexed ``(k * N + x) * 2 + v``: K bits most significant, then X,
then V.  Inside each register bit 0 (``k0``, ``x0``) is the most significant,
so ``|01>_K`` means k0 = 0, k1 = 1 and index k = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import InvalidLayoutError, MeasurementError
from .populations import PopulationVector

Register = Literal["K", "X"]

EXACT_TOL = 1e-12
MAX_BITS = 10


@dataclass(frozen=True)
class RegisterLayout:
    n_bits: int

    def __post_init__(self) -> None:
        if not isinstance(self.n_bits, (int, np.integer)) or isinstance(self.n_bits, bool):
            raise InvalidLayoutError(f"n_bits must be an integer, got {self.n_bits!r}")
        if not 2 <= self.n_bits <= MAX_BITS:
            raise InvalidLayoutError(f"n_bits must lie in [2, {MAX_BITS}], got {self.n_bits}")

    @property
    def N(self) -> int:
        return 1 << self.n_bits

    @property
    def n_qubits(self) -> int:
        return 2 * self.n_bits + 1

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    @property
    def qubit_names(self) -> tuple[str, ...]:
        ks = tuple(f"k{i}" for i in range(self.n_bits))
        xs = tuple(f"x{i}" for i in range(self.n_bits))
        return ks + xs + ("v",)

    def bits(self, index: int) -> str:
        return format(index, f"0{self.n_bits}b")

    def index(self, value: int | str) -> int:
        """Register index from an int or a bit string such as ``"01"``."""
        if isinstance(value, str):
            if len(value) != self.n_bits or set(value) - {"0", "1"}:
                raise ValueError(f"expected {self.n_bits}-bit string, got {value!r}")
            return int(value, 2)
        if not 0 <= value < self.N:
            raise ValueError(f"register value {value} out of range for N={self.N}")
        return int(value)


@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray
    layout: RegisterLayout
    oracle_calls: int = 0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != self.layout.dim:
            raise ValueError(f"expected {self.layout.dim} amplitudes, got {amps.shape[0]}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to ``(N, N, 2)`` over (k, x, v)."""
        n = self.layout.N
        return self.amplitudes.reshape(n, n, 2)

    def amplitude(self, k: int | str, x: int | str, v: int) -> complex:
        lay = self.layout
        return complex(self.tensor()[lay.index(k), lay.index(x), v])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def _evolve(self, tensor: np.ndarray, extra_calls: int = 0) -> StateVector:
        return StateVector(tensor.reshape(-1), self.layout, self.oracle_calls + extra_calls)


@dataclass(frozen=True)
class MeasurementRecord:
    register: Register
    outcome: str
    probability: float
    state: StateVector = field(repr=False)


def prepare_input(layout: RegisterLayout) -> StateVector:
    """Uniform superposition over K and X with V in (|0> - |1>)/sqrt(2)."""
    n = layout.N
    amp = 1.0 / (n * math.sqrt(2.0))
    tensor = np.empty((n, n, 2), dtype=np.complex128)
    tensor[..., 0] = amp
    tensor[..., 1] = -amp
    return StateVector(tensor.reshape(-1), layout)


def apply_oracle(state: StateVector) -> StateVector:
    """Reversible oracle |k>|x>|v> -> |k>|x>|v XOR delta(k, x)>.

    On V = (|0> - |1>)/sqrt(2) this flips the phase of every k = x term.
    The returned state counts one more oracle call.
    """
    out = state.tensor().copy()
    diag = np.arange(state.layout.N)
    out[diag, diag, :] = out[diag, diag, ::-1]
    return state._evolve(out, extra_calls=1)


def apply_diffusion(state: StateVector) -> StateVector:
    """Inversion about the mean over register X, separately for each (k, v)."""
    t = state.tensor()
    mean = t.mean(axis=1, keepdims=True)
    return state._evolve(2.0 * mean - t)


def grover_iterations(N: int) -> int:
    return int(math.floor(math.pi / 4.0 * math.sqrt(N)))


def grover_iterate(state: StateVector, iterations: int) -> StateVector:
    for _ in range(iterations):
        state = apply_diffusion(apply_oracle(state))
    return state


def grover_run(layout: RegisterLayout, iterations: int | None = None) -> StateVector:
    """Prepare the input state and apply floor(pi/4 sqrt N) oracle+diffusion rounds."""
    r = grover_iterations(layout.N) if iterations is None else iterations
    state = grover_iterate(prepare_input(layout), r)
    if not v_is_minus(state):
        raise AssertionError("register V left the (|0> - |1>)/sqrt(2) state")
    return state


def v_is_minus(state: StateVector, tol: float = EXACT_TOL) -> bool:
    """True when V factors out as (|0> - |1>)/sqrt(2)."""
    t = state.tensor()
    return bool(np.allclose(t[..., 1], -t[..., 0], rtol=0.0, atol=tol))


def register_distribution(state: StateVector, register: Register) -> np.ndarray:
    probs = np.abs(state.tensor()) ** 2
    if register == "K":
        return probs.sum(axis=(1, 2))
    if register == "X":
        return probs.sum(axis=(0, 2))
    raise ValueError(f"register must be 'K' or 'X', got {register!r}")


def joint_distribution(state: StateVector) -> np.ndarray:
    """P(k, x) as an ``(N, N)`` array, V traced out."""
    return (np.abs(state.tensor()) ** 2).sum(axis=2)


def measure(
    state: StateVector,
    register: Register,
    rng: np.random.Generator,
    outcome: int | str | None = None,
) -> MeasurementRecord:
    """Projective measurement of K or X with Born-rule sampling.

    ``outcome`` forces the result (the state is still projected and
    renormalized); it must have nonzero probability.
    """
    probs = register_distribution(state, register)
    total = probs.sum()
    if total <= EXACT_TOL:
        raise MeasurementError(f"register {register} has zero total probability")
    probs = probs / total
    if outcome is None:
        idx = int(rng.choice(len(probs), p=probs))
    else:
        idx = state.layout.index(outcome)
        if probs[idx] <= EXACT_TOL:
            raise MeasurementError(
                f"forced outcome {state.layout.bits(idx)} on {register} has zero probability"
            )
    p = float(probs[idx])
    t = np.zeros_like(state.tensor())
    if register == "K":
        t[idx] = state.tensor()[idx]
    else:
        t[:, idx] = state.tensor()[:, idx]
    t /= np.linalg.norm(t)
    collapsed = StateVector(t.reshape(-1), state.layout, state.oracle_calls)
    return MeasurementRecord(register, state.layout.bits(idx), p, collapsed)


def sample_joint(state: StateVector, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Counts of (k, x) outcomes from ``shots`` measurements of K then X.

    Sequential K-then-X measurement has the same joint law as sampling
    the (K, X) marginal directly, which is what this does.
    """
    joint = joint_distribution(state)
    flat = joint.reshape(-1) / joint.sum()
    draws = rng.choice(flat.size, size=shots, p=flat)
    return np.bincount(draws, minlength=flat.size).reshape(joint.shape)


def qubit_populations(state: StateVector) -> PopulationVector:
    lay = state.layout
    probs = (np.abs(state.amplitudes) ** 2).reshape((2,) * lay.n_qubits)
    values = {}
    for axis, name in enumerate(lay.qubit_names):
        others = tuple(a for a in range(lay.n_qubits) if a != axis)
        p0, p1 = probs.sum(axis=others)
        values[name] = (float(p0), float(p1))
    return PopulationVector(values)


def conditional_success(state: StateVector, k: int | str) -> float:
    """P(measuring X gives x = k | measuring K gave k)."""
    idx = state.layout.index(k)
    probs = np.abs(state.tensor()) ** 2
    pk = probs[idx].sum()
    if pk <= EXACT_TOL:
        raise MeasurementError(f"K outcome {state.layout.bits(idx)} has zero probability")
    return float(probs[idx, idx].sum() / pk)


def success_probability(state: StateVector) -> float:
    """Worst case over k of the conditional probability that X yields k."""
    return min(conditional_success(state, k) for k in range(state.layout.N))
