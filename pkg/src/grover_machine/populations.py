"""Single-qubit populations, shared by the state-vector and machine sides."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping


@dataclass(frozen=True)
class PopulationVector:
    """Diagonal of each qubit's reduced density operator.

    ``values[name] == (p00, p11)``. Names listed in ``indeterminate`` came from
    a 0/0 coordinate ratio and carry the symmetric default (1/2, 1/2).
    """

    values: Mapping[str, tuple[float, float]]
    indeterminate: frozenset[str] = field(default_factory=frozenset)

    def __getitem__(self, qubit: str) -> tuple[float, float]:
        return self.values[qubit]

    def __iter__(self) -> Iterator[str]:
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def is_indeterminate(self, qubit: str) -> bool:
        return qubit in self.indeterminate

    def as_dict(self) -> dict[str, list[float]]:
        return {name: [float(p0), float(p1)] for name, (p0, p1) in self.values.items()}
