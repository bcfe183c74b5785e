"""Constraint machine built from coordinate-labeled truth tables.

Each truth table ``i`` gets one nonnegative coordinate ``C_ij`` per row and
shares an auxiliary coordinate ``Q`` with every other table.  Per table the
machine enforces

    Q = sum_j C_ij        and        Q**chi = sum_j C_ij**chi   (chi > 1)

and linking equations make the rows that move agree on shared variables.
By the strict power-mean inequality the pair of per-table equations admits
at most one positive coordinate per table, so every solution with Q > 0 is
a selection of one row per table: a machine movement.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import (
    ConsistencyError,
    CoordinateError,
    InvalidExponentError,
    MappingError,
    NetworkParseError,
    NoMovementError,
)
from .populations import PopulationVector

BUNDLED_NETWORKS = ("paper_n4.network",)
CHECK_TOL = 1e-9


# --------------------------------------------------------------------------
# Boolean networks


@dataclass(frozen=True)
class TruthTable:
    inputs: tuple[str, ...]
    output: str
    rows: tuple[tuple[tuple[int, ...], int], ...]

    @property
    def variables(self) -> tuple[str, ...]:
        return self.inputs + (self.output,)

    def row_values(self, j: int) -> dict[str, int]:
        bits, out = self.rows[j]
        values = dict(zip(self.inputs, bits))
        values[self.output] = out
        return values

    def value(self, j: int, variable: str) -> int:
        bits, out = self.rows[j]
        if variable == self.output:
            return out
        return bits[self.inputs.index(variable)]


@dataclass(frozen=True)
class BooleanNetwork:
    variables: tuple[str, ...]
    tables: tuple[TruthTable, ...]

    def tables_with(self, variable: str) -> list[int]:
        return [i for i, t in enumerate(self.tables) if variable in t.variables]

    def defining_table(self, variable: str) -> int | None:
        for i, t in enumerate(self.tables):
            if t.output == variable:
                return i
        return None

    @property
    def n_rows(self) -> int:
        return sum(len(t.rows) for t in self.tables)


def _bit(value, where: str) -> int:
    if isinstance(value, bool) or value not in (0, 1):
        raise NetworkParseError(f"{where}: expected bit 0 or 1, got {value!r}")
    return int(value)


def _name_list(value, where: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) and v for v in value):
        raise NetworkParseError(f"{where}: expected a list of variable names")
    return tuple(value)


def parse_network(text: str) -> BooleanNetwork:
    """Parse and validate a network file (JSON object syntax)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkParseError(f"malformed network file: {exc}") from None
    if not isinstance(doc, dict) or set(doc) != {"variables", "tables"}:
        raise NetworkParseError('network file must be an object with keys "variables" and "tables"')

    variables = _name_list(doc["variables"], "variables")
    if len(set(variables)) != len(variables):
        dup = next(v for v in variables if variables.count(v) > 1)
        raise NetworkParseError(f"variables: duplicate name {dup!r}")
    known = set(variables)

    if not isinstance(doc["tables"], list):
        raise NetworkParseError("tables: expected a list")
    tables = []
    outputs: dict[str, int] = {}
    for i, raw in enumerate(doc["tables"]):
        where = f"tables[{i}]"
        if not isinstance(raw, dict) or set(raw) != {"inputs", "output", "rows"}:
            raise NetworkParseError(f'{where}: expected keys "inputs", "output", "rows"')
        inputs = _name_list(raw["inputs"], f"{where}.inputs")
        output = raw["output"]
        if not isinstance(output, str) or not output:
            raise NetworkParseError(f"{where}.output: expected a variable name")
        for name in inputs + (output,):
            if name not in known:
                raise NetworkParseError(f"{where}: unresolved variable {name!r}")
        if len(set(inputs + (output,))) != len(inputs) + 1:
            raise NetworkParseError(f"{where}: a variable appears twice in the same table")
        if output in outputs:
            raise NetworkParseError(
                f"{where}: variable {output!r} is already the output of tables[{outputs[output]}]"
            )
        outputs[output] = i

        if not isinstance(raw["rows"], list) or not raw["rows"]:
            raise NetworkParseError(f"{where}.rows: expected a nonempty list")
        rows = []
        seen: dict[tuple[int, ...], int] = {}
        for j, row in enumerate(raw["rows"]):
            rwhere = f"{where}.rows[{j}]"
            if not isinstance(row, dict) or set(row) != {"in", "out"}:
                raise NetworkParseError(f'{rwhere}: expected keys "in" and "out"')
            if not isinstance(row["in"], list) or len(row["in"]) != len(inputs):
                raise NetworkParseError(f"{rwhere}.in: expected {len(inputs)} bits")
            bits = tuple(_bit(b, f"{rwhere}.in") for b in row["in"])
            if bits in seen:
                raise NetworkParseError(
                    f"{rwhere}: input tuple {list(bits)} duplicates {where}.rows[{seen[bits]}]"
                )
            seen[bits] = j
            rows.append((bits, _bit(row["out"], f"{rwhere}.out")))
        tables.append(TruthTable(inputs, output, tuple(rows)))
    return BooleanNetwork(variables, tuple(tables))


def dump_network(network: BooleanNetwork) -> str:
    """Canonical text form; ``parse_network(dump_network(n)) == n``."""

    def names(seq: Iterable[str]) -> str:
        return json.dumps(list(seq), ensure_ascii=False)

    lines = ["{", f'  "variables": {names(network.variables)},', '  "tables": [']
    for i, table in enumerate(network.tables):
        lines += [
            "    {",
            f'      "inputs": {names(table.inputs)},',
            f'      "output": {json.dumps(table.output, ensure_ascii=False)},',
            '      "rows": [',
        ]
        for j, (bits, out) in enumerate(table.rows):
            sep = "," if j < len(table.rows) - 1 else ""
            lines.append(f'        {{"in": {json.dumps(list(bits))}, "out": {out}}}{sep}')
        lines += ["      ]", "    }" + ("," if i < len(network.tables) - 1 else "")]
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def read_network_text(path: str | Path) -> str:
    """Read a network file, falling back to the bundled copies by file name."""
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    if p.name in BUNDLED_NETWORKS and len(p.parts) == 1:
        return resources.files("grover_machine").joinpath("data", p.name).read_text(encoding="utf-8")
    raise FileNotFoundError(f"network file not found: {path}")


def load_network(path: str | Path) -> BooleanNetwork:
    return parse_network(read_network_text(path))


def delta_network() -> BooleanNetwork:
    """The bundled two-bit Kronecker-delta network (three tables, twelve rows)."""
    return load_network("paper_n4.network")


# --------------------------------------------------------------------------
# Coordinates and equations


_COORD_RE = re.compile(r"^C_?(\d)(\d)$|^C_?(\d+)[_,](\d+)$")


class CoordinateId(NamedTuple):
    """``C_ij`` for table ``i``, row ``j``; both ``None`` denotes ``Q``."""

    table: int | None = None
    row: int | None = None

    @classmethod
    def parse(cls, label: str) -> CoordinateId:
        label = label.strip()
        if label == "Q":
            return Q
        m = _COORD_RE.match(label)
        if not m:
            raise CoordinateError(f"bad coordinate label {label!r} (expected Q, Cij or Ci_j)")
        i, j = (m.group(1), m.group(2)) if m.group(1) is not None else (m.group(3), m.group(4))
        return cls(int(i), int(j))

    @property
    def is_q(self) -> bool:
        return self.table is None

    def __str__(self) -> str:
        if self.is_q:
            return "Q"
        if self.table < 10 and self.row < 10:
            return f"C{self.table}{self.row}"
        return f"C{self.table}_{self.row}"


Q = CoordinateId()


def _coord(value: CoordinateId | str) -> CoordinateId:
    return value if isinstance(value, CoordinateId) else CoordinateId.parse(value)


def _check_coordinate(network: BooleanNetwork, c: CoordinateId) -> None:
    if c.is_q:
        return
    if not 0 <= c.table < len(network.tables) or not 0 <= c.row < len(network.tables[c.table].rows):
        raise CoordinateError(f"coordinate {c} is outside the network's tables")


@dataclass(frozen=True)
class LinkingEquation:
    """``sum(left) == sum(right)``; rows of two tables where ``variable`` is 0."""

    variable: str
    left: tuple[CoordinateId, ...]
    right: tuple[CoordinateId, ...]

    def __str__(self) -> str:
        return " + ".join(map(str, self.left)) + " = " + " + ".join(map(str, self.right))


@dataclass(frozen=True)
class TableEquation:
    """One sum (``Q = sum C``) or power (``Q**chi = sum C**chi``) equation."""

    kind: str
    table: int
    coordinates: tuple[CoordinateId, ...]


def derive_linking_equations(network: BooleanNetwork) -> list[LinkingEquation]:
    """One equation per (shared variable, other table).

    The anchor is the table defining the variable (or the first table that
    mentions it).  Only the variable = 0 side is emitted; the = 1 side
    follows from the sum equations.
    """
    eqs = []
    for var in network.variables:
        mentions = network.tables_with(var)
        if len(mentions) < 2:
            continue
        anchor = network.defining_table(var)
        if anchor is None:
            anchor = mentions[0]

        def zero_rows(i: int) -> tuple[CoordinateId, ...]:
            t = network.tables[i]
            return tuple(CoordinateId(i, j) for j in range(len(t.rows)) if t.value(j, var) == 0)

        for other in mentions:
            if other != anchor:
                eqs.append(LinkingEquation(var, zero_rows(anchor), zero_rows(other)))
    return eqs


@dataclass(frozen=True)
class ConstraintMachine:
    network: BooleanNetwork
    chi: float
    linking_equations: tuple[LinkingEquation, ...]

    @property
    def sum_equations(self) -> tuple[TableEquation, ...]:
        return tuple(TableEquation("sum", i, self.table_coordinates(i)) for i in range(len(self.network.tables)))

    @property
    def power_equations(self) -> tuple[TableEquation, ...]:
        return tuple(TableEquation("power", i, self.table_coordinates(i)) for i in range(len(self.network.tables)))

    def table_coordinates(self, i: int) -> tuple[CoordinateId, ...]:
        return tuple(CoordinateId(i, j) for j in range(len(self.network.tables[i].rows)))

    @cached_property
    def coordinates(self) -> tuple[CoordinateId, ...]:
        return (Q,) + tuple(c for i in range(len(self.network.tables)) for c in self.table_coordinates(i))

    @cached_property
    def _coordinate_set(self) -> frozenset[CoordinateId]:
        return frozenset(self.coordinates)


def build_machine(network: BooleanNetwork, chi: float = 2.0) -> ConstraintMachine:
    if not np.isfinite(chi) or chi <= 1:
        raise InvalidExponentError(f"exponent chi must be > 1, got {chi}")
    return ConstraintMachine(network, float(chi), tuple(derive_linking_equations(network)))


# --------------------------------------------------------------------------
# Movements


@dataclass(frozen=True)
class MachineMovement:
    """One moving row per table, with movers and Q normalized to 1."""

    rows: tuple[int, ...]
    assignment: Mapping[str, int] = field(compare=False)

    @property
    def movers(self) -> tuple[CoordinateId, ...]:
        return tuple(CoordinateId(i, j) for i, j in enumerate(self.rows))

    def coordinate_values(self, machine: ConstraintMachine) -> dict[CoordinateId, int]:
        values = {c: 0 for c in machine.coordinates}
        values[Q] = 1
        for c in self.movers:
            values[c] = 1
        return values

    def label(self) -> str:
        return "{" + ", ".join(map(str, self.movers)) + "}"


def movement_to_assignment(network: BooleanNetwork, rows: MachineMovement | Sequence[int]) -> dict[str, int]:
    """Variable assignment induced by one selected row per table."""
    if isinstance(rows, MachineMovement):
        rows = rows.rows
    rows = tuple(rows)
    if len(rows) != len(network.tables):
        raise ConsistencyError(f"expected one row per table ({len(network.tables)}), got {len(rows)}")
    assignment: dict[str, int] = {}
    for i, j in enumerate(rows):
        table = network.tables[i]
        if not 0 <= j < len(table.rows):
            raise ConsistencyError(f"row {j} out of range for table {i}")
        for var, bit in table.row_values(j).items():
            if assignment.setdefault(var, bit) != bit:
                raise ConsistencyError(
                    f"C{i}{j} sets {var}={bit}, contradicting {var}={assignment[var]} from an earlier row"
                )
    return assignment


def movement_from_labels(network: BooleanNetwork, labels: Iterable[CoordinateId | str]) -> tuple[int, ...]:
    """Row selection from mover labels such as ``["C00", "C10", "C23"]``."""
    rows: dict[int, int] = {}
    for label in labels:
        c = _coord(label)
        if c.is_q:
            raise CoordinateError("Q is not a row coordinate")
        _check_coordinate(network, c)
        if c.table in rows:
            raise ConsistencyError(f"two movers in table {c.table}")
        rows[c.table] = c.row
    if set(rows) != set(range(len(network.tables))):
        raise ConsistencyError("a movement needs exactly one mover per table")
    return tuple(rows[i] for i in range(len(network.tables)))


def _linking_ok(eq: LinkingEquation, chosen: Mapping[int, int]) -> bool | None:
    """Evaluate under 0/1 movers; ``None`` while a referenced table is unassigned."""
    tables = {c.table for c in eq.left + eq.right}
    if not tables <= chosen.keys():
        return None
    lhs = sum(chosen[c.table] == c.row for c in eq.left)
    rhs = sum(chosen[c.table] == c.row for c in eq.right)
    return lhs == rhs


def enumerate_movements(machine: ConstraintMachine, push: CoordinateId | str = Q) -> list[MachineMovement]:
    """All 0/1 solutions of the machine's equations with Q = 1.

    Solutions are built table by table, pruning on linking equations as soon
    as every table they reference has a mover.  Pushing ``C_ij`` fixes that
    row as table ``i``'s mover.  Order is lexicographic in the row indices.
    """
    push = _coord(push)
    net = machine.network
    _check_coordinate(net, push)
    n_tables = len(net.tables)
    choices = [range(len(t.rows)) for t in net.tables]
    if not push.is_q:
        choices[push.table] = range(push.row, push.row + 1)

    # linking equations become checkable once their last table is chosen
    ready: list[list[LinkingEquation]] = [[] for _ in range(n_tables)]
    for eq in machine.linking_equations:
        ready[max(c.table for c in eq.left + eq.right)].append(eq)

    out: list[MachineMovement] = []
    chosen: dict[int, int] = {}

    def extend(i: int) -> None:
        if i == n_tables:
            rows = tuple(chosen[t] for t in range(n_tables))
            out.append(MachineMovement(rows, movement_to_assignment(net, rows)))
            return
        for j in choices[i]:
            chosen[i] = j
            if all(_linking_ok(eq, chosen) for eq in ready[i]):
                extend(i + 1)
            del chosen[i]

    extend(0)
    return out


# --------------------------------------------------------------------------
# Exclusivity check


@dataclass(frozen=True)
class TableCheck:
    table: int
    sum_ok: bool
    power_ok: bool
    n_positive: int


@dataclass(frozen=True)
class ExclusivityReport:
    tables: tuple[TableCheck, ...]
    linking_ok: tuple[bool, ...]

    @property
    def satisfied(self) -> bool:
        return all(t.sum_ok and t.power_ok for t in self.tables) and all(self.linking_ok)

    @property
    def power_violations(self) -> tuple[int, ...]:
        return tuple(t.table for t in self.tables if not t.power_ok)


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= CHECK_TOL * max(1.0, abs(a), abs(b))


def check_exclusivity(
    machine: ConstraintMachine, values: Mapping[CoordinateId | str, float]
) -> ExclusivityReport:
    """Check sum, power and linking equations for real coordinate values.

    Coordinates missing from ``values`` are taken as 0.  Equalities hold
    within a relative tolerance of 1e-9.
    """
    vals: dict[CoordinateId, float] = {c: 0.0 for c in machine.coordinates}
    for key, v in values.items():
        c = _coord(key)
        if c not in machine._coordinate_set:
            _check_coordinate(machine.network, c)
        v = float(v)
        if not v >= 0.0:
            raise CoordinateError(f"coordinate {c} must be nonnegative, got {v}")
        vals[c] = v
    q = vals[Q]
    checks = []
    for i in range(len(machine.network.tables)):
        cs = [vals[CoordinateId(i, j)] for j in range(len(machine.network.tables[i].rows))]
        checks.append(
            TableCheck(
                table=i,
                sum_ok=_close(q, sum(cs)),
                power_ok=_close(q**machine.chi, sum(c**machine.chi for c in cs)),
                n_positive=sum(c > 0 for c in cs),
            )
        )
    links = tuple(
        _close(sum(vals[c] for c in eq.left), sum(vals[c] for c in eq.right))
        for eq in machine.linking_equations
    )
    return ExclusivityReport(tuple(checks), links)


def satisfies_exactly(machine: ConstraintMachine, values: Mapping[CoordinateId, int]) -> bool:
    """Integer check of all equations; valid for integer chi only."""
    chi = int(machine.chi)
    if chi != machine.chi:
        raise InvalidExponentError("exact check needs an integer exponent")
    q = values[Q]
    for i in range(len(machine.network.tables)):
        cs = [values[c] for c in machine.table_coordinates(i)]
        if sum(cs) != q or sum(c**chi for c in cs) != q**chi:
            return False
    return all(
        sum(values[c] for c in eq.left) == sum(values[c] for c in eq.right)
        for eq in machine.linking_equations
    )


# --------------------------------------------------------------------------
# Sampling and populations


def _nonempty(machine: ConstraintMachine, push: CoordinateId | str) -> list[MachineMovement]:
    movements = enumerate_movements(machine, push)
    if not movements:
        raise NoMovementError(f"pushing {_coord(push)} admits no machine movement")
    return movements


def sample_movement(
    machine: ConstraintMachine, push: CoordinateId | str, rng: np.random.Generator
) -> MachineMovement:
    """Uniform draw over the movements available under ``push``."""
    movements = _nonempty(machine, push)
    return movements[int(rng.integers(len(movements)))]


def sample_movement_counts(
    machine: ConstraintMachine, push: CoordinateId | str, rng: np.random.Generator, trials: int
) -> tuple[list[MachineMovement], np.ndarray]:
    """``trials`` uniform draws; returns the movement list and per-movement counts."""
    movements = _nonempty(machine, push)
    draws = rng.integers(len(movements), size=trials)
    return movements, np.bincount(draws, minlength=len(movements))


def coordinate_populations(
    network: BooleanNetwork, values: Mapping[CoordinateId, float], variables: Iterable[str] | None = None
) -> PopulationVector:
    """Populations from coordinate ratios: p00 = sum(C_ij with var = 0) / Q.

    Each variable is read off the first table that mentions it.  With
    Q = 0 every ratio is 0/0; the result is then (1/2, 1/2), flagged
    indeterminate.
    """
    names = network.variables if variables is None else tuple(variables)
    q = float(values.get(Q, 0.0))
    pops: dict[str, tuple[float, float]] = {}
    indeterminate = set()
    for var in names:
        mentions = network.tables_with(var)
        if not mentions:
            raise MappingError(f"variable {var!r} does not appear in any truth table")
        if q == 0.0:
            pops[var] = (0.5, 0.5)
            indeterminate.add(var)
            continue
        i = mentions[0]
        table = network.tables[i]
        zero = sum(float(values.get(CoordinateId(i, j), 0.0)) for j in range(len(table.rows)) if table.value(j, var) == 0)
        one = sum(float(values.get(CoordinateId(i, j), 0.0)) for j in range(len(table.rows)) if table.value(j, var) == 1)
        pops[var] = (zero / q, one / q)
    return PopulationVector(pops, frozenset(indeterminate))


def movement_populations(
    machine: ConstraintMachine, movement: MachineMovement | None, variables: Iterable[str] | None = None
) -> PopulationVector:
    """Populations for a movement, or for the disassembled machine if ``movement`` is None."""
    values = {} if movement is None else movement.coordinate_values(machine)
    return coordinate_populations(machine.network, values, variables)


def register_value(assignment: Mapping[str, int], prefix: str, n_bits: int) -> int:
    """Integer held by variables ``prefix0 .. prefix{n-1}``, bit 0 most significant."""
    try:
        bits = [assignment[f"{prefix}{b}"] for b in range(n_bits)]
    except KeyError as exc:
        raise MappingError(f"assignment has no variable {exc.args[0]!r}") from None
    return int("".join(map(str, bits)), 2)

