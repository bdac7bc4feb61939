"""Single-period unit commitment: data model, cost and feasibility semantics,
an exact economic dispatch kernel, and a brute-force enumeration oracle.

The problem is the classic one: pick on/off states ``y_i`` and outputs ``p_i``
minimizing ``sum_i (a_i y_i + b_i p_i + c_i p_i^2)`` subject to the power
balance ``sum_i p_i = load`` and box limits ``p_min_i y_i <= p_i <= p_max_i y_i``.

Dispatch uses marginal-price bisection: for a trial price ``mu`` each committed
unit produces ``clamp((mu - b) / (2 c), p_min, p_max)``; the price is bisected
until the balance closes.  Units with ``c == 0`` respond with a step at
``mu == b`` and are settled by a final greedy allocation inside the last
bisection bracket, which keeps the kernel exact for them too.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence, TextIO

from .errors import (
    DuplicateId,
    Infeasible,
    InfeasibleCommitment,
    InvariantViolation,
    LengthMismatch,
    MalformedRow,
    TooLarge,
)

GENERATOR_CSV_HEADER = ("id", "a", "b", "c", "p_min", "p_max")

#: Hard cap on exhaustive enumeration (2**24 commitments).
ENUMERATION_LIMIT = 24

#: Bisection iterations; enough to exhaust double precision on any bracket.
_BISECT_ITERS = 200


@dataclass(frozen=True)
class GeneratorParams:
    """Cost and capacity data for one generating unit.

    Committing unit ``i`` costs ``a`` per period; generation costs
    ``b * p + c * p**2`` for output ``p`` in MW.  Output must stay in
    ``[p_min, p_max]`` while the unit is on and is zero otherwise.
    """

    id: int
    a: float
    b: float
    c: float
    p_min: float
    p_max: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_min <= self.p_max):
            raise InvariantViolation(
                f"unit {self.id}: need 0 <= p_min <= p_max, "
                f"got p_min={self.p_min}, p_max={self.p_max}"
            )
        if self.c < 0.0:
            raise InvariantViolation(f"unit {self.id}: quadratic cost c={self.c} < 0")

    def generation_cost(self, p: float) -> float:
        """Variable cost of producing ``p`` MW (commitment cost excluded)."""
        return self.b * p + self.c * p * p

    def marginal_cost(self, p: float) -> float:
        return self.b + 2.0 * self.c * p


@dataclass(frozen=True)
class UCInstance:
    """An immutable unit commitment instance: generator fleet plus load."""

    generators: tuple[GeneratorParams, ...]
    load: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "generators", tuple(self.generators))
        if len(self.generators) < 1:
            raise InvariantViolation("instance needs at least one generator")
        if self.load < 0.0:
            raise InvariantViolation(f"load {self.load} < 0")
        ids = [g.id for g in self.generators]
        if ids != list(range(1, len(ids) + 1)):
            raise InvariantViolation(f"unit ids must be 1..N without gaps, got {ids}")

    @property
    def n(self) -> int:
        return len(self.generators)

    def total_p_max(self) -> float:
        return math.fsum(g.p_max for g in self.generators)

    def total_p_min(self) -> float:
        return math.fsum(g.p_min for g in self.generators)


@dataclass(frozen=True)
class Commitment:
    """On/off status per unit; ``bits[i-1]`` is the status of unit ``i``."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bits", tuple(int(b) for b in self.bits))
        if any(b not in (0, 1) for b in self.bits):
            raise InvariantViolation(f"commitment bits must be 0/1, got {self.bits}")

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def bitstring(self) -> str:
        """Most-significant-unit-first rendering, e.g. units (1,1,0,1) -> '1011'."""
        return "".join(str(b) for b in reversed(self.bits))

    @classmethod
    def from_bitstring(cls, s: str) -> "Commitment":
        return cls(tuple(int(ch) for ch in reversed(s)))

    def on_units(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, b in enumerate(self.bits) if b)


@dataclass(frozen=True)
class UCSolution:
    """A commitment with its dispatch and total cost."""

    commitment: Commitment
    dispatch: tuple[float, ...]
    cost: float


@dataclass(frozen=True)
class Violation:
    """One violated constraint with the amount by which it is missed."""

    constraint: str
    unit: int | None
    slack: float


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[Violation, ...]


def parse_generators(source: str | TextIO) -> tuple[GeneratorParams, ...]:
    """Parse generator data from CSV with header ``id,a,b,c,p_min,p_max``.

    Returns units ordered by id (ids must be 1..N with no duplicates or gaps).
    Raises MalformedRow, DuplicateId or InvariantViolation with the offending
    line number in the message.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    rows = [(lineno, row) for lineno, row in enumerate(reader, start=1) if row]
    if not rows:
        raise MalformedRow("line 1: missing header row")
    header_line, header = rows[0]
    if tuple(col.strip() for col in header) != GENERATOR_CSV_HEADER:
        raise MalformedRow(
            f"line {header_line}: expected header {','.join(GENERATOR_CSV_HEADER)}, "
            f"got {','.join(header)}"
        )
    units: dict[int, GeneratorParams] = {}
    for lineno, row in rows[1:]:
        if len(row) != 6:
            raise MalformedRow(f"line {lineno}: expected 6 columns, got {len(row)}")
        try:
            uid = int(row[0])
            a, b, c, p_min, p_max = (float(v) for v in row[1:])
        except ValueError as exc:
            raise MalformedRow(f"line {lineno}: {exc}") from exc
        if uid in units:
            raise DuplicateId(f"line {lineno}: duplicate unit id {uid}")
        try:
            units[uid] = GeneratorParams(uid, a, b, c, p_min, p_max)
        except InvariantViolation as exc:
            raise InvariantViolation(f"line {lineno}: {exc}") from exc
    if not units:
        raise InvariantViolation("no generator rows: an instance needs N >= 1 units")
    ordered = [units[k] for k in sorted(units)]
    if [g.id for g in ordered] != list(range(1, len(ordered) + 1)):
        raise InvariantViolation(
            f"unit ids must be 1..N without gaps, got {sorted(units)}"
        )
    return tuple(ordered)


def _require_length(instance: UCInstance, seq: Sequence, what: str) -> None:
    if len(seq) != instance.n:
        raise LengthMismatch(f"{what} has length {len(seq)}, expected {instance.n}")


def evaluate_cost(
    instance: UCInstance, commitment: Commitment, dispatch: Sequence[float]
) -> float:
    """Total cost ``sum_i (a_i y_i + b_i p_i + c_i p_i^2)``."""
    _require_length(instance, commitment.bits, "commitment")
    _require_length(instance, dispatch, "dispatch")
    return math.fsum(
        g.a * y + g.b * p + g.c * p * p
        for g, y, p in zip(instance.generators, commitment.bits, dispatch)
    )


def check_feasible(
    instance: UCInstance,
    commitment: Commitment,
    dispatch: Sequence[float],
    tol: float = 1e-6,
) -> FeasibilityReport:
    """Check power balance and per-unit output limits within ``tol``."""
    _require_length(instance, commitment.bits, "commitment")
    _require_length(instance, dispatch, "dispatch")
    if tol < 0.0:
        raise InvariantViolation(f"tol {tol} < 0")
    violations: list[Violation] = []
    balance_gap = math.fsum(dispatch) - instance.load
    if abs(balance_gap) > tol:
        violations.append(Violation("balance", None, abs(balance_gap)))
    for g, y, p in zip(instance.generators, commitment.bits, dispatch):
        lo = g.p_min * y
        hi = g.p_max * y
        if p < lo - tol:
            violations.append(Violation("p_min", g.id, lo - p))
        if p > hi + tol:
            violations.append(Violation("p_max", g.id, p - hi))
    return FeasibilityReport(not violations, tuple(violations))


def _step_output(b: float, c: float, lo: float, hi: float, mu: float) -> float:
    """Single-unit response to price mu: argmin of b*p + c*p^2 - mu*p on [lo, hi]."""
    if c > 0.0:
        return min(max((mu - b) / (2.0 * c), lo), hi)
    return hi if mu > b else lo


def _dispatch_committed(
    units: Sequence[GeneratorParams], load: float
) -> list[float]:
    """Exact dispatch of ``load`` over committed units via price bisection.

    Assumes sum(p_min) <= load <= sum(p_max); the caller checks that.
    """
    p_min_sum = math.fsum(g.p_min for g in units)
    p_max_sum = math.fsum(g.p_max for g in units)
    if load == p_min_sum:
        return [g.p_min for g in units]
    if load == p_max_sum:
        return [g.p_max for g in units]

    def profile(mu: float) -> list[float]:
        return [_step_output(g.b, g.c, g.p_min, g.p_max, mu) for g in units]

    lo = min(g.b + 2.0 * g.c * g.p_min for g in units) - 1.0
    hi = max(g.b + 2.0 * g.c * g.p_max for g in units) + 1.0
    # Invariant: sum(profile(lo)) <= load <= sum(profile(hi)).
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if math.fsum(profile(mid)) <= load:
            lo = mid
        else:
            hi = mid
    p_lo = profile(lo)
    p_hi = profile(hi)
    # Close the residual gap inside the final bracket.  For smooth units the
    # gap is a few ulps; for c == 0 units sitting exactly at their price step
    # this allocates greedily in unit order across the flat segment.
    need = load - math.fsum(p_lo)
    out = list(p_lo)
    for i in range(len(out)):
        if need <= 0.0:
            break
        room = p_hi[i] - p_lo[i]
        if room <= 0.0:
            continue
        add = min(need, room)
        out[i] += add
        need -= add
    return out


def economic_dispatch(
    instance: UCInstance, commitment: Commitment
) -> tuple[float, ...]:
    """Minimum-cost dispatch of the load over the committed units.

    Raises InfeasibleCommitment when the load falls outside the committed
    capacity range ``[sum p_min, sum p_max]``.
    """
    _require_length(instance, commitment.bits, "commitment")
    on = [g for g, y in zip(instance.generators, commitment.bits) if y]
    p_min_sum = math.fsum(g.p_min for g in on)
    p_max_sum = math.fsum(g.p_max for g in on)
    if not (p_min_sum <= instance.load <= p_max_sum):
        raise InfeasibleCommitment(
            f"load {instance.load} outside committed range "
            f"[{p_min_sum}, {p_max_sum}] of units {[g.id for g in on]}"
        )
    dispatch = [0.0] * instance.n
    if on:
        for g, p in zip(on, _dispatch_committed(on, instance.load)):
            dispatch[g.id - 1] = p
    return tuple(dispatch)


def enumerate_uc(instance: UCInstance) -> UCSolution:
    """Exhaustive ground-truth solve over all 2**N commitments.

    Ties in cost break toward the lexicographically smallest bits tuple
    (unit 1 first).  Raises TooLarge above the enumeration guard and
    Infeasible when no commitment can serve the load.
    """
    n = instance.n
    if n > ENUMERATION_LIMIT:
        raise TooLarge(f"N={n} exceeds enumeration limit {ENUMERATION_LIMIT}")
    gens = instance.generators
    best_cost = math.inf
    best: UCSolution | None = None
    for mask in range(1 << n):
        bits = tuple((mask >> i) & 1 for i in range(n))
        on = [g for g, y in zip(gens, bits) if y]
        p_min_sum = math.fsum(g.p_min for g in on)
        p_max_sum = math.fsum(g.p_max for g in on)
        if not (p_min_sum <= instance.load <= p_max_sum):
            continue
        dispatch = [0.0] * n
        if on:
            for g, p in zip(on, _dispatch_committed(on, instance.load)):
                dispatch[g.id - 1] = p
        commitment = Commitment(bits)
        cost = evaluate_cost(instance, commitment, dispatch)
        if cost < best_cost or (
            cost == best_cost and best is not None and bits < best.commitment.bits
        ):
            best_cost = cost
            best = UCSolution(commitment, tuple(dispatch), cost)
    if best is None:
        raise Infeasible(f"no commitment can serve load {instance.load}")
    return best


def solution_to_csv(solution: UCSolution) -> str:
    """Render a solution as ``unit,committed,p_mw`` rows plus a cost comment."""
    lines = ["unit,committed,p_mw"]
    for i, (y, p) in enumerate(zip(solution.commitment.bits, solution.dispatch)):
        lines.append(f"{i + 1},{y},{p!r}")
    lines.append(f"# cost={solution.cost!r}")
    return "\n".join(lines) + "\n"


def solution_from_csv(text: str) -> UCSolution:
    """Parse the output of :func:`solution_to_csv`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != "unit,committed,p_mw":
        raise MalformedRow("line 1: expected header unit,committed,p_mw")
    cost: float | None = None
    bits: list[int] = []
    dispatch: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("#"):
            if "cost=" not in line:
                raise MalformedRow(f"line {lineno}: expected '# cost=<value>'")
            cost = float(line.split("cost=", 1)[1])
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise MalformedRow(f"line {lineno}: expected 3 columns, got {len(parts)}")
        try:
            unit = int(parts[0])
            bits.append(int(parts[1]))
            dispatch.append(float(parts[2]))
        except ValueError as exc:
            raise MalformedRow(f"line {lineno}: {exc}") from exc
        if unit != len(bits):
            raise MalformedRow(f"line {lineno}: units out of order")
    if cost is None:
        raise MalformedRow("missing trailing '# cost=<value>' line")
    return UCSolution(Commitment(tuple(bits)), tuple(dispatch), cost)
