"""Evolution of probability tables under force schedules.

Zero force leaves every row unchanged. Under a force schedule, the
probability of moving in direction j (j = 1..6) changes per step by
gamma * f_n(j); the rest probability absorbs the complement so each row
still sums to exactly 1. Rows that leave [0, 1] are a hard error, never
clamped: such a schedule is outside the model's validity range.

The resultant force along axis i is f_n(i) - f_n(i+3). It equals
beta * a(n) with beta = tau^2 / (eps * gamma), which is the model's
second law; `newton2_residual` checks it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import IndexOutOfRange, ProbabilityOverflow
from .rational import format_rational, parse_rational
from .tables import StepProbabilityTable, check_row
from .walk import LatticeConfig, Vec3, acceleration, vsub, vscale

DIRECTIONS = 6

ForceVector = tuple[Fraction, ...]  # f(1)..f(6)


def check_force_vector(values: Iterable) -> ForceVector:
    vec = tuple(Fraction(v) for v in values)
    if len(vec) != DIRECTIONS:
        raise ValueError(f"a force vector needs {DIRECTIONS} entries, got {len(vec)}")
    return vec


@dataclass(frozen=True)
class ForceSchedule:
    """Per-step directional forces and the coupling constant gamma."""

    gamma: Fraction
    entries: tuple[ForceVector, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gamma", Fraction(self.gamma))
        object.__setattr__(
            self, "entries", tuple(check_force_vector(e) for e in self.entries)
        )
        if self.gamma <= 0:
            raise ValueError(f"gamma must be positive: {self.gamma}")

    def __len__(self) -> int:
        return len(self.entries)

    def force(self, n: int) -> ForceVector:
        if not 0 <= n < len(self.entries):
            raise IndexOutOfRange(
                f"step {n} outside schedule of length {len(self.entries)}"
            )
        return self.entries[n]

    def is_constant(self) -> bool:
        return len(set(self.entries)) <= 1

    @classmethod
    def constant(cls, gamma, f: Iterable, steps: int) -> "ForceSchedule":
        return cls(Fraction(gamma), (check_force_vector(f),) * int(steps))

    @classmethod
    def from_json_dict(cls, data: dict) -> "ForceSchedule":
        """Parse either explicit steps or a constant-force shorthand.

        Explicit: {"gamma": "1/100", "steps": [{"f": ["0","0","0","0","0","0"]}, ...]}
        Constant: {"gamma": "1/100", "constant_f": [...], "steps_count": N}
        """
        gamma = parse_rational(data["gamma"])
        if "constant_f" in data:
            return cls.constant(
                gamma,
                [parse_rational(v) for v in data["constant_f"]],
                int(data["steps_count"]),
            )
        entries = [
            tuple(parse_rational(v) for v in step["f"]) for step in data["steps"]
        ]
        return cls(gamma, tuple(entries))

    def to_json_dict(self) -> dict:
        return {
            "gamma": format_rational(self.gamma),
            "steps": [{"f": [format_rational(v) for v in e]} for e in self.entries],
        }


def evolve_free(
    table: StepProbabilityTable, from_step: int, to_step: int
) -> StepProbabilityTable:
    """Propagate row `from_step` unchanged through `to_step`."""
    if not 0 <= from_step <= to_step < table.horizon:
        raise IndexOutOfRange(
            f"need 0 <= from_step <= to_step < {table.horizon}, "
            f"got {from_step}..{to_step}"
        )
    rows = list(table.rows)
    rows[from_step : to_step + 1] = [rows[from_step]] * (to_step - from_step + 1)
    return StepProbabilityTable(rows)


def evolve_forced(
    table: StepProbabilityTable, schedule: ForceSchedule
) -> StepProbabilityTable:
    """Evolve row 0 of `table` through the schedule.

    Row n+1 is row n with gamma * f_n(j) added at each direction j and
    the rest probability set to the complement. The result has
    len(schedule) + 1 rows. Raises ProbabilityOverflow at the first
    entry outside [0, 1].
    """
    gamma = schedule.gamma
    rows = [table.row(0)]
    one = Fraction(1)
    for n, force in enumerate(schedule.entries):
        prev = rows[-1]
        moving = [prev[j] + gamma * force[j - 1] for j in range(1, 7)]
        rest = one - sum(moving)
        nxt = (rest, *moving)
        for j, p in enumerate(nxt):
            if not 0 <= p <= one:
                raise ProbabilityOverflow(n + 1, j, p)
        rows.append(nxt)
    return StepProbabilityTable(rows)


def resultant_force(schedule: ForceSchedule, n: int) -> Vec3:
    """Net force at step n: componentwise f_n(i) - f_n(i+3)."""
    f = schedule.force(n)
    return (f[0] - f[3], f[1] - f[4], f[2] - f[5])


def beta(cfg: LatticeConfig, gamma: Fraction) -> Fraction:
    """Proportionality constant between force and acceleration.

    beta = tau^2 / (eps * gamma); positive whenever the config and
    gamma are valid, and plays the role of the particle's mass.
    """
    gamma = Fraction(gamma)
    if gamma <= 0:
        raise ValueError(f"gamma must be positive: {gamma}")
    return cfg.tau * cfg.tau / (cfg.eps * gamma)


def newton2_residual(
    evolved: StepProbabilityTable,
    schedule: ForceSchedule,
    cfg: LatticeConfig,
    n: int,
) -> Vec3:
    """F(n) - beta * a(n) for a table evolved under `schedule`.

    Exactly the zero vector whenever `evolved` came from
    `evolve_forced` with this schedule.
    """
    force = resultant_force(schedule, n)
    acc = acceleration(n, evolved, cfg)
    return vsub(force, vscale(beta(cfg, schedule.gamma), acc))


def constant_force_closed_form(
    row0: Iterable,
    f: Iterable,
    gamma,
    cfg: LatticeConfig,
    n: int,
) -> Vec3:
    """Mean position after n steps under a constant force, in closed form.

    With a_i = gamma * [f(i) - f(i+3)] and b_i = p_0(i) - p_0(i+3), the
    mean path is eps * n * ((n - 1)/2 * a + b): a parabola in the step
    index. Validates that every row the mean at step n depends on stays
    inside [0, 1] (propagating ProbabilityOverflow), but the returned
    value comes from the formula alone.
    """
    row = check_row(row0)
    force = check_force_vector(f)
    gamma = Fraction(gamma)
    if n < 0:
        raise ValueError(f"n must be >= 0: {n}")
    if n > 1:
        _check_constant_evolution(row, force, gamma, n - 1)
    a = tuple(gamma * (force[i] - force[i + 3]) for i in range(3))
    b = tuple(row[i + 1] - row[i + 4] for i in range(3))
    half = Fraction(n - 1, 2)
    return tuple(cfg.eps * n * (half * a[i] + b[i]) for i in range(3))  # type: ignore[return-value]


def _constant_row_at(row, force: ForceVector, gamma: Fraction, k: int):
    """Row after k constant-force steps; every entry is linear in k."""
    moving = [row[j] + k * gamma * force[j - 1] for j in range(1, 7)]
    return (Fraction(1) - sum(moving), *moving)


def _check_constant_evolution(row, force, gamma, steps: int) -> None:
    """Raise like evolve_forced would if any of rows 1..steps leaves
    [0, 1]. Entries are linear in the step index, so the endpoint row
    decides validity; the scan runs only to locate the first offender.
    """
    last = _constant_row_at(row, force, gamma, steps)
    if all(0 <= p <= 1 for p in last):
        return
    for k in range(1, steps + 1):
        candidate = _constant_row_at(row, force, gamma, k)
        for j, p in enumerate(candidate):
            if not 0 <= p <= 1:
                raise ProbabilityOverflow(k, j, p)
    raise AssertionError("endpoint row invalid but no offending step found")
