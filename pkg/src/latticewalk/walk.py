"""Exact moments of the lattice walk.

The walk lives on the cubic lattice with pitch eps = c * tau. At step n
the displacement is one of seven vectors: rest, or +-eps along a
coordinate axis, chosen with the probabilities of table row n. All
quantities here are expectation-level and computed directly from the
table in exact rational arithmetic; nothing is sampled and nothing is
enumerated. Per-trajectory sampling lives in the simulator module.

Symbol-to-direction convention: symbols 1, 2, 3 step along +x, +y, +z
and symbols 4, 5, 6 along -x, -y, -z; symbol 0 rests.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .errors import DepthExceedsTable
from .rational import format_rational, rational_to_decimal
from .tables import StepProbabilityTable

Vec3 = tuple[Fraction, Fraction, Fraction]

ZERO3: Vec3 = (Fraction(0), Fraction(0), Fraction(0))


@dataclass(frozen=True)
class LatticeConfig:
    """Time unit tau, speed scale c, derived pitch eps = c * tau."""

    tau: Fraction
    c: Fraction
    horizon: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tau", Fraction(self.tau))
        object.__setattr__(self, "c", Fraction(self.c))
        if self.tau <= 0:
            raise ValueError(f"tau must be positive: {self.tau}")
        if self.c <= 0:
            raise ValueError(f"c must be positive: {self.c}")
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0: {self.horizon}")

    @property
    def eps(self) -> Fraction:
        return self.c * self.tau


def vadd(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def vsub(a: Vec3, b: Vec3) -> Vec3:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def vscale(k: Fraction, a: Vec3) -> Vec3:
    return (k * a[0], k * a[1], k * a[2])


def dot(a: Vec3, b: Vec3) -> Fraction:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


def step_vector(j: int, cfg: LatticeConfig) -> Vec3:
    """Displacement for symbol j: rest, or +-eps along an axis."""
    j = int(j)
    if not 0 <= j <= 6:
        raise ValueError(f"symbol out of range 0..6: {j}")
    if j == 0:
        return ZERO3
    axis = (j - 1) % 3
    sign = 1 if j <= 3 else -1
    vec = [Fraction(0)] * 3
    vec[axis] = sign * cfg.eps
    return tuple(vec)  # type: ignore[return-value]


def step_mean(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> Vec3:
    """Mean displacement at step n: eps * sum_i [p_n(i) - p_n(i+3)] e_i."""
    row = table.row(n)
    return (
        cfg.eps * (row[1] - row[4]),
        cfg.eps * (row[2] - row[5]),
        cfg.eps * (row[3] - row[6]),
    )


def velocity(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> Vec3:
    """Mean displacement per unit time at step n."""
    return vscale(1 / cfg.tau, step_mean(n, table, cfg))


def acceleration(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> Vec3:
    """Velocity change per unit time: (v(n+1) - v(n)) / tau."""
    return vscale(
        1 / cfg.tau,
        vsub(velocity(n + 1, table, cfg), velocity(n, table, cfg)),
    )


def mean_position(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> Vec3:
    """Mean position after n steps; the sum of the first n step means."""
    if n < 0:
        raise ValueError(f"n must be >= 0: {n}")
    if n > table.horizon:
        raise DepthExceedsTable(n - 1, table.horizon)
    pos = ZERO3
    for k in range(n):
        pos = vadd(pos, step_mean(k, table, cfg))
    return pos


def step_trace(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> Fraction:
    """Sum of coordinate variances of the step-n displacement.

    Computed as E(X, X) - (M, M) with E(X, X) = eps^2 * (1 - p_n(0))
    and M the step mean; always within [0, eps^2].
    """
    row = table.row(n)
    mean = step_mean(n, table, cfg)
    second_moment = cfg.eps * cfg.eps * sum(row[1:], Fraction(0))
    return second_moment - dot(mean, mean)


def walk_trace(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> Fraction:
    """Sum of coordinate variances of the position after n steps.

    Steps are independent, so the walk's trace is the sum of the step
    traces; it never exceeds n * eps^2.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0: {n}")
    if n > table.horizon:
        raise DepthExceedsTable(n - 1, table.horizon)
    return sum((step_trace(k, table, cfg) for k in range(n)), Fraction(0))


def recurrence_residual(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> Vec3:
    """E(R_{n+2}) - 2 E(R_{n+1}) + E(R_n) - tau^2 a(n).

    Identically zero for every table: the second difference of the mean
    path is the acceleration scaled by tau^2.
    """
    r2 = mean_position(n + 2, table, cfg)
    r1 = mean_position(n + 1, table, cfg)
    r0 = mean_position(n, table, cfg)
    acc = acceleration(n, table, cfg)
    second_diff = vadd(vsub(r2, vscale(Fraction(2), r1)), r0)
    return vsub(second_diff, vscale(cfg.tau * cfg.tau, acc))


@dataclass(frozen=True)
class MomentReport:
    """Exact kinematic summary of the walk at one step index."""

    n: int
    mean_position: Vec3
    velocity: Vec3
    acceleration: Vec3
    trace: Fraction


def moment_report(n: int, table: StepProbabilityTable, cfg: LatticeConfig) -> MomentReport:
    return MomentReport(
        n=n,
        mean_position=mean_position(n, table, cfg),
        velocity=velocity(n, table, cfg),
        acceleration=acceleration(n, table, cfg),
        trace=walk_trace(n, table, cfg),
    )


def moment_rows(
    table: StepProbabilityTable, cfg: LatticeConfig, upto: int
) -> list[MomentReport]:
    """Reports for n = 0..upto. Needs table rows up to upto + 1
    (acceleration at n looks one row ahead)."""
    if upto + 1 >= table.horizon:
        raise DepthExceedsTable(upto + 1, table.horizon)
    return [moment_report(n, table, cfg) for n in range(upto + 1)]


MOMENT_CSV_HEADER = [
    "n",
    "E_x", "E_y", "E_z",
    "v_x", "v_y", "v_z",
    "a_x", "a_y", "a_z",
    "trace",
    "E_x_exact", "E_y_exact", "E_z_exact",
    "v_x_exact", "v_y_exact", "v_z_exact",
    "a_x_exact", "a_y_exact", "a_z_exact",
    "trace_exact",
]


def moments_csv(reports: list[MomentReport], precision: int = 12) -> str:
    """Render reports as CSV: decimal columns at `precision` digits,
    then exact p/q companion columns."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MOMENT_CSV_HEADER)
    for rep in reports:
        exact = list(rep.mean_position) + list(rep.velocity) + list(rep.acceleration)
        exact.append(rep.trace)
        row = [str(rep.n)]
        row += [rational_to_decimal(v, precision) for v in exact]
        row += [format_rational(v) for v in exact]
        writer.writerow(row)
    return buf.getvalue()
