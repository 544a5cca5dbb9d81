"""Monte Carlo sampling of walk trajectories and ensemble estimates.

This is the only module that works in floating point; every estimate it
produces has an exact counterpart elsewhere (measure for event
probabilities, the walk module for moments) that tests use as the
oracle.

Sampling contract
-----------------
Each step consumes one uniform variate and picks the smallest symbol j
whose cumulative row probability is >= the variate (ties resolve to the
lower index). Cumulative thresholds are computed in exact rationals and
converted to floats once, so the last threshold is exactly 1.0 and the
per-step bias is below 2**-53. Replica r of master seed s uses the
counter-based stream from :mod:`.rng`; words are bit-identical between
the scalar sampler and the vectorized one, across runs and platforms.
Aggregation reduces in fixed replica order, so results do not depend on
scheduling.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .algebra import Arena, EventSet
from .errors import DepthExceedsTable
from .rng import GAMMA, MASK64, MIX1, MIX2, SplitMix64
from .tables import Row, StepProbabilityTable
from .walk import LatticeConfig, Vec3, step_vector, vadd, walk_trace

# displacement of each symbol on the integer grid: axis index and sign
_AXIS = np.array([0, 0, 1, 2, 0, 1, 2], dtype=np.int64)
_SIGN = np.array([0, 1, 1, 1, -1, -1, -1], dtype=np.int64)


def row_thresholds(row: Row) -> tuple[float, ...]:
    """Inverse-CDF thresholds for one row, exact sums converted once."""
    acc = Fraction(0)
    out = []
    for p in row:
        acc += p
        out.append(float(acc))
    return tuple(out)


def symbol_from_uniform(u: float, thresholds: tuple[float, ...]) -> int:
    for j, t in enumerate(thresholds):
        if u <= t:
            return j
    raise AssertionError(f"uniform {u} above final threshold {thresholds[-1]}")


@dataclass(frozen=True)
class TrajectorySample:
    """One sampled word with the positions it visits (lattice units)."""

    word: tuple[int, ...]
    positions: tuple[Vec3, ...]


def sample_trajectory(
    table: StepProbabilityTable,
    cfg: LatticeConfig,
    n_steps: int,
    stream: SplitMix64,
) -> TrajectorySample:
    """Draw one trajectory of `n_steps` steps from `stream`."""
    if n_steps > table.horizon:
        raise DepthExceedsTable(n_steps - 1, table.horizon)
    thresholds = [row_thresholds(table.row(n)) for n in range(n_steps)]
    word = []
    positions = [(Fraction(0), Fraction(0), Fraction(0))]
    for n in range(n_steps):
        j = symbol_from_uniform(stream.uniform(), thresholds[n])
        word.append(j)
        positions.append(vadd(positions[-1], step_vector(j, cfg)))
    return TrajectorySample(tuple(word), tuple(positions))


# -- vectorized counter-based sampling ------------------------------------

_GAMMA_NP = np.uint64(GAMMA)
_MIX1_NP = np.uint64(MIX1)
_MIX2_NP = np.uint64(MIX2)


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1_NP
    z = (z ^ (z >> np.uint64(27))) * _MIX2_NP
    return z ^ (z >> np.uint64(31))


def _replica_states(master_seed: int, replicas: int) -> np.ndarray:
    base = np.uint64(master_seed & MASK64)
    ks = np.arange(1, replicas + 1, dtype=np.uint64)
    return _mix64_np(base + ks * _GAMMA_NP)


def _step_uniforms(states: np.ndarray, step: int) -> np.ndarray:
    counter = np.uint64(((step + 1) * GAMMA) & MASK64)
    bits = _mix64_np(states + counter)
    return (bits >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


def sample_words(
    table: StepProbabilityTable, n_steps: int, replicas: int, master_seed: int
) -> np.ndarray:
    """Words for `replicas` independent substreams, shape (replicas, n_steps)."""
    if n_steps > table.horizon:
        raise DepthExceedsTable(n_steps - 1, table.horizon)
    states = _replica_states(master_seed, replicas)
    words = np.empty((replicas, n_steps), dtype=np.int8)
    for n in range(n_steps):
        thr = np.array(row_thresholds(table.row(n)), dtype=np.float64)
        u = _step_uniforms(states, n)
        words[:, n] = np.searchsorted(thr, u, side="left").astype(np.int8)
    return words


@dataclass(eq=False)
class EnsembleStats:
    """Per-step ensemble means and dispersion, with standard errors.

    mean_position and se_mean have shape (n_steps + 1, 3); trace and
    se_trace have shape (n_steps + 1,). All values are in lattice
    units. The trace entry at step n is the sum of the coordinate-wise
    sample variances (ddof=1) of the position at n; its standard error
    comes from the spread of per-replica squared deviations.
    """

    replicas: int
    seed: int
    n_steps: int
    mean_position: np.ndarray = field(repr=False)
    se_mean: np.ndarray = field(repr=False)
    trace: np.ndarray = field(repr=False)
    se_trace: np.ndarray = field(repr=False)


def _grid_positions_pass(
    words: np.ndarray, on_step: Callable[[int, np.ndarray], None]
) -> None:
    """Run positions forward on the integer grid, calling back per step.

    on_step(n, pos) sees the (replicas, 3) grid positions after n steps,
    for n = 0..n_steps.
    """
    replicas, n_steps = words.shape
    pos = np.zeros((replicas, 3), dtype=np.int64)
    rows = np.arange(replicas)
    on_step(0, pos)
    for n in range(n_steps):
        w = words[:, n]
        pos[rows, _AXIS[w]] += _SIGN[w]
        on_step(n + 1, pos)


def estimate_moments(
    table: StepProbabilityTable,
    cfg: LatticeConfig,
    n_steps: int,
    replicas: int,
    seed: int,
) -> EnsembleStats:
    """Sample an ensemble and estimate mean position and trace per step."""
    if replicas < 2:
        raise ValueError(f"need at least 2 replicas, got {replicas}")
    words = sample_words(table, n_steps, replicas, seed)
    eps = float(cfg.eps)
    mean = np.zeros((n_steps + 1, 3))
    se_mean = np.zeros((n_steps + 1, 3))
    trace = np.zeros(n_steps + 1)
    se_trace = np.zeros(n_steps + 1)
    m = replicas

    def record(n: int, pos: np.ndarray) -> None:
        center = pos.mean(axis=0)
        dev = pos - center
        sq = dev * dev
        var = sq.sum(axis=0) / (m - 1)
        mean[n] = center * eps
        se_mean[n] = np.sqrt(var / m) * eps
        q = sq.sum(axis=1)
        trace[n] = q.sum() / (m - 1) * eps * eps
        se_trace[n] = (m / (m - 1)) * q.std(ddof=1) / np.sqrt(m) * eps * eps

    _grid_positions_pass(words, record)
    return EnsembleStats(
        replicas=replicas,
        seed=seed,
        n_steps=n_steps,
        mean_position=mean,
        se_mean=se_mean,
        trace=trace,
        se_trace=se_trace,
    )


def estimate_event_probability(
    event: EventSet, table: StepProbabilityTable, replicas: int, seed: int
) -> tuple[float, float]:
    """Fraction of sampled trajectories whose prefix lies in the event.

    Returns (estimate, standard error). Terminal events need no
    sampling and report an exact 0.0 or 1.0 with zero error.
    """
    depth = event.constrained_depth() + 1
    if depth == 0:
        return (1.0 if event.is_universe() else 0.0, 0.0)
    if depth > table.horizon:
        raise DepthExceedsTable(depth - 1, table.horizon)
    words = sample_words(table, depth, replicas, seed)

    arena = event.arena
    handles = sorted(_reachable_handles(event))
    lookup = np.zeros((handles[-1] + 1, 7), dtype=np.int64)
    lookup[Arena.EMPTY] = Arena.EMPTY
    lookup[Arena.FULL] = Arena.FULL
    for h in handles:
        if h not in (Arena.EMPTY, Arena.FULL):
            lookup[h] = arena.node_children(h)

    current = np.full(replicas, event.handle, dtype=np.int64)
    for k in range(depth):
        current = lookup[current, words[:, k]]
    hits = int((current == Arena.FULL).sum())
    p_hat = hits / replicas
    se = float(np.sqrt(p_hat * (1.0 - p_hat) / replicas))
    return (p_hat, se)


def _reachable_handles(event: EventSet) -> set[int]:
    arena = event.arena
    seen = {Arena.EMPTY, Arena.FULL}
    stack = [event.handle]
    while stack:
        h = stack.pop()
        if h in seen:
            continue
        seen.add(h)
        stack.extend(arena.node_children(h))
    return seen


def final_trace_estimate(
    table: StepProbabilityTable,
    cfg: LatticeConfig,
    n_steps: int,
    replicas: int,
    seed: int,
) -> tuple[float, float]:
    """Empirical trace at the final step only (cheap for long walks)."""
    if replicas < 2:
        raise ValueError(f"need at least 2 replicas, got {replicas}")
    words = sample_words(table, n_steps, replicas, seed)
    pos = np.zeros((replicas, 3), dtype=np.int64)
    rows = np.arange(replicas)
    for n in range(n_steps):
        w = words[:, n]
        pos[rows, _AXIS[w]] += _SIGN[w]
    eps = float(cfg.eps)
    m = replicas
    dev = pos - pos.mean(axis=0)
    q = (dev * dev).sum(axis=1)
    trace = q.sum() / (m - 1) * eps * eps
    se = (m / (m - 1)) * q.std(ddof=1) / np.sqrt(m) * eps * eps
    return (float(trace), float(se))


@dataclass(frozen=True)
class ConvergenceRow:
    """One refinement level of a fixed-total-time trace study."""

    n_steps: int
    tau: Fraction
    exact_trace: Fraction
    bound: Fraction
    empirical_trace: float | None
    se: float | None


def convergence_study(
    c: Fraction,
    total_time: Fraction,
    n_list: list[int],
    row: Row,
    replicas: int,
    seed: int,
) -> list[ConvergenceRow]:
    """Trace decay as the step count grows with total time held fixed.

    For each N the time unit is tau = total_time / N and the pitch
    eps = c * tau, the same row is used at every step, and the exact
    trace is compared against the (c * total_time)^2 / N bound. With
    replicas >= 2 an empirical final-step trace is included.
    """
    c = Fraction(c)
    total_time = Fraction(total_time)
    bound_scale = (c * total_time) ** 2
    out = []
    for n in n_list:
        n = int(n)
        if n < 1:
            raise ValueError(f"step counts must be >= 1: {n}")
        cfg = LatticeConfig(tau=total_time / n, c=c, horizon=n)
        table = StepProbabilityTable.constant(row, n)
        exact = walk_trace(n, table, cfg)
        empirical = se = None
        if replicas >= 2:
            empirical, se = final_trace_estimate(table, cfg, n, replicas, seed)
        out.append(
            ConvergenceRow(
                n_steps=n,
                tau=cfg.tau,
                exact_trace=exact,
                bound=bound_scale / n,
                empirical_trace=empirical,
                se=se,
            )
        )
    return out


# -- CSV rendering ---------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def trajectories_csv(samples: list[TrajectorySample]) -> str:
    """Rows `replica,n,omega,x,y,z`: symbol at step n and the position
    it leads to."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["replica", "n", "omega", "x", "y", "z"])
    for r, sample in enumerate(samples):
        for n, omega in enumerate(sample.word):
            x, y, z = sample.positions[n + 1]
            writer.writerow([r, n, omega, _fmt(float(x)), _fmt(float(y)), _fmt(float(z))])
    return buf.getvalue()


def ensemble_csv(stats: EnsembleStats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["n", "mean_x", "mean_y", "mean_z", "se_x", "se_y", "se_z", "trace", "se_trace"]
    )
    for n in range(stats.n_steps + 1):
        row = [n]
        row += [_fmt(v) for v in stats.mean_position[n]]
        row += [_fmt(v) for v in stats.se_mean[n]]
        row += [_fmt(stats.trace[n]), _fmt(stats.se_trace[n])]
        writer.writerow(row)
    return buf.getvalue()


def convergence_csv(rows: list[ConvergenceRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["N", "tau", "exact_trace", "bound", "empirical_trace", "se"])
    for r in rows:
        writer.writerow(
            [
                r.n_steps,
                _fmt(float(r.tau)),
                _fmt(float(r.exact_trace)),
                _fmt(float(r.bound)),
                "" if r.empirical_trace is None else _fmt(r.empirical_trace),
                "" if r.se is None else _fmt(r.se),
            ]
        )
    return buf.getvalue()
