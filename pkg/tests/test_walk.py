"""Exact walk moments.

Core claims:
    - step vectors follow the symbol convention (rest, +axis, -axis)
    - step mean / velocity / acceleration / mean position match direct
      enumeration of all words (brute-force oracle, exact rationals)
    - step trace equals the sum of coordinate-wise variances and stays
      within [0, eps^2]; the two-sided row attains the bound
    - walk trace telescopes and respects the n * eps^2 bound
    - the recurrence residual is identically zero
    - constant rows give constant velocity and a linear mean path
"""

from fractions import Fraction
from itertools import product

import pytest

from latticewalk.errors import DepthExceedsTable
from latticewalk.tables import StepProbabilityTable
from latticewalk.walk import (
    LatticeConfig,
    MomentReport,
    acceleration,
    mean_position,
    moment_rows,
    moments_csv,
    recurrence_residual,
    step_mean,
    step_trace,
    step_vector,
    velocity,
    vscale,
    walk_trace,
)

from conftest import random_row, random_table

CFG1 = LatticeConfig(tau=Fraction(1), c=Fraction(1))


def brute_force_moments(table, cfg, n):
    """Mean position and trace at step n by enumerating all 7^n words."""
    total_mean = (Fraction(0),) * 3
    weights = []
    for word in product(range(7), repeat=n):
        p = Fraction(1)
        pos = [Fraction(0)] * 3
        for k, s in enumerate(word):
            p *= table.row(k)[s]
            v = step_vector(s, cfg)
            for i in range(3):
                pos[i] += v[i]
        weights.append((p, tuple(pos)))
        total_mean = tuple(total_mean[i] + p * pos[i] for i in range(3))
    trace = Fraction(0)
    for p, pos in weights:
        trace += p * sum((pos[i] - total_mean[i]) ** 2 for i in range(3))
    return total_mean, trace


def trace_by_coordinate_variances(row, cfg):
    """Sum of per-coordinate variances of one step, by enumeration."""
    total = Fraction(0)
    for i in range(3):
        mean = sum(row[j] * step_vector(j, cfg)[i] for j in range(7))
        second = sum(row[j] * step_vector(j, cfg)[i] ** 2 for j in range(7))
        total += second - mean * mean
    return total


def test_step_vectors():
    cfg = LatticeConfig(tau=Fraction(1, 10), c=Fraction(1))
    assert step_vector(0, cfg) == (0, 0, 0)
    assert step_vector(2, cfg) == (0, Fraction(1, 10), 0)
    assert step_vector(4, cfg) == (-Fraction(1, 10), 0, 0)
    for j in range(1, 4):
        plus = step_vector(j, cfg)
        minus = step_vector(j + 3, cfg)
        assert tuple(-x for x in plus) == minus
    with pytest.raises(ValueError):
        step_vector(7, cfg)


def test_step_mean_direct_substitution():
    row = [Fraction(1, 3), Fraction(1, 2), 0, 0, Fraction(1, 6), 0, 0]
    table = StepProbabilityTable([row])
    assert step_mean(0, table, CFG1) == (Fraction(1, 3), 0, 0)


def test_step_mean_symmetric_rows_vanish():
    table = StepProbabilityTable.uniform(1)
    assert step_mean(0, table, CFG1) == (0, 0, 0)
    resting = StepProbabilityTable([[1, 0, 0, 0, 0, 0, 0]])
    assert step_mean(0, resting, CFG1) == (0, 0, 0)


def test_mean_position_matches_enumeration(rnd):
    table = random_table(rnd, 3)
    cfg = LatticeConfig(tau=Fraction(1, 5), c=Fraction(3))
    mean, trace = brute_force_moments(table, cfg, 3)
    assert mean_position(3, table, cfg) == mean
    assert walk_trace(3, table, cfg) == trace


def test_mean_position_zero_at_origin(rnd):
    table = random_table(rnd, 2)
    assert mean_position(0, table, CFG1) == (0, 0, 0)


def test_constant_rows_linear_mean_path(rnd):
    row = random_row(rnd)
    table = StepProbabilityTable.constant(row, 12)
    cfg = LatticeConfig(tau=Fraction(2, 7), c=Fraction(5, 3))
    v = velocity(0, table, cfg)
    for n in range(12):
        assert velocity(n, table, cfg) == v
        assert mean_position(n, table, cfg) == vscale(n * cfg.tau, v)
        if n < 11:
            assert acceleration(n, table, cfg) == (0, 0, 0)


def test_step_trace_examples():
    resting = StepProbabilityTable([[1, 0, 0, 0, 0, 0, 0]])
    assert step_trace(0, resting, CFG1) == 0
    uniform = StepProbabilityTable.uniform(1)
    assert step_trace(0, uniform, CFG1) == Fraction(6, 7)
    two_sided = StepProbabilityTable([[0, Fraction(1, 2), 0, 0, Fraction(1, 2), 0, 0]])
    assert step_trace(0, two_sided, CFG1) == 1  # bound attained


def test_step_trace_equals_coordinate_variances(rnd):
    cfg = LatticeConfig(tau=Fraction(1, 4), c=Fraction(2))
    for _ in range(50):
        row = random_row(rnd)
        table = StepProbabilityTable([row])
        assert step_trace(0, table, cfg) == trace_by_coordinate_variances(row, cfg)


def test_step_trace_bound(rnd):
    cfg = LatticeConfig(tau=Fraction(1, 3), c=Fraction(3, 2))
    limit = cfg.eps * cfg.eps
    for _ in range(100):
        table = StepProbabilityTable([random_row(rnd)])
        t = step_trace(0, table, cfg)
        assert 0 <= t <= limit


def test_walk_trace_uniform():
    table = StepProbabilityTable.uniform(7)
    assert walk_trace(7, table, CFG1) == 6
    assert walk_trace(0, table, CFG1) == 0


def test_walk_trace_bound_under_refinement():
    # total time fixed at 1, speed 1: bound is 1/N and decreases
    previous = None
    for n in (10, 20, 40):
        cfg = LatticeConfig(tau=Fraction(1, n), c=Fraction(1))
        table = StepProbabilityTable.uniform(n)
        exact = walk_trace(n, table, cfg)
        bound = Fraction(1, n)
        assert exact <= bound
        if previous is not None:
            assert bound < previous
        previous = bound


def test_recurrence_residual_zero(rnd):
    cfg = LatticeConfig(tau=Fraction(3, 11), c=Fraction(7, 5))
    for _ in range(25):
        table = random_table(rnd, 8)
        for n in range(6):
            assert recurrence_residual(n, table, cfg) == (0, 0, 0)


def test_depth_errors():
    table = StepProbabilityTable.uniform(4)
    with pytest.raises(DepthExceedsTable):
        velocity(4, table, CFG1)
    with pytest.raises(DepthExceedsTable):
        acceleration(3, table, CFG1)
    with pytest.raises(DepthExceedsTable):
        mean_position(5, table, CFG1)
    with pytest.raises(DepthExceedsTable):
        walk_trace(5, table, CFG1)
    # boundary cases that must still work
    velocity(3, table, CFG1)
    mean_position(4, table, CFG1)
    walk_trace(4, table, CFG1)


def test_moment_report_and_csv(rnd):
    table = random_table(rnd, 6)
    cfg = LatticeConfig(tau=Fraction(1, 2), c=Fraction(2))
    reports = moment_rows(table, cfg, 4)
    assert [r.n for r in reports] == [0, 1, 2, 3, 4]
    rep = reports[2]
    assert isinstance(rep, MomentReport)
    assert rep.mean_position == mean_position(2, table, cfg)
    assert rep.trace == walk_trace(2, table, cfg)

    text = moments_csv(reports, precision=6)
    lines = text.strip().split("\n")
    assert lines[0].startswith("n,E_x,E_y,E_z,v_x")
    assert len(lines) == 6
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "0.000000"

    with pytest.raises(DepthExceedsTable):
        moment_rows(table, cfg, 5)
