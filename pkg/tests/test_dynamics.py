"""Table evolution under force schedules and the second-law identity.

Core claims:
    - zero-force propagation copies rows; forced evolution shifts the
      directional probabilities by gamma * f and normalizes via rest
    - out-of-range rows raise ProbabilityOverflow with the offending
      (step, symbol); nothing is clamped
    - directional differences under a constant force grow linearly:
      p_n(i) - p_n(i+3) = a_i * n + b_i
    - F(n) = beta * a(n) exactly, beta = tau^2 / (eps * gamma) > 0
    - the closed-form parabola equals the iterated mean position
"""

import random
from fractions import Fraction

import pytest

from latticewalk.dynamics import (
    ForceSchedule,
    beta,
    constant_force_closed_form,
    evolve_forced,
    evolve_free,
    newton2_residual,
    resultant_force,
)
from latticewalk.errors import IndexOutOfRange, ProbabilityOverflow
from latticewalk.tables import StepProbabilityTable
from latticewalk.walk import LatticeConfig, acceleration, mean_position, velocity

from conftest import random_row, random_table

CFG = LatticeConfig(tau=Fraction(1, 10), c=Fraction(2))
ZERO6 = (0,) * 6


def small_schedule(rnd: random.Random, steps: int, scale=Fraction(1, 400)):
    """A random schedule gentle enough to stay valid from uniform."""
    entries = [
        tuple(Fraction(rnd.randint(-3, 3)) for _ in range(6)) for _ in range(steps)
    ]
    return ForceSchedule(scale, tuple(entries))


def test_evolve_free_copies_rows(rnd):
    table = random_table(rnd, 6)
    out = evolve_free(table, 2, 4)
    assert out.rows[2] == out.rows[3] == out.rows[4] == table.rows[2]
    assert out.rows[0] == table.rows[0]
    assert out.rows[5] == table.rows[5]
    v = velocity(2, out, CFG)
    assert velocity(3, out, CFG) == v and velocity(4, out, CFG) == v


def test_evolve_free_range_checks(rnd):
    table = random_table(rnd, 4)
    with pytest.raises(IndexOutOfRange):
        evolve_free(table, 3, 4)
    with pytest.raises(IndexOutOfRange):
        evolve_free(table, 2, 1)


def test_zero_schedule_reduces_to_no_force():
    table = StepProbabilityTable.uniform(1)
    schedule = ForceSchedule.constant(Fraction(1, 100), ZERO6, 5)
    out = evolve_forced(table, schedule)
    assert out.horizon == 6
    assert all(row == table.rows[0] for row in out.rows)


def test_forced_step_moves_probability_into_direction():
    table = StepProbabilityTable.uniform(1)
    schedule = ForceSchedule.constant(Fraction(1, 100), (2, 0, 0, 0, 0, 0), 1)
    out = evolve_forced(table, schedule)
    row1 = out.rows[1]
    assert row1[1] == Fraction(1, 7) + Fraction(1, 50)
    assert row1[0] == Fraction(1, 7) - Fraction(1, 50)
    assert all(row1[j] == Fraction(1, 7) for j in range(2, 7))


def test_forced_rows_sum_to_one(rnd):
    table = StepProbabilityTable.uniform(1)
    out = evolve_forced(table, small_schedule(rnd, 30))
    for row in out.rows:
        assert sum(row) == 1
        assert all(0 <= p <= 1 for p in row)


def test_overflow_is_reported_not_clamped():
    table = StepProbabilityTable([[0, 1, 0, 0, 0, 0, 0]])
    schedule = ForceSchedule.constant(Fraction(1, 2), (1, 0, 0, 0, 0, 0), 1)
    with pytest.raises(ProbabilityOverflow) as err:
        evolve_forced(table, schedule)
    assert err.value.step == 1
    assert err.value.symbol in (0, 1)


def test_constant_force_linear_differences(rnd):
    f = (Fraction(2), 0, Fraction(-1), 0, Fraction(1), 0)
    gamma = Fraction(1, 1000)
    schedule = ForceSchedule.constant(gamma, f, 40)
    out = evolve_forced(StepProbabilityTable.uniform(1), schedule)
    a = [gamma * (f[i] - f[i + 3]) for i in range(3)]
    for n in range(41):
        row = out.rows[n]
        for i in range(3):
            assert row[i + 1] - row[i + 4] == a[i] * n  # b_i = 0 from uniform


def test_constant_schedule_gives_constant_acceleration():
    f = (Fraction(1), 0, 0, 0, Fraction(2), 0)
    schedule = ForceSchedule.constant(Fraction(1, 2000), f, 25)
    evolved = evolve_forced(StepProbabilityTable.uniform(1), schedule)
    a0 = acceleration(0, evolved, CFG)
    assert a0 != (0, 0, 0)
    for n in range(24):
        assert acceleration(n, evolved, CFG) == a0


def test_evolve_free_whole_range_is_constant_velocity_regime(rnd):
    table = random_table(rnd, 20)
    out = evolve_free(table, 0, 19)
    v = velocity(0, out, CFG)
    for n in range(20):
        assert velocity(n, out, CFG) == v
        assert mean_position(n, out, CFG) == tuple(n * CFG.tau * x for x in v)


def test_resultant_force_components():
    schedule = ForceSchedule(
        Fraction(1, 10),
        ((Fraction(2), 0, 0, 0, 0, 0), (0, Fraction(1), 0, 0, Fraction(3), 0)),
    )
    assert resultant_force(schedule, 0) == (2, 0, 0)
    assert resultant_force(schedule, 1) == (0, -2, 0)
    balanced = ForceSchedule(Fraction(1), ((1, 2, 3, 1, 2, 3),))
    assert resultant_force(balanced, 0) == (0, 0, 0)
    with pytest.raises(IndexOutOfRange):
        resultant_force(schedule, 2)


def test_beta_positive_and_symbolic():
    for tau, c, gamma in [(Fraction(1, 10), 2, Fraction(1, 100)),
                          (Fraction(1, 3), Fraction(5, 7), Fraction(2, 9)),
                          (3, Fraction(1, 2), Fraction(1))]:
        cfg = LatticeConfig(tau=Fraction(tau), c=Fraction(c))
        b = beta(cfg, Fraction(gamma))
        assert b == cfg.tau ** 2 / (cfg.eps * Fraction(gamma))
        assert b > 0


def test_newton2_residual_zero_random_schedules(rnd):
    for _ in range(20):
        schedule = small_schedule(rnd, 15)
        evolved = evolve_forced(StepProbabilityTable.uniform(1), schedule)
        for n in range(len(schedule)):
            assert newton2_residual(evolved, schedule, CFG, n) == (0, 0, 0)


def test_newton2_residual_matches_acceleration_definition(rnd):
    schedule = small_schedule(rnd, 10)
    evolved = evolve_forced(StepProbabilityTable.uniform(1), schedule)
    b = beta(CFG, schedule.gamma)
    n = 4
    force = resultant_force(schedule, n)
    acc = acceleration(n, evolved, CFG)
    assert force == tuple(b * a for a in acc)


def test_closed_form_small_cases():
    row0 = StepProbabilityTable.uniform(1).rows[0]
    f = (Fraction(1), 0, 0, 0, 0, 0)
    gamma = Fraction(1, 1000)
    assert constant_force_closed_form(row0, f, gamma, CFG, 0) == (0, 0, 0)
    # n = 1: eps * b, and b = 0 for the uniform row
    assert constant_force_closed_form(row0, f, gamma, CFG, 1) == (0, 0, 0)
    skewed = (Fraction(1, 4), Fraction(1, 2), 0, 0, Fraction(1, 4), 0, 0)
    b_vec = (Fraction(1, 2) - Fraction(1, 4), 0, 0)
    assert constant_force_closed_form(skewed, f, gamma, CFG, 1) == tuple(
        CFG.eps * v for v in b_vec
    )


def test_closed_form_equals_iterated_mean(rnd):
    row0 = random_row(rnd)
    f = tuple(Fraction(rnd.randint(-2, 2)) for _ in range(6))
    gamma = Fraction(1, 5000)
    schedule = ForceSchedule.constant(gamma, f, 60)
    try:
        evolved = evolve_forced(StepProbabilityTable([row0]), schedule)
    except ProbabilityOverflow:
        pytest.skip("randomly drawn start row too close to the boundary")
    for n in range(61):
        assert constant_force_closed_form(row0, f, gamma, CFG, n) == mean_position(
            n, evolved, CFG
        )


def test_closed_form_propagates_overflow():
    row0 = (0, 1, 0, 0, 0, 0, 0)
    f = (Fraction(1), 0, 0, 0, 0, 0)
    with pytest.raises(ProbabilityOverflow):
        constant_force_closed_form(row0, f, Fraction(1, 2), CFG, 10)


def test_closed_form_overflow_matches_evolution():
    """The closed form reports the same first offending (step, symbol)
    that evolving the schedule would."""
    row0 = StepProbabilityTable.uniform(1).rows[0]
    f = (Fraction(1), 0, 0, 0, 0, 0)
    gamma = Fraction(1, 20)  # rest probability goes negative at step 3
    with pytest.raises(ProbabilityOverflow) as evolved_err:
        evolve_forced(
            StepProbabilityTable([row0]), ForceSchedule.constant(gamma, f, 9)
        )
    with pytest.raises(ProbabilityOverflow) as closed_err:
        constant_force_closed_form(row0, f, gamma, CFG, 10)
    assert closed_err.value.step == evolved_err.value.step == 3
    assert closed_err.value.symbol == evolved_err.value.symbol == 0
    assert closed_err.value.value == evolved_err.value.value


def test_schedule_json_round_trip():
    schedule = ForceSchedule(
        Fraction(1, 100),
        ((Fraction(1), 0, 0, 0, 0, 0), (0, 0, 0, 0, 0, Fraction(-2))),
    )
    data = schedule.to_json_dict()
    assert data["gamma"] == "1/100"
    assert ForceSchedule.from_json_dict(data) == schedule

    constant = ForceSchedule.from_json_dict(
        {"gamma": "1/10", "constant_f": ["1", "0", "0", "0", "0", "0"], "steps_count": 3}
    )
    assert len(constant) == 3
    assert constant.is_constant()


def test_gamma_must_be_positive():
    with pytest.raises(ValueError):
        ForceSchedule(Fraction(0), ())
    with pytest.raises(ValueError):
        beta(CFG, Fraction(-1))
