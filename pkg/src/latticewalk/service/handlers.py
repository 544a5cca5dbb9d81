"""Workflow handlers shared by the HTTP routes and the in-process CLI.

Each handler is a pure function from a request model to a response
model; domain errors propagate as LatticeWalkError subclasses and are
mapped to HTTP 422 by the app (the CLI renders them as messages).
"""

from __future__ import annotations

from fractions import Fraction

from ..algebra import Arena
from ..dynamics import (
    beta,
    constant_force_closed_form,
    evolve_forced,
    newton2_residual,
)
from ..expressions import parse_event
from ..rational import format_rational, parse_rational, rational_to_decimal
from ..rng import SplitMix64, substream_seed
from ..simulate import (
    convergence_study,
    convergence_csv,
    ensemble_csv,
    estimate_event_probability,
    estimate_moments,
    sample_trajectory,
    trajectories_csv,
)
from ..walk import (
    mean_position,
    moment_rows,
    moments_csv,
    velocity,
    vscale,
    walk_trace,
)
from .schemas import (
    CheckItem,
    ConvergeRequest,
    ConvergeResponse,
    ConvergenceRowModel,
    EventProbabilityRequest,
    EventProbabilityResponse,
    MeasureRequest,
    MeasureResponse,
    SimulateRequest,
    SimulateResponse,
    VerifyNewton1Request,
    VerifyNewton2Request,
    VerifyResponse,
    to_lattice_config,
    to_schedule,
    to_table,
)

UNIFORM_ROW = ["1/7"] * 7


def _fmt_float(x: float) -> str:
    return f"{x:.17g}"


def _fmt_vec(vec) -> str:
    return "(" + ", ".join(format_rational(v) for v in vec) + ")"


def handle_measure(req: MeasureRequest) -> MeasureResponse:
    """Exact probability of an event expression under a table.

    The optional decomposition lists the event's pairwise disjoint
    prefix cylinders; for the universe the canonical single-coordinate
    split is used.
    """
    table = to_table(req.table)
    arena = Arena()
    event = parse_event(req.expression, arena)
    value = event.measure(table)
    planes = None
    if req.disjoint_planes:
        cap = 1 if event.is_universe() else None
        planes = [list(word) for word in event.to_disjoint_planes(depth_cap=cap)]
    return MeasureResponse(
        exact=format_rational(value),
        decimal=rational_to_decimal(value, req.precision),
        disjoint_planes=planes,
    )


def handle_simulate(req: SimulateRequest) -> SimulateResponse:
    cfg = to_lattice_config(req.lattice)
    table = to_table(req.table)
    stats = estimate_moments(table, cfg, req.steps, req.replicas, req.seed)

    exact_upto = min(req.steps, table.horizon - 2)
    reports = moment_rows(table, cfg, exact_upto) if exact_upto >= 0 else []
    exact_csv = moments_csv(reports, req.precision)

    traj_csv = None
    if req.dump_trajectories > 0:
        count = min(req.dump_trajectories, req.replicas)
        samples = [
            sample_trajectory(
                table, cfg, req.steps, SplitMix64(substream_seed(req.seed, r))
            )
            for r in range(count)
        ]
        traj_csv = trajectories_csv(samples)

    final = stats.n_steps
    return SimulateResponse(
        moments_csv=ensemble_csv(stats),
        exact_moments_csv=exact_csv,
        trajectories_csv=traj_csv,
        final_mean=[_fmt_float(v) for v in stats.mean_position[final]],
        final_trace=_fmt_float(stats.trace[final]),
        final_se_trace=_fmt_float(stats.se_trace[final]),
    )


def handle_verify_newton1(req: VerifyNewton1Request) -> VerifyResponse:
    """Constant-velocity checks over steps 0..N.

    A table violating the constant-differences hypothesis fails the
    velocity check; the command's exit status surfaces that.
    """
    cfg = to_lattice_config(req.lattice)
    table = to_table(req.table)
    n_max = req.steps
    checks = []

    v0 = velocity(0, table, cfg)
    bad = next(
        (n for n in range(1, n_max + 1) if velocity(n, table, cfg) != v0), None
    )
    if bad is None:
        checks.append(
            CheckItem(
                name="velocity-constant",
                passed=True,
                details=f"v(n) = {_fmt_vec(v0)} for all n <= {n_max}",
            )
        )
    else:
        checks.append(
            CheckItem(
                name="velocity-constant",
                passed=False,
                details=(
                    f"v({bad}) = {_fmt_vec(velocity(bad, table, cfg))} "
                    f"!= v(0) = {_fmt_vec(v0)}"
                ),
            )
        )

    bad = next(
        (
            n
            for n in range(n_max + 1)
            if mean_position(n, table, cfg) != vscale(Fraction(n) * cfg.tau, v0)
        ),
        None,
    )
    checks.append(
        CheckItem(
            name="mean-position-linear",
            passed=bad is None,
            details=(
                f"E(R_n) = n*tau*v for all n <= {n_max}"
                if bad is None
                else f"first failure at n = {bad}"
            ),
        )
    )

    trace = walk_trace(n_max, table, cfg)
    limit = n_max * cfg.eps * cfg.eps
    checks.append(
        CheckItem(
            name="trace-bound",
            passed=trace <= limit,
            details=(
                f"Tr(R_{n_max}) = {format_rational(trace)} "
                f"<= N*eps^2 = {format_rational(limit)}"
                if trace <= limit
                else f"Tr(R_{n_max}) = {format_rational(trace)} exceeds "
                f"{format_rational(limit)}"
            ),
        )
    )

    return VerifyResponse(passed=all(c.passed for c in checks), checks=checks)


def handle_verify_newton2(req: VerifyNewton2Request) -> VerifyResponse:
    cfg = to_lattice_config(req.lattice)
    schedule = to_schedule(req.schedule)
    if len(schedule) == 0:
        raise ValueError("the schedule must cover at least one step")
    start = to_table(req.table)
    evolved = evolve_forced(start, schedule)
    checks = []

    zero = (Fraction(0), Fraction(0), Fraction(0))
    bad = next(
        (
            n
            for n in range(len(schedule))
            if newton2_residual(evolved, schedule, cfg, n) != zero
        ),
        None,
    )
    checks.append(
        CheckItem(
            name="force-equals-beta-acceleration",
            passed=bad is None,
            details=(
                f"F(n) - beta*a(n) = 0 for all n < {len(schedule)}"
                if bad is None
                else f"first nonzero residual at n = {bad}: "
                f"{_fmt_vec(newton2_residual(evolved, schedule, cfg, bad))}"
            ),
        )
    )

    if schedule.is_constant():
        row0 = evolved.row(0)
        f = schedule.force(0)
        bad = next(
            (
                n
                for n in range(len(schedule) + 1)
                if constant_force_closed_form(row0, f, schedule.gamma, cfg, n)
                != mean_position(n, evolved, cfg)
            ),
            None,
        )
        checks.append(
            CheckItem(
                name="parabola-closed-form",
                passed=bad is None,
                details=(
                    f"E(R_n) matches the closed form for all n <= {len(schedule)}"
                    if bad is None
                    else f"first mismatch at n = {bad}"
                ),
            )
        )

    b = beta(cfg, schedule.gamma)
    return VerifyResponse(
        passed=all(c.passed for c in checks),
        checks=checks,
        beta_exact=format_rational(b),
        beta_decimal=rational_to_decimal(b, req.precision),
    )


def handle_converge(req: ConvergeRequest) -> ConvergeResponse:
    row = [parse_rational(v) for v in (req.row or UNIFORM_ROW)]
    rows = convergence_study(
        parse_rational(req.c),
        parse_rational(req.total_time),
        req.n_list,
        tuple(Fraction(v) for v in row),
        req.replicas,
        req.seed,
    )
    return ConvergeResponse(
        csv=convergence_csv(rows),
        rows=[
            ConvergenceRowModel(
                n_steps=r.n_steps,
                tau=format_rational(r.tau),
                exact_trace=format_rational(r.exact_trace),
                bound=format_rational(r.bound),
                empirical_trace=r.empirical_trace,
                se=r.se,
            )
            for r in rows
        ],
    )


def handle_event_probability(req: EventProbabilityRequest) -> EventProbabilityResponse:
    table = to_table(req.table)
    arena = Arena()
    event = parse_event(req.expression, arena)
    exact = event.measure(table)
    estimate, se = estimate_event_probability(event, table, req.replicas, req.seed)
    return EventProbabilityResponse(
        exact=format_rational(exact), estimate=estimate, se=se
    )
