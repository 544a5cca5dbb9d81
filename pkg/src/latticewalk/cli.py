"""Command-line client for the latticewalk workflows.

Commands build the same request models the HTTP service accepts and by
default run the handlers in-process; `--server URL` sends them to a
running service instead. Outputs are deterministic for a fixed
(config, seed): rerunning a command reproduces stdout and every CSV
byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from .errors import LatticeWalkError
from .expressions import parse as parse_expression, to_event
from .algebra import Arena
from .service import handlers
from .service.schemas import (
    ConvergeRequest,
    ConvergeResponse,
    LatticeModel,
    MeasureRequest,
    MeasureResponse,
    ScheduleModel,
    SimulateRequest,
    SimulateResponse,
    TableSpec,
    VerifyNewton1Request,
    VerifyNewton2Request,
    VerifyResponse,
)

_ROUTES = {
    "/measure": (handlers.handle_measure, MeasureResponse),
    "/simulate": (handlers.handle_simulate, SimulateResponse),
    "/verify/newton1": (handlers.handle_verify_newton1, VerifyResponse),
    "/verify/newton2": (handlers.handle_verify_newton2, VerifyResponse),
    "/converge": (handlers.handle_converge, ConvergeResponse),
}


class RunSettings:
    """Config file contents merged with command-line overrides."""

    def __init__(self, config_path, seed, out_dir, precision, server):
        self.data = {}
        if config_path:
            self.data = json.loads(Path(config_path).read_text())
        self._seed = seed
        self._out_dir = out_dir
        self._precision = precision
        self.server = server

    @property
    def seed(self) -> int:
        if self._seed is not None:
            return self._seed
        return int(self.data.get("simulation", {}).get("seed", 0))

    @property
    def out_dir(self) -> Path:
        if self._out_dir is not None:
            return Path(self._out_dir)
        return Path(self.data.get("output", {}).get("dir", "."))

    @property
    def precision(self) -> int:
        if self._precision is not None:
            return self._precision
        return int(self.data.get("output", {}).get("precision", 12))

    @property
    def steps(self) -> int:
        return int(self.data.get("simulation", {}).get("steps", 20))

    @property
    def replicas(self) -> int:
        return int(self.data.get("simulation", {}).get("replicas", 10000))

    def lattice(self) -> LatticeModel:
        return LatticeModel(**self.data.get("lattice", {}))

    def table(self, default_rows: int) -> TableSpec:
        """Table spec from the config; a uniform table sized
        `default_rows` when the config does not name one."""
        if "table" in self.data:
            return TableSpec(**self.data["table"])
        return TableSpec(source="uniform", rows=default_rows)

    def schedule(self) -> ScheduleModel:
        if "schedule" not in self.data:
            raise click.ClickException(
                'this command needs a "schedule" block in the config'
            )
        return ScheduleModel(**self.data["schedule"])


def _call(settings: RunSettings, path: str, request):
    """Run a workflow in-process, or POST it to `--server`."""
    if settings.server:
        import httpx

        url = settings.server.rstrip("/") + path
        response = httpx.post(
            url, json=request.model_dump(mode="json"), timeout=600.0
        )
        if response.status_code != 200:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
        return _ROUTES[path][1].model_validate(response.json())
    try:
        return _ROUTES[path][0](request)
    except (LatticeWalkError, ValueError) as exc:
        raise click.ClickException(str(exc))


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    click.echo(f"wrote {path}")


def _echo_checks(response: VerifyResponse) -> None:
    for check in response.checks:
        status = "PASS" if check.passed else "FAIL"
        click.echo(f"CHECK {check.name}: {status} {check.details}")


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="JSON run configuration.")
@click.option("--seed", type=int, default=None, help="Master seed (overrides config).")
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Directory for CSV outputs (overrides config).")
@click.option("--precision", type=int, default=None,
              help="Decimal digits for displayed rationals (overrides config).")
@click.option("--server", default=None,
              help="Base URL of a running latticewalk service; default runs in-process.")
@click.pass_context
def main(ctx, config_path, seed, out_dir, precision, server):
    """Exact lattice-walk measures, dynamics checks and simulations."""
    ctx.obj = RunSettings(config_path, seed, out_dir, precision, server)


@main.command()
@click.argument("expression")
@click.option("--disjoint-planes", is_flag=True,
              help="Also print the disjoint prefix-cylinder decomposition.")
@click.pass_obj
def measure(settings: RunSettings, expression: str, disjoint_planes: bool):
    """Exact probability of an event EXPRESSION, e.g. 'D[1,2] | !C(3,0)'."""
    depth = _expression_depth(expression)
    request = MeasureRequest(
        table=settings.table(default_rows=max(depth, 1)),
        expression=expression,
        precision=settings.precision,
        disjoint_planes=disjoint_planes,
    )
    response = _call(settings, "/measure", request)
    click.echo(f"exact: {response.exact}")
    click.echo(f"decimal: {response.decimal}")
    if response.disjoint_planes is not None:
        click.echo(f"disjoint planes ({len(response.disjoint_planes)}):")
        for word in response.disjoint_planes:
            click.echo("D[" + ",".join(str(x) for x in word) + "]")


def _expression_depth(expression: str) -> int:
    """Coordinates needed to decide the expression (for default tables)."""
    try:
        event = to_event(parse_expression(expression), Arena())
    except (LatticeWalkError, ValueError) as exc:
        raise click.ClickException(str(exc))
    return event.constrained_depth() + 1


@main.command()
@click.option("--dump-trajectories", type=int, default=0,
              help="Also write the first K replica trajectories.")
@click.pass_obj
def simulate(settings: RunSettings, dump_trajectories: int):
    """Sample an ensemble; write empirical and exact moment CSVs."""
    steps = settings.steps
    request = SimulateRequest(
        lattice=settings.lattice(),
        table=settings.table(default_rows=steps + 2),
        steps=steps,
        replicas=settings.replicas,
        seed=settings.seed,
        precision=settings.precision,
        dump_trajectories=dump_trajectories,
    )
    response = _call(settings, "/simulate", request)
    out = settings.out_dir
    _write(out / "moments.csv", response.moments_csv)
    _write(out / "exact_moments.csv", response.exact_moments_csv)
    if response.trajectories_csv is not None:
        _write(out / "trajectories.csv", response.trajectories_csv)
    click.echo(f"final mean = ({', '.join(response.final_mean)})")
    click.echo(f"final trace = {response.final_trace} (se {response.final_se_trace})")


@main.command("verify-newton1")
@click.pass_context
def verify_newton1(ctx):
    """Check constant velocity, linear mean path and the trace bound."""
    settings: RunSettings = ctx.obj
    steps = settings.steps
    request = VerifyNewton1Request(
        lattice=settings.lattice(),
        table=settings.table(default_rows=steps + 2),
        steps=steps,
        precision=settings.precision,
    )
    response = _call(settings, "/verify/newton1", request)
    _echo_checks(response)
    if not response.passed:
        ctx.exit(1)


@main.command("verify-newton2")
@click.pass_context
def verify_newton2(ctx):
    """Check force = beta * acceleration under the configured schedule."""
    settings: RunSettings = ctx.obj
    request = VerifyNewton2Request(
        lattice=settings.lattice(),
        table=settings.table(default_rows=1),
        schedule=settings.schedule(),
        precision=settings.precision,
    )
    response = _call(settings, "/verify/newton2", request)
    click.echo(f"beta = {response.beta_exact} ({response.beta_decimal})")
    _echo_checks(response)
    if not response.passed:
        ctx.exit(1)


@main.command()
@click.pass_obj
def converge(settings: RunSettings):
    """Fixed-total-time trace decay study; writes convergence.csv."""
    block = settings.data.get("convergence")
    if not block or "n_list" not in block:
        raise click.ClickException(
            'this command needs a "convergence" block with an "n_list"'
        )
    request = ConvergeRequest(
        c=block.get("c", settings.data.get("lattice", {}).get("c", "1")),
        total_time=block.get("total_time", "1"),
        n_list=[int(n) for n in block["n_list"]],
        row=block.get("row"),
        replicas=int(block.get("replicas", 0)),
        seed=settings.seed,
    )
    response = _call(settings, "/converge", request)
    _write(settings.out_dir / "convergence.csv", response.csv)
    for row in response.rows:
        click.echo(
            f"N={row.n_steps} tau={row.tau} exact={row.exact_trace} bound={row.bound}"
        )


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host: str, port: int):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
