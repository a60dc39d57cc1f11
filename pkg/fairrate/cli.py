"""
Command-line interface for fairrate.
"""

import functools
import json
import os
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Tuple

import click
from dotenv import dotenv_values

from .bench import BenchConfig, emit_report, run_oracle_count_experiment, run_parallel_timing_experiment
from .config import ENV_VARIABLES, Config, get_global_config_path, load_config
from .decomposition import finest_decomposer, shapley_decomposed
from .errors import FairRateError
from .generator import GenSpec, generate_decomposable, generate_indecomposable
from .logging_config import setup_logging
from .model import Instance, instance_to_json, load_instance, save_instance
from .oracle import EntropyOracle, conditional_entropy, dual_entropy, entropy, mutual_information, verify_polymatroid
from .polyhedron import CHECKS, enumerate_extreme_points
from .shapley import ShapleyMethod, shapley_by_permutations, shapley_direct, shapley_sampled
from .utils import parse_coalition, parse_permutation, parse_rates, parse_rational, parse_size_range


def _handle_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Turn library errors into click errors so the exit status is nonzero."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except (FairRateError, ValueError) as exc:
            raise click.ClickException(str(exc)) from exc

    return wrapper


def _config(ctx: click.Context) -> Config:
    return ctx.obj["config"]


def _open(ctx: click.Context, path: str) -> Tuple[Instance, EntropyOracle]:
    instance = load_instance(path)
    return instance, EntropyOracle(instance.model, memoize=_config(ctx).memoize)


def _echo_json(payload: Dict[str, Any]) -> None:
    click.echo(json.dumps(payload, indent=2))


instance_option = click.option(
    "--instance",
    "instance_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False),
    help="Instance JSON file",
)
json_option = click.option("--json", "as_json", is_flag=True, help="Print JSON instead of text")
force_option = click.option("--force", is_flag=True, help="Run above the enumeration cap (logs a warning)")


@click.group()
@click.option("--log-level", default="WARNING", show_default=True, help="Logging level")
@click.option("--structured-logs", is_flag=True, help="Emit JSON log lines")
@click.pass_context
def cli(ctx: click.Context, log_level: str, structured_logs: bool) -> None:
    """Fair source-coding rate allocation for multiterminal data compression."""
    try:
        setup_logging(log_level, structured=structured_logs)
        environment = dict(os.environ)
        config = load_config()
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    ctx.ensure_object(dict)
    ctx.obj["config"] = config
    ctx.obj["environment"] = environment


@cli.command()
@instance_option
@click.option("--rates", required=True, help='Comma-separated rates, e.g. "1,9/5,2"')
@click.option("--form", type=click.Choice(sorted(CHECKS)), default="sw", show_default=True)
@click.option("--relaxed-sum-rate", is_flag=True, help="Accept r(V) >= H(V) (sw and dual only)")
@json_option
@force_option
@click.pass_context
@_handle_errors
def check(
    ctx: click.Context,
    instance_path: str,
    rates: str,
    form: str,
    relaxed_sum_rate: bool,
    as_json: bool,
    force: bool,
) -> None:
    """Check whether a rate vector is achievable."""
    _, oracle = _open(ctx, instance_path)
    report = CHECKS[form](
        oracle,
        parse_rates(rates),
        allow_excess_sum_rate=relaxed_sum_rate,
        max_players=_config(ctx).max_exhaustive_players,
        force=force,
    )
    if as_json:
        violated = report.violated
        _echo_json(
            {
                "form": form,
                "is_member": report.is_member,
                "violated": None
                if violated is None
                else {
                    "coalition": list(violated.coalition.labels()),
                    "bound": str(violated.bound),
                    "actual": str(violated.actual),
                    "kind": violated.kind,
                },
                "tight_sets": [list(c.labels()) for c in report.tight_sets],
            }
        )
        return
    if report.is_member:
        click.echo(click.style(f"member ({form})", fg="green"))
    else:
        click.echo(click.style(f"not a member ({form}): {report.violated}", fg="red"))
    click.echo("Tight sets: " + (", ".join(str(c) for c in report.tight_sets) or "none"))


@cli.command("extreme-points")
@instance_option
@json_option
@click.option("--csv", "as_csv", is_flag=True, help="Print CSV instead of text")
@force_option
@click.pass_context
@_handle_errors
def extreme_points(ctx: click.Context, instance_path: str, as_json: bool, as_csv: bool, force: bool) -> None:
    """List the extreme points of the achievable region."""
    _, oracle = _open(ctx, instance_path)
    points = enumerate_extreme_points(oracle, max_players=_config(ctx).max_permutation_players, force=force)
    if as_json:
        _echo_json(
            {
                "points": [p.as_strings() for p in points],
                "by_permutation": {
                    ",".join(str(i + 1) for i in perm): vector.as_strings()
                    for perm, vector in points.by_permutation.items()
                },
            }
        )
    elif as_csv:
        click.echo(",".join(f"r{i + 1}" for i in range(oracle.ground_size)))
        for point in points:
            click.echo(",".join(point.as_strings()))
    else:
        click.echo(f"{len(points)} extreme points:")
        for point in points:
            click.echo(f"  {point}")


@cli.command()
@instance_option
@click.option(
    "--method",
    type=click.Choice([m.value for m in ShapleyMethod]),
    default=ShapleyMethod.DIRECT.value,
    show_default=True,
)
@click.option("--samples", type=int, default=None, help="Permutations to sample (sampled method)")
@click.option("--seed", type=int, default=None, help="Sampling seed")
@click.option("--perm", default=None, help='Permutation for the decomposer search, e.g. "3,2,1"')
@click.option("--parallel", is_flag=True, help="Solve subgames on a worker pool (decomposed method)")
@click.option("--jobs", type=int, default=None, help="Worker count")
@json_option
@force_option
@click.pass_context
@_handle_errors
def shapley(
    ctx: click.Context,
    instance_path: str,
    method: str,
    samples: Optional[int],
    seed: Optional[int],
    perm: Optional[str],
    parallel: bool,
    jobs: Optional[int],
    as_json: bool,
    force: bool,
) -> None:
    """Compute the Shapley rate allocation."""
    config = _config(ctx)
    _, oracle = _open(ctx, instance_path)
    chosen = ShapleyMethod(method)
    seed = config.default_seed if seed is None else seed
    if chosen is ShapleyMethod.DIRECT:
        result = shapley_direct(oracle, max_players=config.max_exhaustive_players, force=force)
    elif chosen is ShapleyMethod.PERMUTATIONS:
        result = shapley_by_permutations(oracle, max_players=config.max_permutation_players, force=force)
    elif chosen is ShapleyMethod.SAMPLED:
        result = shapley_sampled(oracle, config.sampled_samples if samples is None else samples, seed)
    else:
        result = shapley_decomposed(
            oracle,
            permutation=parse_permutation(perm, oracle.ground_size) if perm else None,
            parallel=parallel,
            n_jobs=jobs or config.n_jobs,
            max_players=config.max_exhaustive_players,
            force=force,
        )
    if as_json:
        payload = result.to_dict()
        payload["ledger"] = oracle.ledger.summary()
        _echo_json(payload)
        return
    click.echo(f"Shapley value ({result.method.value}): {result.value}")
    click.echo(f"Oracle calls: {result.oracle_calls} distinct, {result.raw_oracle_calls} raw")
    if result.sample_count is not None:
        click.echo(f"Samples: {result.sample_count} (seed {result.seed}, {result.rng_algorithm})")
    if result.extreme_point_mean_differs:
        click.echo(click.style(f"Extreme-point centroid differs: {result.extreme_point_mean}", fg="yellow"))
    if result.decomposer is not None:
        click.echo(f"Finest decomposer: {result.decomposer.finest}")


@cli.command()
@instance_option
@click.option("--perm", default=None, help='Player order, e.g. "3,2,1" (identity by default)')
@json_option
@click.pass_context
@_handle_errors
def decompose(ctx: click.Context, instance_path: str, perm: Optional[str], as_json: bool) -> None:
    """Find the finest decomposer of the game."""
    _, oracle = _open(ctx, instance_path)
    permutation = parse_permutation(perm, oracle.ground_size) if perm else None
    result = finest_decomposer(oracle, permutation)
    if as_json:
        payload = result.to_dict()
        payload["core_dimension"] = oracle.ground_size - len(result.finest)
        _echo_json(payload)
        return
    click.echo(f"Finest decomposer: {result.finest}")
    click.echo("Decomposable: " + ("yes" if result.decomposable else "no"))
    click.echo(f"Extreme point: {result.witness_extreme_point}")
    click.echo(f"Core dimension: {oracle.ground_size - len(result.finest)}")
    click.echo(f"Oracle calls: {result.oracle_calls}")


@cli.command("entropy")
@instance_option
@click.option("-x", "--coalition", "x_text", required=True, help='Coalition X, e.g. "2,3"')
@click.option("-y", "--given", "y_text", default=None, help="Coalition Y for conditional and mutual information")
@click.pass_context
@_handle_errors
def entropy_command(ctx: click.Context, instance_path: str, x_text: str, y_text: Optional[str]) -> None:
    """Evaluate information quantities of coalitions."""
    _, oracle = _open(ctx, instance_path)
    x = parse_coalition(x_text, oracle.ground_size)
    click.echo(f"H({x}) = {entropy(oracle, x)}")
    click.echo(f"H#({x}) = {dual_entropy(oracle, x)}")
    if y_text is not None:
        y = parse_coalition(y_text, oracle.ground_size)
        click.echo(f"H({x}|{y}) = {conditional_entropy(oracle, x, y)}")
        click.echo(f"I({x};{y}) = {mutual_information(oracle, x, y)}")


@cli.command()
@instance_option
@force_option
@click.pass_context
@_handle_errors
def verify(ctx: click.Context, instance_path: str, force: bool) -> None:
    """Check that the entropy function is a polymatroid rank function."""
    instance = load_instance(instance_path)
    report = verify_polymatroid(instance.model, max_players=_config(ctx).max_exhaustive_players, force=force)
    if report.is_polymatroid:
        click.echo(click.style("polymatroid: normalized, monotone, submodular", fg="green"))
        return
    left, right = report.witness
    click.echo(click.style(f"not a polymatroid: {report.failure} fails at {left} and {right}", fg="red"))
    ctx.exit(1)


@cli.command()
@click.option("--players", type=int, required=True)
@click.option("--blocks", default="random", show_default=True, help='Planted block count or "random"')
@click.option("--total", default="50", show_default=True, help="Target H(V)")
@click.option("--seed", type=int, default=None)
@click.option("--max-denominator", type=int, default=10, show_default=True)
@click.option("--indecomposable", is_flag=True, help="Link all players into one block")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout")
@click.pass_context
@_handle_errors
def gen(
    ctx: click.Context,
    players: int,
    blocks: str,
    total: str,
    seed: Optional[int],
    max_denominator: int,
    indecomposable: bool,
    output: Optional[str],
) -> None:
    """Generate a random game instance."""
    spec = GenSpec(
        players=players,
        target_total_entropy=parse_rational(total),
        block_count=blocks if blocks == "random" else int(blocks),
        max_denominator=max_denominator,
        seed=_config(ctx).default_seed if seed is None else seed,
    )
    generated = generate_indecomposable(spec) if indecomposable else generate_decomposable(spec)
    if output:
        save_instance(output, generated.model, generated.planted)
        click.echo(f"Wrote {players}-player instance to {output}")
    else:
        click.echo(instance_to_json(generated.model, generated.planted), nl=False)


def _bench_options(command: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.option("--sizes", default="5..15", show_default=True, help='Player counts, "5..15" or "5,8"'),
        click.option("--clusters", type=int, default=20, show_default=True),
        click.option("--total", default="50", show_default=True, help="Target H(V)"),
        click.option("--seed", type=int, default=None),
        click.option("--jobs", type=int, default=None, help="Worker count"),
        click.option("-o", "--output", type=click.Path(dir_okay=False), required=True, help="CSV path"),
        click.option("--aggregate", type=click.Path(dir_okay=False), default=None, help="Means file path"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _bench_config(
    ctx: click.Context,
    sizes: str,
    clusters: int,
    total: str,
    seed: Optional[int],
    jobs: Optional[int],
    **extra: Any,
) -> BenchConfig:
    config = _config(ctx)
    return BenchConfig(
        sizes=parse_size_range(sizes),
        clusters=clusters,
        total_entropy=parse_rational(total),
        seed=config.default_seed if seed is None else seed,
        n_jobs=jobs or config.n_jobs,
        max_players=config.max_exhaustive_players,
        **extra,
    )


@cli.group()
def bench() -> None:
    """Reproduce the complexity experiments."""


@bench.command("calls")
@_bench_options
@click.pass_context
@_handle_errors
def bench_calls(ctx: click.Context, output: str, aggregate: Optional[str], **options: Any) -> None:
    """Count oracle calls of the direct and decomposed Shapley methods."""
    config = _bench_config(ctx, **options)
    rows = run_oracle_count_experiment(config)
    written, means = emit_report(rows, output, aggregate_path=aggregate, n_jobs=config.jobs)
    click.echo(f"Wrote {len(rows)} rows to {written} and means to {means}")


@bench.command("timing")
@_bench_options
@click.option("--repetitions", type=int, default=5, show_default=True)
@click.pass_context
@_handle_errors
def bench_timing(ctx: click.Context, output: str, aggregate: Optional[str], repetitions: int, **options: Any) -> None:
    """Time direct against parallel decomposed Shapley on prememoized tables."""
    config = _bench_config(ctx, repetitions=repetitions, **options)
    rows = run_parallel_timing_experiment(config)
    written, means = emit_report(rows, output, aggregate_path=aggregate, n_jobs=config.jobs)
    click.echo(f"Wrote {len(rows)} rows to {written} and means to {means}")


@cli.command("config")
@click.pass_context
def show_config(ctx: click.Context) -> None:
    """Display the active configuration and where each value comes from."""
    environment: Dict[str, str] = ctx.obj["environment"]
    local_values = dotenv_values(".env") if Path(".env").exists() else {}
    global_path = get_global_config_path()
    global_values = dotenv_values(global_path) if global_path.exists() else {}
    use_global = (environment.get("FAIRRATE_USE_GLOBAL_CONFIG") or "").strip().lower() in {"1", "true", "yes", "y", "on"}

    click.echo("Current Configuration:")
    click.echo("=" * 50)
    for key, value in _config(ctx).as_dict().items():
        variable = ENV_VARIABLES[key]
        if variable in environment:
            source = "environment"
        elif variable in local_values:
            source = "local .env"
        elif use_global and variable in global_values:
            source = "global .env"
        else:
            source = "default"
        click.echo(f"  {key} = {value}  [{source}: {variable}]")
    click.echo("=" * 50)
    click.echo("Priority: Environment > Local > Global > Default")


def main() -> None:
    cli(prog_name="fairrate")


if __name__ == "__main__":
    main()
