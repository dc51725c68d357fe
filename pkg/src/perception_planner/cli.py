"""
Command-line interface for the perception planner.

Every subcommand reads files and writes either a file (``--out``) or stdout.
Logs and diagnostics go to stderr; failures print one
``error[<kind>]: <message>`` line and exit 1 (domain) or 2 (input/usage).
"""

import io
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, NoReturn, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .core import DeviceClass, PlannerError, Settings, all_profiles, parse_region
from .core.errors import describe_validation_error
from .demo import DemoRunner, DemoScenarios
from .evaluation import (
    BBox,
    Interpolation,
    confidence_interval,
    estimate_depth,
    estimate_depths,
    load_depth_image,
    load_detections,
    load_ground_truth,
    load_samples,
    plot_report,
    threshold_sweep,
    write_depth_estimates,
    write_report,
)
from .placement import OracleReport, best_assignment, load_topology, select, validate
from .simulation import BalanceSimulator, load_sim_config, write_events_csv

# Create CLI app
app = typer.Typer(
    name="perception-planner",
    help="Sensor placement, load balancing and detection evaluation for multi-camera robots",
    add_completion=False,
    pretty_exceptions_enable=False,
)

# Human-readable output on stdout, diagnostics on stderr
console = Console()
err_console = Console(stderr=True)

logger = logging.getLogger(__name__)


def _setup_logging(level: str) -> None:
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, rich_tracebacks=True, show_path=False)],
        force=True,
    )


def _fail(kind: str, message: str, code: int) -> NoReturn:
    line = " ".join(str(message).split())
    err_console.print(f"error[{kind}]: {line}", markup=False, highlight=False, soft_wrap=True)
    raise typer.Exit(code)


@contextmanager
def _reporting_errors() -> Iterator[None]:
    try:
        yield
    except PlannerError as e:
        _fail(e.kind, str(e), e.exit_code)
    except ValidationError as e:
        _fail("config", describe_validation_error(e), 2)
    except OSError as e:
        _fail("io", f"{e.filename or ''}: {e.strerror or e}".lstrip(": "), 2)


def _settings(ctx: typer.Context) -> Settings:
    return ctx.obj if isinstance(ctx.obj, Settings) else Settings()


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")
        logger.info(f"Wrote {out}")


def _write_csv(writer, payload, out: Optional[Path]) -> None:
    if out is None:
        buffer = io.StringIO()
        writer(payload, buffer)
        typer.echo(buffer.getvalue(), nl=False)
    else:
        writer(payload, out)


def _parse_box(text: str) -> BBox:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        _fail("usage", f"--box must be x,y,w,h, got {text!r}", 2)
    try:
        x, y, w, h = (float(p) for p in parts)
        return BBox(x=x, y=y, w=w, h=h)
    except (ValueError, ValidationError):
        _fail("usage", f"--box must be x,y,w,h with w,h >= 0, got {text!r}", 2)


@app.callback()
def main_callback(
    ctx: typer.Context,
    log_level: Optional[str] = typer.Option(
        None, "--log-level", help="CRITICAL, ERROR, WARNING, INFO or DEBUG (default: PLANNER_LOG_LEVEL or WARNING)"
    ),
):
    """Perception planner toolkit."""
    with _reporting_errors():
        settings = Settings.from_env()
        if log_level is not None:
            settings = Settings.model_validate({**settings.model_dump(), "log_level": log_level})
    _setup_logging(settings.log_level)
    ctx.obj = settings


@app.command("select")
def select_command(
    topology: Path = typer.Option(..., "--topology", "-t", help="Topology JSON file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
):
    """
    Assign sensors to processing devices, best fit first.
    """
    with _reporting_errors():
        result = select(load_topology(topology))
        _emit(result.model_dump_json(indent=2) + "\n", out)


@app.command("validate")
def validate_command(
    topology: Path = typer.Option(..., "--topology", "-t", help="Topology JSON file"),
    lenient: bool = typer.Option(
        False, "--lenient", help="Only check devices that take part in device Ethernet"
    ),
):
    """
    Check the connectivity constraints; exits 1 when any is violated.
    """
    with _reporting_errors():
        violations = validate(load_topology(topology), require_sharing=not lenient)
    for violation in violations:
        typer.echo(violation.render())
    if violations:
        raise typer.Exit(1)
    typer.echo("ok")


@app.command("oracle")
def oracle_command(
    ctx: typer.Context,
    topology: Path = typer.Option(..., "--topology", "-t", help="Topology JSON file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output JSON file (default: stdout)"),
    max_sensors: Optional[int] = typer.Option(None, "--max-sensors", help="Largest sensor count to enumerate"),
    max_devices: Optional[int] = typer.Option(None, "--max-devices", help="Largest device count to enumerate"),
):
    """
    Exhaustively search for the best assignment of a small topology.
    """
    settings = _settings(ctx)
    with _reporting_errors():
        assignment, score = best_assignment(
            load_topology(topology),
            max_sensors if max_sensors is not None else settings.oracle_max_sensors,
            max_devices if max_devices is not None else settings.oracle_max_devices,
        )
        _emit(OracleReport(assignment=assignment, score=score).model_dump_json(indent=2) + "\n", out)


@app.command("simulate")
def simulate_command(
    config: Path = typer.Option(..., "--config", "-c", help="Simulation config JSON file"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Metrics CSV (default: stdout)"),
    trace: Optional[Path] = typer.Option(None, "--trace", help="Also write the event trace CSV here"),
):
    """
    Run the load-balance simulation and write per-node metrics.
    """
    with _reporting_errors():
        simulator = BalanceSimulator(load_sim_config(config), record_events=trace is not None)
        metrics = simulator.run()
        _emit(metrics.to_csv(), out)
        if trace is not None:
            write_events_csv(simulator.events, trace)


@app.command("eval")
def eval_command(
    ctx: typer.Context,
    detections: Path = typer.Option(..., "--detections", "-d", help="Detections CSV"),
    ground_truth: Path = typer.Option(..., "--ground-truth", "-g", help="Ground-truth CSV"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Report CSV (default: stdout)"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", min=1, help="Threads for the sweep"),
    interpolation: Interpolation = typer.Option(Interpolation.ALL_POINT, "--interpolation", help="AP interpolation"),
    plot: Optional[Path] = typer.Option(None, "--plot", help="Also draw AP/mAP against threshold to this image"),
):
    """
    Sweep IoU thresholds 0.01..1.00 and report AP per class and mAP.
    """
    settings = _settings(ctx)
    with _reporting_errors():
        report = threshold_sweep(
            load_detections(detections),
            load_ground_truth(ground_truth),
            interpolation=interpolation,
            workers=workers or settings.eval_workers,
        )
        _write_csv(write_report, report, out)
        if plot is not None:
            plot_report(report, plot)


@app.command("depth")
def depth_command(
    ctx: typer.Context,
    image: Path = typer.Option(..., "--image", "-i", help="Depth image: CSV in metres or 16-bit PGM in millimetres"),
    box: Optional[str] = typer.Option(None, "--box", "-b", help="Bounding box x,y,w,h"),
    region: Optional[str] = typer.Option(None, "--region", "-r", help="Averaging window WxH (default 20x20)"),
    detections: Optional[Path] = typer.Option(None, "--detections", help="Estimate every detection of one image"),
    image_id: Optional[str] = typer.Option(None, "--image-id", help="Image id to pick from --detections"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Batch output CSV (default: stdout)"),
):
    """
    Estimate object distance from the depth window around a box.
    """
    settings = _settings(ctx)
    if (box is None) == (detections is None):
        _fail("usage", "give exactly one of --box and --detections", 2)
    try:
        window = parse_region(region) if region is not None else settings.depth_region
    except ValueError as e:
        _fail("usage", str(e), 2)

    with _reporting_errors():
        depth_image = load_depth_image(image)
        if box is not None:
            value = estimate_depth(depth_image, _parse_box(box), window[0], window[1])
            typer.echo(f"{value:.6f}")
            return

        selected = [d for d in load_detections(detections) if image_id is None or d.image_id == image_id]
        estimates = estimate_depths(depth_image, selected, window)
        _write_csv(write_depth_estimates, estimates, out)


@app.command("stats")
def stats_command(
    samples: Path = typer.Option(..., "--samples", "-s", help="One-column CSV of measurements"),
    level: float = typer.Option(0.95, "--level", "-l", help="Confidence level: 0.90, 0.95 or 0.99"),
):
    """
    Confidence interval of the mean of frame-rate samples.
    """
    with _reporting_errors():
        interval = confidence_interval(load_samples(samples), level)
    typer.echo(f"{interval.mean:.6f} ± {interval.half_width:.6f}")
    typer.echo(
        f"mean={interval.mean:.6f} half_width={interval.half_width:.6f} "
        f"level={interval.level:.2f} n={interval.n}"
    )


@app.command("profiles")
def profiles_command():
    """
    Show measured detector throughput per device class (fps, 95% CI).
    """
    table = Table(title="Detector throughput (fps)")
    table.add_column("Model", style="bold")
    classes: List[DeviceClass] = list(DeviceClass)
    for device_class in classes:
        table.add_column(device_class.value, justify="right")

    rows = {}
    for profile in all_profiles():
        rows.setdefault(profile.model, {})[profile.device_class] = profile.render()
    for model, cells in rows.items():
        table.add_row(model, *(cells[c] for c in classes))
    console.print(table)


@app.command("demo")
def demo_command(
    ctx: typer.Context,
    scenario: str = typer.Option(
        DemoScenarios.MIXED_LINKS, "--scenario", "-s",
        help=f"Scenario: {', '.join(DemoScenarios.ALL)}",
    ),
    horizon: float = typer.Option(60.0, "--horizon", help="Simulated seconds"),
    seed: int = typer.Option(0, "--seed", help="Seed for generated topologies and arrivals"),
    output_dir: Optional[Path] = typer.Option(None, "--output", "-o", help="Output directory for demo results"),
    no_recording: bool = typer.Option(False, "--no-recording", help="Disable writing demo outputs"),
):
    """
    Run a scenario through selection, oracle comparison and simulation.
    """
    if scenario not in DemoScenarios.ALL:
        _fail("usage", f"unknown scenario {scenario!r}; choose one of {', '.join(DemoScenarios.ALL)}", 2)

    with _reporting_errors():
        runner = DemoRunner(
            scenario=scenario,
            horizon=horizon,
            seed=seed,
            enable_recording=not no_recording,
            output_dir=output_dir,
            settings=_settings(ctx),
        )
        results = runner.run()
    _display_demo_results(results)


def _display_demo_results(results: dict) -> None:
    """Display demo results as a table."""
    table = Table(title=f"Demo: {results.get('scenario', 'unknown')}")
    table.add_column("Metric")
    table.add_column("Value", justify="right")
    for key, value in results.items():
        if key == "scenario":
            continue
        table.add_row(key.replace("_", " "), "-" if value is None else str(value))
    console.print(table)


# Entry point for CLI
def main():
    """Main entry point for the CLI."""
    app()


if __name__ == "__main__":
    main()
