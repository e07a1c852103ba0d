"""
Command-line interface for aimkit.

Usage:
    aimkit diagnose --lambda0 "3" --s0 "-2" --n 40
    aimkit classify --lambda0 "2*cos(pi/8)" --s0 "-1"
    aimkit chain --lambda0 "2*x" --s0 "-5" --n 3
    aimkit solve-eigen --A 0.1 --levels 4 --digits 15

Exit codes: 0 success, 1 residual check failed, 2 input error,
3 predicted failure of the iteration, 4 eigenlevel did not stabilize,
5 degenerate ladder.
"""

import functools
import logging
import sys
from dataclasses import fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click

from aimkit import notes, output
from aimkit.chain import chain_link, residual, sample_points
from aimkit.const_coeff import classify
from aimkit.eigen import reduce_potential, reduce_schrodinger, solve_spectrum
from aimkit.engine import AimProblem, run_ladder
from aimkit.errors import (
    AimError,
    BracketNotFoundError,
    DegenerateLadderError,
    ExpressionError,
    PrecisionExhausted,
    StabilizationError,
)
from aimkit.numcore import parse_expr
from aimkit.numcore import scalar as sc
from aimkit.numcore.ratfun import ParamRatFun
from aimkit.settings import Settings, get_settings, load_config_file, override_settings
from aimkit.state import Artifacts, artifact_reducer

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RESIDUAL = 1
EXIT_INPUT = 2
EXIT_PREDICTED_FAILURE = 3
EXIT_NOT_STABLE = 4
EXIT_DEGENERATE = 5

__all__ = ["cli"]


def _fail(message: str, code: int) -> None:
    click.echo(f"Error: {message}", err=True)
    sys.exit(code)


def _setup_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _flag_names(command: click.Command) -> Dict[str, str]:
    """Config keys spelled like the long flags ("n" for --n), mapped to parameter names."""
    names = {}
    for param in command.params:
        for opt in getattr(param, "opts", []):
            if opt.startswith("--"):
                names[opt[2:].replace("-", "_")] = param.name
    return names


def common_options(func: Callable) -> Callable:
    """--prec, --x0, --out, --plot, --config, --verbose, --digits."""

    @click.option("--prec", type=click.IntRange(64, None), default=None, help="Working precision in bits.")
    @click.option("--x0", "x0_text", default=None, help="Sampling point (decimal or fraction).")
    @click.option("--out", "out_dir", type=click.Path(file_okay=False), default=".", help="Output directory.")
    @click.option("--plot", is_flag=True, help="Also write SVG scatter plots.")
    @click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
                  help="key=value file with defaults for flags and settings.")
    @click.option("--verbose", "-v", is_flag=True, help="Log at DEBUG level.")
    @click.option("--digits", type=click.IntRange(1, None), default=None, help="Significant digits in output.")
    @functools.wraps(func)
    def wrapper(**kwargs):
        _setup_logging(kwargs["verbose"])
        try:
            config = load_config_file(kwargs.pop("config_path"))
        except ValueError as e:
            _fail(str(e), EXIT_INPUT)
        names = {f.name for f in fields(Settings)}
        known = {k: v for k, v in config.items() if k in names}
        extras = {k: v for k, v in config.items() if k not in known}
        flags = _flag_names(click.get_current_context().command)
        for key, value in extras.items():
            dest = flags.get(key, key)
            if dest in kwargs and kwargs[dest] is None:
                kwargs[dest] = value
            elif dest not in kwargs:
                expected = ", ".join(sorted(flags))
                _fail(f"unknown config key: {key} (expected a setting or one of: {expected})", EXIT_INPUT)
        if kwargs.get("x0_text") is not None:
            try:
                known["x0"] = Fraction(str(kwargs["x0_text"]))
            except ValueError:
                _fail(f"invalid x0: {kwargs['x0_text']}", EXIT_INPUT)
        kwargs.pop("x0_text")
        if kwargs.get("prec") is not None:
            kwargs["prec"] = int(kwargs["prec"])
        with override_settings(**known):
            return func(**kwargs)

    return wrapper


def _parse(text: Optional[str], name: str, prec: int) -> ParamRatFun:
    if text is None:
        _fail(f"--{name} is required", EXIT_INPUT)
    try:
        return parse_expr(str(text), "plain", prec)
    except ExpressionError as e:
        _fail(f"cannot parse --{name} {text!r}: {e}", EXIT_INPUT)


def _problem(lambda0_text: Optional[str], s0_text: Optional[str], prec: Optional[int]) -> AimProblem:
    parse_prec = prec or get_settings().prec
    lam = _parse(lambda0_text, "lambda0", parse_prec)
    s = _parse(s0_text, "s0", parse_prec)
    try:
        problem = AimProblem(lam, s, prec) if prec is not None else AimProblem(lam, s)
    except DegenerateLadderError as e:
        _fail(str(e), EXIT_DEGENERATE)
    return problem


def _emit(out_dir: str, artifacts: Artifacts) -> None:
    for path in output.write_artifacts(Path(out_dir), artifacts):
        click.echo(f"wrote {path}")


@click.group()
@click.version_option(version="0.1.0", prog_name="aimkit")
def cli():
    """
    Asymptotic iteration method toolkit.

    Examples:

        aimkit diagnose --lambda0 "2*i" --s0 "4+4*i" --n 50

        aimkit chain --lambda0 "2*x" --s0 "-6" --n 3

        aimkit solve-eigen --A 0.1 --levels 4 --digits 15
    """


@cli.command()
@click.option("--lambda0", "lambda0", default=None, help="lambda0(x) in the expression grammar.")
@click.option("--s0", "s0", default=None, help="s0(x) in the expression grammar.")
@click.option("--n", "n_max", type=click.IntRange(3, None), default=None, help="Number of rungs to sample.")
@click.option("--method", type=click.Choice(["symbolic", "taylor"]), default="symbolic",
              help="Exact ladder or truncated Taylor series at x0.")
@common_options
def diagnose(lambda0, s0, n_max, method, prec, out_dir, plot, verbose, digits):
    """
    Sample alpha_n, Delta_n and the convergence metric at x0.

    Writes diagnostics.csv (and alpha.svg, metric.svg with --plot) and a
    verdict in notes.txt. Exit 3 when the iteration is predicted to fail.
    """
    settings = get_settings()
    n_max = int(n_max or 50)
    digits = int(digits or 20)
    problem = _problem(lambda0, s0, prec)
    try:
        series = run_ladder(problem, n_max, settings.x0, method)
    except DegenerateLadderError as e:
        _fail(str(e), EXIT_DEGENERATE)
    except AimError as e:
        _fail(str(e), EXIT_INPUT)

    lines = []
    complex_coefficients = False
    if problem.is_constant():
        lam, s = problem.lambda0.constant_value(), problem.s0.constant_value()
        complex_coefficients = sc.is_complex(lam) or sc.is_complex(s)
        cls = classify(lam, s, problem.prec)
        verdict = notes.verdict_for_class(cls)
        lines.append(notes.describe_class(cls))
    else:
        metrics = [m for m in series.metrics if m is not None]
        verdict = notes.verdict_for_metric(
            metrics[-1] if metrics else None, series.terminated_at is not None, settings.convergence_tol
        )
    lines += [verdict, notes.VERDICT_NOTES[verdict]]
    if complex_coefficients:
        lines.append(notes.COMPLEX_BASIS_NOTE)

    artifacts = {"diagnostics.csv": output.diagnostics_csv(series, digits), "notes.txt": output.notes_text(lines)}
    if plot:
        artifacts = artifact_reducer(artifacts, output.diagnostics_svgs(series, f"lambda0 = {lambda0}, s0 = {s0}"))
    _emit(out_dir, artifacts)
    click.echo(f"verdict: {verdict}")
    sys.exit(EXIT_PREDICTED_FAILURE if verdict in notes.FAILURE_VERDICTS else EXIT_OK)


@cli.command(name="classify")
@click.option("--lambda0", "lambda0", default=None, help="Constant lambda0.")
@click.option("--s0", "s0", default=None, help="Constant s0.")
@common_options
def classify_cmd(lambda0, s0, prec, out_dir, plot, verbose, digits):
    """Classify a constant-coefficient problem by its characteristic roots."""
    problem = _problem(lambda0, s0, prec)
    if not problem.is_constant():
        _fail("classify needs constant coefficients", EXIT_INPUT)
    lam, s = problem.lambda0.constant_value(), problem.s0.constant_value()
    cls = classify(lam, s, problem.prec)
    verdict = notes.verdict_for_class(cls)
    click.echo(notes.describe_class(cls, int(digits or 20)))
    click.echo(f"verdict: {verdict}")
    sys.exit(EXIT_PREDICTED_FAILURE if verdict in notes.FAILURE_VERDICTS else EXIT_OK)


@cli.command()
@click.option("--lambda0", "lambda0", default=None, help="lambda0(x) in the expression grammar.")
@click.option("--s0", "s0", default=None, help="s0(x) in the expression grammar.")
@click.option("--n", "levels", type=click.IntRange(1, None), default=None, help="Highest chain level.")
@common_options
def chain(lambda0, s0, levels, prec, out_dir, plot, verbose, digits):
    """
    Exactly solvable equations from ladder levels 1..n, written to chain.json.

    Each link carries its Delta_n, the closed-form solution and the residual
    of that solution over the sample points. Exit 5 on a degenerate ladder.
    """
    settings = get_settings()
    levels = int(levels or 3)
    digits = int(digits or 30)
    problem = _problem(lambda0, s0, prec)
    work_prec = problem.prec or settings.prec
    tol = sc.tolerance(work_prec, 4)
    points = sample_points(settings)

    records = []
    terminated_at = None
    passed = True
    for level in range(1, levels + 1):
        try:
            link = chain_link(problem, level, work_prec)
            value = residual(problem.lambda0, problem.s0, link.perturb, link.solution, points)
        except DegenerateLadderError as e:
            _fail(str(e), EXIT_DEGENERATE)
        except AimError as e:
            _fail(f"level {level}: {e}", EXIT_INPUT)
        ok = value == 0 if sc.is_exact(value) else value <= tol
        passed = passed and ok
        if link.perturb.is_zero() and terminated_at is None:
            terminated_at = level
            click.echo(f"delta_{level} vanishes identically; y_{level} is an exact solution")
        records.append(output.chain_record(link, value, digits))
        click.echo(f"level {level}: residual {output.scalar_string(value, 6)}")

    payload = {"links": records, "terminatedAt": terminated_at, "rounding": output.ROUNDING}
    _emit(out_dir, {"chain.json": output.to_json(payload)})
    sys.exit(EXIT_OK if passed else EXIT_RESIDUAL)


@cli.command(name="solve-eigen")
@click.option("--A", "coupling", default=None, help="Quartic coupling A >= 0 of V = x^2 + A x^4.")
@click.option("--potential", default=None, help="Polynomial potential V(x) instead of --A.")
@click.option("--levels", type=click.IntRange(1, 10), default=None, help="Number of levels, from the ground state.")
@click.option("--trace", is_flag=True, help="Write escalation.csv with the (n, E) pairs of every level.")
@click.option("--timing", is_flag=True, help="Record wall time per level in spectrum.json.")
@common_options
def solve_eigen(coupling, potential, levels, trace, timing, prec, out_dir, plot, verbose, digits):
    """
    Eigenvalues of -psi'' + V psi = E psi, written to spectrum.json.

    Exit 4 when a level does not stabilize to the requested digits.
    """
    settings = get_settings()
    levels = int(levels or 4)
    digits = int(digits or 15)
    prec = prec or settings.eigen_prec
    if digits > prec * 0.3:
        _fail(f"{digits} digits need more than {prec} bits; raise --prec", EXIT_INPUT)
    if (coupling is None) == (potential is None):
        _fail("give exactly one of --A and --potential", EXIT_INPUT)
    try:
        if potential is not None:
            problem = reduce_potential(parse_expr(str(potential), "plain", prec), settings.x0, prec)
            label: Dict[str, Any] = {"potential": str(potential)}
        else:
            A = parse_expr(str(coupling), "plain", prec)
            if not A.is_constant():
                raise ExpressionError("A must be a constant", str(coupling))
            problem = reduce_schrodinger(A.constant_value(), settings.x0, prec)
            label = {"A": str(coupling)}
    except (ExpressionError, ValueError) as e:
        _fail(str(e), EXIT_INPUT)

    try:
        results = solve_spectrum(problem, levels - 1, digits)
    except (StabilizationError, BracketNotFoundError, PrecisionExhausted) as e:
        if isinstance(e, StabilizationError) and e.trace and trace:
            rows = "n,E\n" + "".join(f"{n},{output.truncated(E, digits + 2)}\n" for n, E in e.trace)
            _emit(out_dir, {"escalation.csv": rows})
        _fail(str(e), EXIT_NOT_STABLE)

    payload = {
        **label,
        "digits": digits,
        "rounding": output.ROUNDING,
        "levels": [output.eigen_record(r, digits + 2, timing) for r in results],
    }
    artifacts = {"spectrum.json": output.to_json(payload)}
    if trace:
        artifacts = artifact_reducer(artifacts, {"escalation.csv": output.escalation_csv(results, digits + 2)})
    _emit(out_dir, artifacts)
    for r in results:
        flag = "" if r.stabilized else "  (not stabilized)"
        click.echo(f"E_{r.level} = {output.truncated(r.E, digits + 2)}  [n={r.iterations}]{flag}")
    sys.exit(EXIT_OK if all(r.stabilized for r in results) else EXIT_NOT_STABLE)


if __name__ == "__main__":
    cli()
