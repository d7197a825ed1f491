"""Command line front end.

Every command prints deterministic bytes for a given invocation (dicts are
emitted with sorted keys, cells and rows in lexicographic order), so outputs
can be diffed and pinned in regression files.  Exit codes: 0 for success or
a confirmed property, 1 for an honest negative finding (a failed check, an
infeasible witness, a failed certificate), 2 for usage and parse errors.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import click

from .grid import (
    GridError,
    GridQuasiCopula,
    MassGrid,
    NBox,
    builtin_example,
    grid_from_json,
    grid_payload,
    make_grid_qc,
    marginalize,
)
from .lp import (
    LPError,
    build_extremal_lp,
    candidate_pattern,
    check_assignment,
    conjectured_bound,
    conjectured_box,
    export_lp,
    reference_witness,
)
from .rational import RationalParseError, format_rational, parse_rational
from .simplex import certify, solution_to_assignment, solve

ONE = Fraction(1)


@dataclass(frozen=True)
class CommandResult:
    """What a command produced: an exit code plus stdout/stderr payloads."""

    exit_code: int
    output: str = ""
    error: str = ""


@click.group()
def main() -> None:
    """Exact tools for extreme box masses of piecewise-uniform quasi-copulas."""


def _finish(result: CommandResult) -> None:
    if result.output:
        click.echo(result.output, nl=False)
    if result.error:
        click.echo(result.error, nl=False, err=True)
    sys.exit(result.exit_code)


def _guarded(fn, *args, **kwargs) -> None:
    try:
        result = fn(*args, **kwargs)
    except (GridError, LPError, RationalParseError) as exc:
        _finish(CommandResult(2, error=f"error: {exc}\n"))
        return
    _finish(result)


def _load_qc(example: str | None, file: str | None) -> GridQuasiCopula:
    if (example is None) == (file is None):
        raise click.UsageError("pass exactly one of --example and --file")
    if example is not None:
        return builtin_example(example)
    return make_grid_qc(grid_from_json(Path(file).read_text()))


def _parse_box(text: str) -> NBox:
    intervals = []
    for piece in text.split(","):
        lo_text, sep, hi_text = piece.partition(":")
        if not sep:
            raise GridError(f"malformed interval {piece!r}, expected lo:hi")
        intervals.append((parse_rational(lo_text), parse_rational(hi_text)))
    return NBox(tuple(intervals))


def _flags_key(flags: tuple[bool, ...]) -> str:
    return "".join("u" if f else "l" for f in flags)


# ---------------------------------------------------------------- extremize


def run_extremize(
    dimension: int, direction: str, fmt: str, emit_lp: str | None
) -> CommandResult:
    lp, layout = build_extremal_lp(dimension, direction)
    if emit_lp is not None:
        Path(emit_lp).write_text(export_lp(lp))
    solution = solve(lp)
    if solution.status != "optimal":
        return CommandResult(1, error=f"solver returned {solution.status}\n")
    report = certify(lp, solution)
    assignment = solution_to_assignment(layout, solution)
    verdict = "pass" if report.ok else "fail"
    if fmt == "json":
        payload = {
            "schema": "qcmass.extremize/1",
            "dimension": dimension,
            "direction": direction,
            "optimum": format_rational(solution.objective),
            "box": [
                [format_rational(lo), format_rational(hi)]
                for lo, hi in assignment.box.intervals
            ],
            "vertex_values": {
                _flags_key(flags): format_rational(value)
                for flags, value in sorted(assignment.values.items())
            },
            "pivots": solution.pivots,
            "certificate": verdict,
        }
        output = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        lines = [f"optimum {format_rational(solution.objective)}"]
        for i, (lo, hi) in enumerate(assignment.box.intervals):
            lines.append(
                f"box axis {i + 1} [{format_rational(lo)}, {format_rational(hi)}]"
            )
        for flags, value in sorted(assignment.values.items()):
            lines.append(f"vertex q_{_flags_key(flags)} {format_rational(value)}")
        lines.append(f"pivots {solution.pivots}")
        lines.append(f"certificate {verdict}")
        for failure in report.failures:
            lines.append(f"certificate-failure {failure}")
        output = "\n".join(lines) + "\n"
    return CommandResult(0 if report.ok else 1, output)


@main.command()
@click.option("-n", "--dimension", type=int, required=True, help="Box dimension, at least 2.")
@click.option("--direction", type=click.Choice(["min", "max"]), required=True)
@click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text", show_default=True
)
@click.option(
    "--emit-lp",
    type=click.Path(dir_okay=False, writable=True),
    default=None,
    help="Also write the program in LP text format to this path.",
)
def extremize(dimension: int, direction: str, fmt: str, emit_lp: str | None) -> None:
    """Solve the extremal program: the least or greatest box mass at a dimension."""
    _guarded(run_extremize, dimension, direction, fmt, emit_lp)


# ------------------------------------------------------------------- verify

_CHECK_KINDS = (
    ("grounded", ("grounded",)),
    ("uniform-margins", ("margin",)),
    ("monotone", ("monotone",)),
    ("lipschitz", ("lipschitz",)),
    ("frechet-envelope", ("frechet-lower", "frechet-upper")),
)


def run_verify(example: str | None, file: str | None) -> CommandResult:
    qc = _load_qc(example, file)
    report = qc.verify_axioms()
    violations = list(report.violations) + list(qc.frechet_envelope_check())
    lines = []
    all_ok = True
    for check, kinds in _CHECK_KINDS:
        relevant = [v for v in violations if v.kind in kinds]
        lines.append(f"{check} {'pass' if not relevant else 'fail'}")
        all_ok = all_ok and not relevant
        for v in relevant:
            loc = "[" + ",".join(str(c) for c in v.location) + "]"
            lines.append(
                f"violation {v.kind} {loc} {format_rational(v.lhs)} {format_rational(v.rhs)}"
            )
    total = qc.grid.total_mass()
    if total == ONE:
        lines.append("total-mass pass")
    else:
        lines.append("total-mass fail")
        lines.append(f"violation total-mass [] {format_rational(total)} 1")
        all_ok = False
    lines.append(f"verdict {'pass' if all_ok else 'fail'}")
    return CommandResult(0 if all_ok else 1, "\n".join(lines) + "\n")


@main.command()
@click.option("--example", type=click.Choice(["q1", "q2"]), default=None)
@click.option("--file", type=click.Path(exists=True, dir_okay=False), default=None)
def verify(example: str | None, file: str | None) -> None:
    """Check a mass grid against every quasi-copula axiom and the envelope."""
    _guarded(run_verify, example, file)


# ------------------------------------------------------------------- volume


def run_volume(example: str | None, file: str | None, box_text: str) -> CommandResult:
    qc = _load_qc(example, file)
    box = _parse_box(box_text)
    return CommandResult(0, format_rational(qc.box_volume(box)) + "\n")


@main.command()
@click.option("--example", type=click.Choice(["q1", "q2"]), default=None)
@click.option("--file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option(
    "--box",
    "box_text",
    required=True,
    help="Comma-separated per-axis intervals lo:hi, e.g. '3/7:6/7,3/7:6/7'.",
)
def volume(example: str | None, file: str | None, box_text: str) -> None:
    """Print the exact mass a grid's function places on a box."""
    _guarded(run_volume, example, file, box_text)


# ------------------------------------------------------------------- margin


def run_margin(
    example: str | None, file: str | None, drop_axis: int, fmt: str
) -> CommandResult:
    qc = _load_qc(example, file)
    if not 1 <= drop_axis <= qc.dimension:
        raise GridError(
            f"--drop-axis must be between 1 and {qc.dimension}, got {drop_axis}"
        )
    margin = marginalize(qc.grid, drop_axis - 1)
    if fmt == "json":
        payload = grid_payload(margin)
        payload["schema"] = "qcmass.grid/1"
        return CommandResult(0, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    m = margin.dimension
    header = ",".join(f"cell_lo_{i + 1},cell_hi_{i + 1}" for i in range(m)) + ",mass"
    lines = [header]
    for cell, mass in margin.iter_cells():
        fields = []
        for axis, c in enumerate(cell):
            pts = margin.partitions[axis].breakpoints
            fields += [format_rational(pts[c]), format_rational(pts[c + 1])]
        fields.append(format_rational(mass))
        lines.append(",".join(fields))
    return CommandResult(0, "\n".join(lines) + "\n")


@main.command()
@click.option("--example", type=click.Choice(["q1", "q2"]), default=None)
@click.option("--file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--drop-axis", type=int, required=True, help="1-based axis to sum out.")
@click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True
)
def margin(example: str | None, file: str | None, drop_axis: int, fmt: str) -> None:
    """Sum a grid's mass over one axis; csv lists every cell, json is a grid file."""
    _guarded(run_margin, example, file, drop_axis, fmt)


# --------------------------------------------------------------- conjecture


def run_conjecture(max_dim: int) -> CommandResult:
    if max_dim < 2:
        raise LPError(f"--max-dim must be at least 2, got {max_dim}")
    lines = ["n,lp_min,conjectured,box,candidate_feasible,verdict"]
    for n in range(2, max_dim + 1):
        lp, layout = build_extremal_lp(n, "min")
        solution = solve(lp)
        if solution.status != "optimal":
            return CommandResult(1, error=f"solver returned {solution.status} at n={n}\n")
        bound = conjectured_bound(n)
        lo, hi = conjectured_box(n).intervals[0]
        report = check_assignment(lp, layout, candidate_pattern(n))
        if solution.objective == bound:
            verdict = "matches"
        elif solution.objective < bound:
            verdict = "below"
        else:
            verdict = "above"
        lines.append(
            f"{n},{format_rational(solution.objective)},{format_rational(bound)},"
            f"{format_rational(lo)}:{format_rational(hi)},"
            f"{'true' if report.feasible else 'false'},{verdict}"
        )
    return CommandResult(0, "\n".join(lines) + "\n")


@main.command()
@click.option("--max-dim", type=int, default=4, show_default=True)
def conjecture(max_dim: int) -> None:
    """Compare each dimension's relaxation optimum with the conjectured minimum.

    The relaxation bounds every quasi-copula box mass from below, so a
    "matches" verdict proves the conjectured value is the least possible at
    that dimension, while "below" means the relaxation alone cannot decide.
    """
    _guarded(run_conjecture, max_dim)


# ------------------------------------------------------------ check-witness

# The box masses the recorded dimension-4 witnesses must reproduce.
_RECORDED_OPTIMA = {"min": Fraction(-9, 7), "max": Fraction(2)}


def run_check_witness(dimension: int, direction: str) -> CommandResult:
    lp, layout = build_extremal_lp(dimension, "min")
    directions = ["min", "max"] if direction == "both" else [direction]
    lines = []
    all_ok = True
    for sense in directions:
        witness = reference_witness(dimension, sense)
        report = check_assignment(lp, layout, witness)
        expected = _RECORDED_OPTIMA[sense]
        lines.append(f"direction {sense}")
        lines.append(f"objective {format_rational(report.objective_value)}")
        lines.append(f"expected {format_rational(expected)}")
        lines.append(f"feasible {'true' if report.feasible else 'false'}")
        all_ok = all_ok and report.feasible and report.objective_value == expected
        for v in report.violations:
            where = lp.var_names[v.index] if v.family == "N" else str(v.index)
            lines.append(
                f"violation {v.family} {where} {format_rational(v.lhs)} "
                f"{v.relation} {format_rational(v.rhs)}"
            )
    lines.append(f"verdict {'pass' if all_ok else 'fail'}")
    return CommandResult(0 if all_ok else 1, "\n".join(lines) + "\n")


@main.command("check-witness")
@click.option("-n", "--dimension", type=int, required=True)
@click.option(
    "--direction",
    type=click.Choice(["min", "max", "both"]),
    default="both",
    show_default=True,
)
def check_witness(dimension: int, direction: str) -> None:
    """Replay the recorded optimal corner assignments against every row."""
    _guarded(run_check_witness, dimension, direction)
