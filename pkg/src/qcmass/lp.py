"""Sparse exact-rational linear programs and the extremal box-mass program.

For a quasi-copula Q and a box B = prod [a_i, a_i + s_i] inside [0,1]^n, the
mass V_Q(B) is the signed inclusion-exclusion sum of Q over the 2^n corners
of B.  Which corner-value combinations are realizable is relaxed here to the
linear conditions every quasi-copula satisfies on those corners:

  D  per axis:    a_i + s_i <= 1                       (box stays in the cube)
  E  per edge:    0 <= q(upper) - q(lower) <= s_i      (monotone, 1-Lipschitz)
  F  per corner:  sum of coords - (n-1) <= q <= coord_i (pointwise envelope)

Extremizing the inclusion-exclusion objective over this polytope bounds
V_Q(B) over all quasi-copulas and boxes at once; the bounds are tight for
n = 4 (-9/7 and 2), with witnesses reproduced by :func:`reference_witness`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from .grid import NBox, VertexPattern, ZERO, ONE
from .rational import format_rational, parse_rational

_RELATIONS = ("<=", ">=")


class LPError(ValueError):
    """Raised for malformed programs, layouts, assignments, or LP files."""


def _canonical_terms(
    terms: Iterable[tuple[int, Fraction]], num_vars: int, where: str
) -> tuple[tuple[int, Fraction], ...]:
    """Sort sparse terms by variable index, drop zeros, reject duplicates."""
    seen: dict[int, Fraction] = {}
    for index, coef in terms:
        if not 0 <= index < num_vars:
            raise LPError(f"{where}: variable index {index} out of range")
        if index in seen:
            raise LPError(f"{where}: duplicate variable index {index}")
        coef = Fraction(coef)
        if coef != ZERO:
            seen[index] = coef
    return tuple(sorted(seen.items()))


@dataclass(frozen=True)
class Row:
    """One inequality: sparse coefficients, relation, right-hand side.

    ``family`` is a short tag carried for reporting ("D", "E", "F" for the
    extremal program; anything, including "", for ad hoc programs).
    """

    family: str
    coeffs: tuple[tuple[int, Fraction], ...]
    relation: str
    rhs: Fraction

    def __post_init__(self) -> None:
        if self.relation not in _RELATIONS:
            raise LPError(f"unsupported relation {self.relation!r}")
        object.__setattr__(self, "rhs", Fraction(self.rhs))
        object.__setattr__(self, "coeffs", tuple(self.coeffs))


@dataclass(frozen=True)
class LinearProgram:
    num_vars: int
    var_names: tuple[str, ...]
    sense: str
    objective: tuple[tuple[int, Fraction], ...]
    rows: tuple[Row, ...]

    def __post_init__(self) -> None:
        if self.num_vars < 1:
            raise LPError("program needs at least one variable")
        names = tuple(self.var_names)
        object.__setattr__(self, "var_names", names)
        if len(names) != self.num_vars:
            raise LPError("var_names length must equal num_vars")
        if len(set(names)) != len(names) or any(
            (not n) or any(ch.isspace() for ch in n) for n in names
        ):
            raise LPError("variable names must be unique, nonempty, whitespace-free")
        if self.sense not in ("min", "max"):
            raise LPError(f"sense must be 'min' or 'max', got {self.sense!r}")
        object.__setattr__(
            self,
            "objective",
            _canonical_terms(self.objective, self.num_vars, "objective"),
        )
        rows = []
        for k, row in enumerate(self.rows):
            coeffs = _canonical_terms(row.coeffs, self.num_vars, f"row {k}")
            if not coeffs:
                raise LPError(f"row {k} references no variables")
            rows.append(Row(row.family, coeffs, row.relation, row.rhs))
        object.__setattr__(self, "rows", tuple(rows))

    def evaluate_objective(self, x: Sequence[Fraction]) -> Fraction:
        return sum((coef * x[j] for j, coef in self.objective), ZERO)


@dataclass(frozen=True)
class ExtremalLayout:
    """Variable indexing of the extremal program.

    Order: n box corners a_i, then n edge lengths s_i, then the 2^n corner
    values q_v with v in lexicographic flag order (last axis fastest), for
    2n + 2^n variables in total.
    """

    dimension: int
    corner_vars: tuple[int, ...]
    length_vars: tuple[int, ...]
    vertex_vars: Mapping[tuple[bool, ...], int]

    @property
    def num_vars(self) -> int:
        return 2 * self.dimension + len(self.vertex_vars)


@dataclass(frozen=True)
class VertexAssignment:
    """A box together with a claimed quasi-copula value at each of its corners."""

    box: NBox
    values: Mapping[tuple[bool, ...], Fraction]

    def __post_init__(self) -> None:
        n = self.box.dimension
        expected = set(product((False, True), repeat=n))
        cleaned = {tuple(k): Fraction(v) for k, v in self.values.items()}
        if set(cleaned) != expected:
            raise LPError(f"values must cover all {2**n} corner patterns")
        object.__setattr__(self, "values", cleaned)

    @property
    def dimension(self) -> int:
        return self.box.dimension

    def objective(self) -> Fraction:
        """The inclusion-exclusion sum these corner values give the box."""
        total = ZERO
        for flags, value in self.values.items():
            total += VertexPattern(flags).sign * value
        return total


@dataclass(frozen=True)
class RowViolation:
    """``index`` is the row position, except for family "N" (a violated
    implicit nonnegativity bound), where it is the variable index."""

    index: int
    family: str
    lhs: Fraction
    relation: str
    rhs: Fraction


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    objective_value: Fraction
    violations: tuple[RowViolation, ...]


def build_extremal_lp(
    n: int, sense: str
) -> tuple[LinearProgram, ExtremalLayout]:
    """The dimension-n extremal program and its variable layout.

    Row order is fixed (and is the exported order): the n D rows; then for
    each axis, for each lower corner in flag order, the monotone row followed
    by the Lipschitz row; then for each corner in flag order, the lower
    envelope row followed by its n upper envelope rows.
    """
    if n < 2:
        raise LPError("extremal program needs dimension >= 2")
    if n > 8:
        warnings.warn(
            f"extremal program at dimension {n} has {2 * n + 2**n} variables "
            f"and {n + (2 * n + 1) * 2**n} rows; expect it to be slow",
            stacklevel=2,
        )
    flags_list = list(product((False, True), repeat=n))
    corner_vars = tuple(range(n))
    length_vars = tuple(range(n, 2 * n))
    vertex_vars = {v: 2 * n + k for k, v in enumerate(flags_list)}
    names = (
        [f"a{i + 1}" for i in range(n)]
        + [f"s{i + 1}" for i in range(n)]
        + ["q_" + "".join("u" if f else "l" for f in v) for v in flags_list]
    )

    one = ONE
    rows: list[Row] = []
    for i in range(n):
        rows.append(Row("D", ((i, one), (n + i, one)), "<=", one))
    for i in range(n):
        for v in flags_list:
            if v[i]:
                continue
            u = v[:i] + (True,) + v[i + 1 :]
            qu, qv = vertex_vars[u], vertex_vars[v]
            rows.append(Row("E", ((qu, one), (qv, -one)), ">=", ZERO))
            rows.append(Row("E", ((qu, one), (qv, -one), (n + i, -one)), "<=", ZERO))
    for v in flags_list:
        q = vertex_vars[v]
        lower = [(q, one)] + [(i, -one) for i in range(n)]
        lower += [(n + i, -one) for i in range(n) if v[i]]
        rows.append(Row("F", tuple(lower), ">=", Fraction(-(n - 1))))
        for i in range(n):
            upper = [(q, one), (i, -one)]
            if v[i]:
                upper.append((n + i, -one))
            rows.append(Row("F", tuple(upper), "<=", ZERO))

    objective = tuple(
        (vertex_vars[v], Fraction(VertexPattern(v).sign)) for v in flags_list
    )
    lp = LinearProgram(2 * n + len(flags_list), tuple(names), sense, objective, tuple(rows))
    return lp, ExtremalLayout(n, corner_vars, length_vars, vertex_vars)


def assignment_vector(
    layout: ExtremalLayout, assignment: VertexAssignment
) -> list[Fraction]:
    """The full variable vector (corners, lengths, corner values) of an assignment."""
    if assignment.dimension != layout.dimension:
        raise LPError(
            f"assignment has dimension {assignment.dimension}, "
            f"layout has {layout.dimension}"
        )
    x = [ZERO] * layout.num_vars
    for i, (lo, hi) in enumerate(assignment.box.intervals):
        x[layout.corner_vars[i]] = lo
        x[layout.length_vars[i]] = hi - lo
    for flags, value in assignment.values.items():
        x[layout.vertex_vars[flags]] = value
    return x


def check_assignment(
    lp: LinearProgram, layout: ExtremalLayout, assignment: VertexAssignment
) -> FeasibilityReport:
    """Exactly test an assignment against every row and the implicit bounds x >= 0."""
    x = assignment_vector(layout, assignment)
    violations: list[RowViolation] = []
    for j, value in enumerate(x):
        if value < ZERO:
            violations.append(RowViolation(j, "N", value, ">=", ZERO))
    for k, row in enumerate(lp.rows):
        lhs = sum((coef * x[j] for j, coef in row.coeffs), ZERO)
        ok = lhs <= row.rhs if row.relation == "<=" else lhs >= row.rhs
        if not ok:
            violations.append(RowViolation(k, row.family, lhs, row.relation, row.rhs))
    return FeasibilityReport(not violations, lp.evaluate_objective(x), tuple(violations))


def reference_witness(n: int, sense: str) -> VertexAssignment:
    """The known optimal assignments at dimension 4.

    Minimizing: box [3/7, 6/7]^4 with corner value 3/7 wherever at least three
    coordinates sit at the upper end, 0 elsewhere; the box mass is -9/7.
    Maximizing: box [1/2, 1]^4 with value 1 at the top corner, 1/2 at corners
    with two or three upper ends, 0 below; the box mass is 2.
    """
    if n != 4:
        raise LPError("reference witnesses are recorded for dimension 4 only")
    if sense == "min":
        lo, width, peak = Fraction(3, 7), Fraction(3, 7), Fraction(3, 7)

        def value(ups: int) -> Fraction:
            return peak if ups >= 3 else ZERO

    elif sense == "max":
        lo, width = Fraction(1, 2), Fraction(1, 2)

        def value(ups: int) -> Fraction:
            if ups == 4:
                return ONE
            return Fraction(1, 2) if ups >= 2 else ZERO

    else:
        raise LPError(f"sense must be 'min' or 'max', got {sense!r}")
    box = NBox(((lo, lo + width),) * 4)
    values = {
        flags: value(sum(flags)) for flags in product((False, True), repeat=4)
    }
    return VertexAssignment(box, values)


def conjectured_bound(n: int) -> Fraction:
    """-(n-1)^2 / (2n-1), the conjectured minimum box mass at dimension n."""
    if n < 2:
        raise LPError("bound is defined for dimension >= 2")
    return Fraction(-((n - 1) ** 2), 2 * n - 1)


def conjectured_box(n: int) -> NBox:
    """[(n-1)/(2n-1), (2n-2)/(2n-1)]^n, the box conjectured to attain the bound."""
    if n < 2:
        raise LPError("box is defined for dimension >= 2")
    lo = Fraction(n - 1, 2 * n - 1)
    return NBox(((lo, 2 * lo),) * n)


def candidate_pattern(n: int) -> VertexAssignment:
    """Corner values on the conjectured box generalizing the dimension-4 minimizer.

    Value (n-1)/(2n-1) wherever at least n-1 coordinates sit at the upper end,
    0 elsewhere.  Feasible for every n >= 2, with box mass equal to
    :func:`conjectured_bound`; at n = 4 it coincides with the recorded
    minimizing witness.
    """
    box = conjectured_box(n)
    peak = Fraction(n - 1, 2 * n - 1)
    values = {
        flags: (peak if sum(flags) >= n - 1 else ZERO)
        for flags in product((False, True), repeat=n)
    }
    return VertexAssignment(box, values)


def export_lp(lp: LinearProgram) -> str:
    """Serialize to the LP text format.

    Line oriented: a header ``qclp 1 <num_vars> <sense>``, one ``var <index>
    <name>`` line per variable in index order, one ``row <family> <relation>
    <rhs> <k> <index:coef>...`` line per row in program order (``-`` stands
    for an empty family tag), and a final ``obj <k> <index:coef>...`` line.
    All numbers are exact rationals; terms are sorted by variable index.
    """
    lines = [f"qclp 1 {lp.num_vars} {lp.sense}"]
    for j, name in enumerate(lp.var_names):
        lines.append(f"var {j} {name}")
    for row in lp.rows:
        terms = " ".join(f"{j}:{format_rational(c)}" for j, c in row.coeffs)
        family = row.family if row.family else "-"
        lines.append(
            f"row {family} {row.relation} {format_rational(row.rhs)} "
            f"{len(row.coeffs)} {terms}".rstrip()
        )
    terms = " ".join(f"{j}:{format_rational(c)}" for j, c in lp.objective)
    lines.append(f"obj {len(lp.objective)} {terms}".rstrip())
    return "\n".join(lines) + "\n"


def _parse_terms(
    fields: list[str], start: int, lineno: int
) -> tuple[tuple[int, Fraction], ...]:
    try:
        count = int(fields[start])
    except (IndexError, ValueError) as exc:
        raise LPError(f"line {lineno}: malformed term count") from exc
    raw = fields[start + 1 :]
    if len(raw) != count:
        raise LPError(f"line {lineno}: expected {count} terms, got {len(raw)}")
    terms = []
    for item in raw:
        index_text, sep, coef_text = item.partition(":")
        if not sep:
            raise LPError(f"line {lineno}: malformed term {item!r}")
        try:
            terms.append((int(index_text), parse_rational(coef_text)))
        except ValueError as exc:
            raise LPError(f"line {lineno}: malformed term {item!r}") from exc
    return tuple(terms)


def parse_lp(text: str) -> LinearProgram:
    """Parse the LP text format; inverse of :func:`export_lp`."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise LPError("empty LP text")
    header = lines[0].split()
    if len(header) != 4 or header[0] != "qclp" or header[1] != "1":
        raise LPError(f"line 1: bad header {lines[0]!r}")
    try:
        num_vars = int(header[2])
    except ValueError as exc:
        raise LPError("line 1: malformed variable count") from exc
    sense = header[3]
    names: list[str] = []
    rows: list[Row] = []
    objective: tuple[tuple[int, Fraction], ...] | None = None
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split()
        kind = fields[0]
        if kind == "var":
            if len(fields) != 3 or objective is not None or rows:
                raise LPError(f"line {lineno}: misplaced or malformed var line")
            try:
                index = int(fields[1])
            except ValueError as exc:
                raise LPError(f"line {lineno}: malformed var index") from exc
            if index != len(names):
                raise LPError(f"line {lineno}: var lines must appear in index order")
            names.append(fields[2])
        elif kind == "row":
            if len(fields) < 5 or objective is not None:
                raise LPError(f"line {lineno}: misplaced or malformed row line")
            family = "" if fields[1] == "-" else fields[1]
            relation = fields[2]
            try:
                rhs = parse_rational(fields[3])
            except ValueError as exc:
                raise LPError(f"line {lineno}: malformed rhs") from exc
            rows.append(Row(family, _parse_terms(fields, 4, lineno), relation, rhs))
        elif kind == "obj":
            if objective is not None:
                raise LPError(f"line {lineno}: duplicate obj line")
            objective = _parse_terms(fields, 1, lineno)
        else:
            raise LPError(f"line {lineno}: unknown directive {kind!r}")
    if objective is None:
        raise LPError("missing obj line")
    if len(names) != num_vars:
        raise LPError(f"header declares {num_vars} variables, found {len(names)}")
    try:
        return LinearProgram(num_vars, tuple(names), sense, objective, tuple(rows))
    except LPError:
        raise
    except ValueError as exc:
        raise LPError(str(exc)) from exc
