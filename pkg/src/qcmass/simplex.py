"""Exact two-phase simplex over the rationals, with an independent certificate.

The tableau is kept as integer rows: each row stores one positive integer
denominator and integer cells (last cell is the right-hand side), so a pivot
is integer cross-multiplication followed by a gcd reduction.  This is exact
arithmetic throughout; no floating point enters anywhere.

Standard form and index conventions, shared by :func:`solve` and
:func:`certify`:

* every row is first normalized to a nonnegative right-hand side ("" >= ""
  rows with rhs <= 0 and "<=" rows with rhs < 0 are negated, swapping the
  relation), then column ``num_vars + i`` holds the slack of row i, with
  coefficient +1 when the normalized relation is "<=" and -1 when it is ">=";
* phase 1 introduces artificial variables only for normalized ">=" rows
  (their slack starts negative at the origin); rows whose artificial cannot
  be pivoted out are linearly dependent and are dropped, which is recorded in
  ``kept_rows``;
* ``basis`` and ``reduced_costs`` use these column indices; maximization is
  solved by negating the objective, and reduced costs are reported for the
  problem as posed, so at an optimum they are >= 0 for "min" programs and
  <= 0 for "max" programs on nonbasic columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping

from .grid import NBox, ZERO
from .lp import ExtremalLayout, LinearProgram, LPError, VertexAssignment

_RULES = ("bland", "dantzig")


@dataclass(frozen=True)
class SimplexSolution:
    """Outcome of a solve.

    For non-optimal statuses only ``status``, ``pivots`` and
    ``peak_denominator_bits`` are meaningful.  ``assignment`` covers every
    structural variable (nonbasic ones at 0).
    """

    status: str
    objective: Fraction | None
    assignment: Mapping[int, Fraction]
    basis: tuple[int, ...]
    kept_rows: tuple[int, ...]
    reduced_costs: Mapping[int, Fraction]
    pivots: int
    peak_denominator_bits: int


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    failures: tuple[str, ...]


def _prepared_rows(
    lp: LinearProgram,
) -> list[tuple[dict[int, Fraction], Fraction]]:
    """Normalized rows as sparse equality columns including the slack column."""
    out = []
    for i, row in enumerate(lp.rows):
        coeffs = dict(row.coeffs)
        rhs = row.rhs
        relation = row.relation
        if (relation == ">=" and rhs <= ZERO) or (relation == "<=" and rhs < ZERO):
            coeffs = {j: -c for j, c in coeffs.items()}
            rhs = -rhs
            relation = "<=" if relation == ">=" else ">="
        coeffs[lp.num_vars + i] = Fraction(1 if relation == "<=" else -1)
        out.append((coeffs, rhs))
    return out


def _internal_costs(lp: LinearProgram, ncols: int) -> list[Fraction]:
    """Dense phase-2 cost vector in the internal minimization convention."""
    costs = [ZERO] * ncols
    for j, coef in lp.objective:
        costs[j] = coef if lp.sense == "min" else -coef
    return costs


def _normalize(den: int, cells: list[int]) -> tuple[int, list[int]]:
    g = den
    for x in cells:
        if x:
            g = gcd(g, x)
            if g == 1:
                return den, cells
    if g > 1:
        return den // g, [x // g for x in cells]
    return den, cells


class _Solver:
    """One solve in progress; rows never reorder, so positions track rowids."""

    def __init__(self, lp: LinearProgram, rule: str) -> None:
        self.lp = lp
        self.rule = rule
        self.pivots = 0
        self.peak_bits = 1
        self.num_vars = lp.num_vars
        self.ncols = lp.num_vars + len(lp.rows)
        self.rowids = list(range(len(lp.rows)))

        prepared = _prepared_rows(lp)
        artificial_rows = [
            i for i, (coeffs, _) in enumerate(prepared) if coeffs[lp.num_vars + i] < 0
        ]
        self.num_art = len(artificial_rows)
        total = self.ncols + self.num_art + 1
        self.rows: list[tuple[int, list[int]]] = []
        self.basis: list[int] = []
        next_art = 0
        for i, (coeffs, rhs) in enumerate(prepared):
            den = rhs.denominator
            for coef in coeffs.values():
                den = den * coef.denominator // gcd(den, coef.denominator)
            cells = [0] * total
            for j, coef in coeffs.items():
                cells[j] = int(coef * den)
            cells[-1] = int(rhs * den)
            if coeffs[lp.num_vars + i] > 0:
                self.basis.append(lp.num_vars + i)
            else:
                cells[self.ncols + next_art] = den
                self.basis.append(self.ncols + next_art)
                next_art += 1
            self.rows.append(_normalize(den, cells))
        self._note_bits()

    def _note_bits(self) -> None:
        for den, _ in self.rows:
            if den.bit_length() > self.peak_bits:
                self.peak_bits = den.bit_length()

    def _reduced_cost_row(self, costs: list[Fraction], width: int) -> tuple[int, list[int]]:
        """Objective row c_j - sum over rows of c_basic * row, as one integer row."""
        acc = [Fraction(c) for c in costs] + [ZERO]
        for r, (den, cells) in enumerate(self.rows):
            cb = costs[self.basis[r]] if self.basis[r] < len(costs) else ZERO
            if cb:
                for j in range(width + 1):
                    cell = cells[j] if j < width else cells[-1]
                    if cell:
                        acc[j] -= cb * Fraction(cell, den)
        den = 1
        for f in acc:
            den = lcm(den, f.denominator)
        return den, [int(f * den) for f in acc]

    def _kernel(self, objrow: tuple[int, list[int]], width: int) -> tuple[str, tuple[int, list[int]]]:
        """Pivot until optimal or unbounded; columns 0..width-1 may enter."""
        oden, ocells = objrow
        while True:
            enter = -1
            if self.rule == "bland":
                for j in range(width):
                    if ocells[j] < 0:
                        enter = j
                        break
            else:
                best_cell = 0
                for j in range(width):
                    if ocells[j] < best_cell:
                        best_cell = ocells[j]
                        enter = j
            if enter < 0:
                return "optimal", (oden, ocells)
            leave = -1
            best: tuple[int, int] | None = None
            for r, (den, cells) in enumerate(self.rows):
                a = cells[enter]
                if a > 0:
                    # ratio rhs/a; the row denominator cancels, so compare
                    # cells[-1]/a across rows by cross-multiplication.
                    if best is None:
                        best, leave = (cells[-1], a), r
                    else:
                        diff = cells[-1] * best[1] - best[0] * a
                        if diff < 0 or (diff == 0 and self.basis[r] < self.basis[leave]):
                            best, leave = (cells[-1], a), r
            if leave < 0:
                return "unbounded", (oden, ocells)
            oden, ocells = self._pivot(leave, enter, (oden, ocells))

    def _pivot(
        self, leave: int, enter: int, objrow: tuple[int, list[int]]
    ) -> tuple[int, list[int]]:
        self.pivots += 1
        _, pcells = self.rows[leave]
        pivot = pcells[enter]
        if pivot < 0:
            pcells = [-x for x in pcells]
            pivot = -pivot
        self.rows[leave] = _normalize(pivot, pcells)
        for r, (den, cells) in enumerate(self.rows):
            if r == leave:
                continue
            c = cells[enter]
            if c:
                self.rows[r] = _normalize(
                    den * pivot, [a * pivot - c * b for a, b in zip(cells, pcells)]
                )
        oden, ocells = objrow
        c = ocells[enter]
        if c:
            oden, ocells = _normalize(
                oden * pivot, [a * pivot - c * b for a, b in zip(ocells, pcells)]
            )
        self.basis[leave] = enter
        self._note_bits()
        if oden.bit_length() > self.peak_bits:
            self.peak_bits = oden.bit_length()
        return oden, ocells

    def _phase_one(self) -> bool:
        """Drive artificials to zero; False means the program is infeasible."""
        total = self.ncols + self.num_art
        costs = [ZERO] * self.ncols + [Fraction(1)] * self.num_art
        status, (oden, ocells) = self._kernel(self._reduced_cost_row(costs, total), total)
        assert status == "optimal"  # phase-1 objective is bounded below by 0
        if Fraction(-ocells[-1], oden) != ZERO:
            return False
        for r in range(len(self.rows)):
            if self.basis[r] < self.ncols:
                continue
            den, cells = self.rows[r]
            enter = next((j for j in range(self.ncols) if cells[j] != 0), -1)
            if enter >= 0:
                # The row's value is 0, so pivoting on any nonzero entry
                # keeps the basis feasible.
                self._pivot(r, enter, (1, [0] * (total + 1)))
        keep = [r for r in range(len(self.rows)) if self.basis[r] < self.ncols]
        self.rows = [self.rows[r] for r in keep]
        self.basis = [self.basis[r] for r in keep]
        self.rowids = [self.rowids[r] for r in keep]
        self.rows = [
            _normalize(den, cells[: self.ncols] + [cells[-1]]) for den, cells in self.rows
        ]
        return True

    def run(self) -> SimplexSolution:
        if self.num_art and not self._phase_one():
            return SimplexSolution(
                "infeasible", None, {}, (), (), {}, self.pivots, self.peak_bits
            )
        if not self.num_art:
            self.rows = [
                _normalize(den, cells[: self.ncols] + [cells[-1]])
                for den, cells in self.rows
            ]
        costs = _internal_costs(self.lp, self.ncols)
        status, (oden, ocells) = self._kernel(
            self._reduced_cost_row(costs, self.ncols), self.ncols
        )
        if status == "unbounded":
            return SimplexSolution(
                "unbounded", None, {}, (), (), {}, self.pivots, self.peak_bits
            )
        internal = Fraction(-ocells[-1], oden)
        flip = Fraction(1 if self.lp.sense == "min" else -1)
        assignment = {j: ZERO for j in range(self.num_vars)}
        for r, (den, cells) in enumerate(self.rows):
            if self.basis[r] < self.num_vars:
                assignment[self.basis[r]] = Fraction(cells[-1], den)
        reduced = {j: flip * Fraction(ocells[j], oden) for j in range(self.ncols)}
        return SimplexSolution(
            "optimal",
            flip * internal,
            assignment,
            tuple(self.basis),
            tuple(self.rowids),
            reduced,
            self.pivots,
            self.peak_bits,
        )


def solve(lp: LinearProgram, rule: str = "bland") -> SimplexSolution:
    """Solve ``lp`` exactly.

    ``rule`` picks the entering column: "bland" (lowest eligible index, the
    default; terminates on every input) or "dantzig" (most negative reduced
    cost, ties to the lowest index).  The leaving row is always the smallest
    exact ratio, ties broken by the lowest basic variable index.
    """
    if rule not in _RULES:
        raise LPError(f"unknown pivot rule {rule!r}")
    return _Solver(lp, rule).run()


def certify(lp: LinearProgram, solution: SimplexSolution) -> CertificateReport:
    """Re-derive optimality of a claimed solution from first principles.

    Trusts only ``status``, ``objective``, ``assignment``, ``basis`` and
    ``kept_rows``; the dual vector is recomputed by Gaussian elimination on
    the claimed basis columns, never read from the solver.  The claim passes
    when (1) the assignment satisfies every row and bound exactly and matches
    the claimed objective, and (2) the basis gives a dual vector whose
    reduced costs have the optimal sign everywhere and vanish on every column
    with a nonzero value (complementary slackness).  Together these pin the
    objective between the claim and every feasible point, so a pass is a
    proof of optimality for the rows that were kept, and of its validity for
    the full program via the direct row check.
    """
    if solution.status != "optimal":
        raise LPError("only optimal solutions can be certified")
    failures: list[str] = []
    nv = lp.num_vars
    if set(solution.assignment) != set(range(nv)):
        return CertificateReport(False, ("assignment must cover every variable",))
    x = [Fraction(solution.assignment[j]) for j in range(nv)]
    for j, value in enumerate(x):
        if value < ZERO:
            failures.append(f"variable {lp.var_names[j]} is negative: {value}")
    for k, row in enumerate(lp.rows):
        lhs = sum((coef * x[j] for j, coef in row.coeffs), ZERO)
        ok = lhs <= row.rhs if row.relation == "<=" else lhs >= row.rhs
        if not ok:
            failures.append(f"row {k} violated: {lhs} {row.relation} {row.rhs}")
    claimed = lp.evaluate_objective(x)
    if claimed != solution.objective:
        failures.append(
            f"objective mismatch: assignment gives {claimed}, "
            f"solution claims {solution.objective}"
        )

    prepared = _prepared_rows(lp)
    ncols = nv + len(lp.rows)
    values = list(x) + [ZERO] * len(lp.rows)
    for i, (coeffs, rhs) in enumerate(prepared):
        sigma = coeffs[nv + i]
        residual = rhs - sum((coeffs.get(j, ZERO) * x[j] for j in range(nv)), ZERO)
        values[nv + i] = residual / sigma

    basis = solution.basis
    kept = solution.kept_rows
    if len(basis) != len(kept) or len(set(basis)) != len(basis):
        failures.append("basis and kept rows must pair up without repeats")
        return CertificateReport(False, tuple(failures))
    if any(not 0 <= j < ncols for j in basis) or any(
        not 0 <= i < len(lp.rows) for i in kept
    ):
        failures.append("basis or kept row index out of range")
        return CertificateReport(False, tuple(failures))

    costs = _internal_costs(lp, ncols)
    # Solve G y = c_B where G[k][r] = column basis[k] in kept row r.
    m = len(kept)
    G = [[prepared[i][0].get(basis[k], ZERO) for i in kept] for k in range(m)]
    rhs_vec = [costs[j] for j in basis]
    y = _gaussian_solve(G, rhs_vec)
    if y is None:
        failures.append("claimed basis matrix is singular")
        return CertificateReport(False, tuple(failures))

    basic = set(basis)
    for j in range(ncols):
        d = costs[j] - sum(
            (y[r] * prepared[i][0].get(j, ZERO) for r, i in enumerate(kept)), ZERO
        )
        if j in basic:
            if d != ZERO:
                failures.append(f"basic column {j} has nonzero reduced cost {d}")
        else:
            if d < ZERO:
                failures.append(f"nonbasic column {j} has negative reduced cost {d}")
            elif d != ZERO and values[j] != ZERO:
                failures.append(
                    f"complementary slackness fails on column {j}: "
                    f"value {values[j]}, reduced cost {d}"
                )
    return CertificateReport(not failures, tuple(failures))


def _gaussian_solve(
    matrix: list[list[Fraction]], rhs: list[Fraction]
) -> list[Fraction] | None:
    """Solve a square exact system; None when the matrix is singular."""
    m = len(matrix)
    aug = [list(row) + [rhs[k]] for k, row in enumerate(matrix)]
    for col in range(m):
        pivot_row = next((r for r in range(col, m) if aug[r][col] != ZERO), -1)
        if pivot_row < 0:
            return None
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        pivot = aug[col][col]
        aug[col] = [a / pivot for a in aug[col]]
        for r in range(m):
            if r != col and aug[r][col] != ZERO:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][m] for r in range(m)]


def solution_to_assignment(
    layout: ExtremalLayout, solution: SimplexSolution
) -> VertexAssignment:
    """Read a solved extremal program back as a box plus corner values."""
    if solution.status != "optimal":
        raise LPError("only optimal solutions carry an assignment")
    get = solution.assignment.__getitem__
    intervals = tuple(
        (get(layout.corner_vars[i]), get(layout.corner_vars[i]) + get(layout.length_vars[i]))
        for i in range(layout.dimension)
    )
    values = {flags: get(j) for flags, j in layout.vertex_vars.items()}
    return VertexAssignment(NBox(intervals), values)
