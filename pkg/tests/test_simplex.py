"""Exact simplex: small programs, the extremal family, and certificates."""

import random
from dataclasses import replace
from fractions import Fraction

import pytest

from qcmass.lp import LinearProgram, LPError, Row, build_extremal_lp, check_assignment
from qcmass.simplex import certify, solution_to_assignment, solve

F = Fraction


def single_var(relation: str, rhs: Fraction, sense: str) -> LinearProgram:
    return LinearProgram(
        1, ("x",), sense, ((0, F(1)),), (Row("", ((0, F(1)),), relation, rhs),)
    )


# ------------------------------------------------------------ tiny programs


def test_min_above_floor() -> None:
    solution = solve(single_var(">=", F(1, 3), "min"))
    assert solution.status == "optimal"
    assert solution.objective == F(1, 3)
    assert solution.assignment[0] == F(1, 3)
    assert certify(single_var(">=", F(1, 3), "min"), solution).ok


def test_negative_cap_is_infeasible() -> None:
    solution = solve(single_var("<=", F(-1), "min"))
    assert solution.status == "infeasible"
    assert solution.objective is None


def test_max_unbounded() -> None:
    solution = solve(single_var(">=", F(0), "max"))
    assert solution.status == "unbounded"
    assert solution.objective is None


def test_max_against_cap() -> None:
    solution = solve(single_var("<=", F(5), "max"))
    assert solution.status == "optimal"
    assert solution.objective == F(5)


def test_zero_objective_extremal_program() -> None:
    lp, layout = build_extremal_lp(2, "min")
    flat = LinearProgram(lp.num_vars, lp.var_names, "min", ((0, F(0)),), lp.rows)
    solution = solve(flat)
    assert solution.status == "optimal"
    assert solution.objective == F(0)
    # with nothing to optimize the all-zero corner is already optimal
    assert all(v == 0 for v in solution.assignment.values())


def test_negative_rhs_geq_row_feasible() -> None:
    # a >= row with negative rhs is slack at the origin; no artificial needed
    lp = LinearProgram(
        1, ("x",), "min", ((0, F(1)),), (Row("", ((0, F(1)),), ">=", F(-2)),)
    )
    solution = solve(lp)
    assert solution.status == "optimal"
    assert solution.objective == F(0)


def test_unknown_rule_rejected() -> None:
    with pytest.raises(LPError):
        solve(single_var("<=", F(1), "min"), rule="steepest")


# --------------------------------------------------------- extremal family

KNOWN = {
    (2, "min"): (F(-1, 3), 7),
    (2, "max"): (F(1), 4),
    (3, "min"): (F(-4, 5), 13),
    (3, "max"): (F(1), 14),
    (4, "min"): (F(-9, 7), 67),
    (4, "max"): (F(2), 38),
}


@pytest.mark.parametrize("n,sense", sorted(KNOWN))
def test_extremal_optima(n: int, sense: str) -> None:
    lp, layout = build_extremal_lp(n, sense)
    solution = solve(lp)
    objective, pivots = KNOWN[(n, sense)]
    assert solution.status == "optimal"
    assert solution.objective == objective
    # pivot counts are regression data for the deterministic default rule
    assert solution.pivots == pivots
    assert solution.kept_rows == tuple(range(len(lp.rows)))
    assert certify(lp, solution).ok

    witness = solution_to_assignment(layout, solution)
    report = check_assignment(lp, layout, witness)
    assert report.feasible
    assert report.objective_value == objective


@pytest.mark.parametrize("n,sense", sorted(KNOWN))
def test_dantzig_rule_reaches_same_optimum(n: int, sense: str) -> None:
    lp, _ = build_extremal_lp(n, sense)
    solution = solve(lp, rule="dantzig")
    assert solution.status == "optimal"
    assert solution.objective == KNOWN[(n, sense)][0]


def test_denominators_stay_small() -> None:
    # exact pivoting keeps every tableau entry's denominator far below the
    # 64-bit line on the whole family up to dimension 5
    for n in (2, 3, 4, 5):
        solution = solve(build_extremal_lp(n, "min")[0])
        assert solution.status == "optimal"
        assert solution.peak_denominator_bits <= 64
        if n <= 4:
            assert solution.peak_denominator_bits <= 8


def test_n5_minimum_recorded() -> None:
    lp, _ = build_extremal_lp(5, "min")
    solution = solve(lp)
    assert solution.objective == F(-32, 13)
    assert solution.pivots == 140
    assert certify(lp, solution).ok


def test_reduced_cost_signs() -> None:
    for sense, good in (("min", lambda d: d >= 0), ("max", lambda d: d <= 0)):
        solution = solve(build_extremal_lp(2, sense)[0])
        assert all(good(d) for d in solution.reduced_costs.values())


@pytest.mark.parametrize("seed", range(4))
def test_row_shuffle_dimension_four(seed: int) -> None:
    rng = random.Random(seed)
    lp, _ = build_extremal_lp(4, "min")
    rows = list(lp.rows)
    rng.shuffle(rows)
    shuffled = LinearProgram(lp.num_vars, lp.var_names, lp.sense, lp.objective, tuple(rows))
    solution = solve(shuffled)
    assert solution.objective == F(-9, 7)
    assert certify(shuffled, solution).ok


# ------------------------------------------------------------- certificates


def test_certify_requires_optimal() -> None:
    lp = single_var("<=", F(-1), "min")
    with pytest.raises(LPError):
        certify(lp, solve(lp))


def test_certify_rejects_tampered_value() -> None:
    lp, _ = build_extremal_lp(2, "min")
    solution = solve(lp)
    assignment = dict(solution.assignment)
    assignment[0] += F(1, 9)
    report = certify(lp, replace(solution, assignment=assignment))
    assert not report.ok
    assert any("objective mismatch" in f or "violated" in f for f in report.failures)


def test_certify_rejects_wrong_objective() -> None:
    lp, _ = build_extremal_lp(2, "min")
    solution = solve(lp)
    report = certify(lp, replace(solution, objective=F(-1, 2)))
    assert not report.ok
    assert any("objective mismatch" in f for f in report.failures)


def test_certify_rejects_swapped_basis() -> None:
    lp, _ = build_extremal_lp(2, "min")
    solution = solve(lp)
    basis = list(solution.basis)
    outside = next(
        j for j in range(lp.num_vars + len(lp.rows)) if j not in set(basis)
    )
    basis[0] = outside
    report = certify(lp, replace(solution, basis=tuple(basis)))
    assert not report.ok


def test_certify_rejects_incomplete_assignment() -> None:
    lp, _ = build_extremal_lp(2, "min")
    solution = solve(lp)
    assignment = dict(solution.assignment)
    assignment.pop(0)
    report = certify(lp, replace(solution, assignment=assignment))
    assert not report.ok
    assert "assignment must cover every variable" in report.failures


def test_certify_rejects_duplicate_basis() -> None:
    lp, _ = build_extremal_lp(2, "min")
    solution = solve(lp)
    basis = list(solution.basis)
    basis[1] = basis[0]
    report = certify(lp, replace(solution, basis=tuple(basis)))
    assert not report.ok
    assert any("pair up" in f for f in report.failures)


def test_certify_rejects_out_of_range_basis() -> None:
    lp, _ = build_extremal_lp(2, "min")
    solution = solve(lp)
    basis = list(solution.basis)
    basis[0] = 10**6
    report = certify(lp, replace(solution, basis=tuple(basis)))
    assert not report.ok


# ------------------------------------------------------------- extraction


def test_solution_to_assignment_shapes() -> None:
    lp, layout = build_extremal_lp(3, "max")
    solution = solve(lp)
    witness = solution_to_assignment(layout, solution)
    assert witness.box.dimension == 3
    assert len(witness.values) == 8
    assert witness.objective() == F(1)


def test_solution_to_assignment_requires_optimal() -> None:
    _, layout = build_extremal_lp(2, "min")
    bad = solve(single_var("<=", F(-1), "min"))
    with pytest.raises(LPError):
        solution_to_assignment(layout, bad)
