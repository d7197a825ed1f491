"""Run every randomized suite and require at least 200 cases from each."""

import pytest

import property_suites


@pytest.mark.parametrize(
    "suite", property_suites.ALL_SUITES, ids=lambda s: s.__name__
)
def test_suite(suite) -> None:
    assert suite() >= 200
