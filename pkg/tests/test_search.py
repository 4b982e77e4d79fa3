import json
import math
from fractions import Fraction

import pytest

from models.asymptotics import BoundFamily, PrimePower, congruence_bound, principal_bound
from models.search import (
    PUBLISHED_CONGRUENCE,
    PUBLISHED_PRINCIPAL,
    GridRow,
    SearchConfig,
    decade,
    descent_grid,
    load_search_config,
    polish_grid,
    prime_ideal_norms,
    prime_powers,
    search_congruence,
    search_principal,
    search_ring_of_integers,
    search_rt_baseline,
    select_best,
    y_grid,
)
from utils.errors import EmptyGridError, InvalidArgumentError, SpecFileError

SMALL = SearchConfig(prime_limit_Q=7, prime_limit_q=13, r_range=(2, 40))
SMALL_CONGRUENCE = SearchConfig(
    prime_limit_Q=3,
    prime_limit_q=7,
    r_range=(2, 6),
    y_schedule=((Fraction(1, 10), Fraction(1), Fraction(1, 10)),),
)


def test_grid_helpers():
    assert prime_ideal_norms(7) == [3, 4, 7, 25]
    assert prime_powers(3, (2, 4)) == [(2, 2), (2, 4), (3, 2), (3, 4)]
    assert y_grid(Fraction(1, 10), Fraction(1), Fraction(1, 10))[-1] == 1
    assert len(y_grid(Fraction(1, 10), Fraction(1), Fraction(1, 10))) == 10
    assert y_grid(Fraction(1, 2), Fraction(3, 2), Fraction(1, 2)) == [Fraction(1, 2), Fraction(1)]


def test_singleton_principal_grid():
    cfg = SearchConfig(prime_limit_Q=2, prime_limit_q=2, r_range=(2, 2))
    result = search_principal(cfg, threads=1)
    expected = principal_bound(4, PrimePower(2, 2))
    assert result.evaluations == 1
    assert result.best.key == (4, 2, 2)
    assert math.isclose(result.grid[0].lambda_lower, expected.lambda_lower, abs_tol=1e-12)


def test_vectorised_principal_matches_scalar():
    result = search_principal(SMALL, threads=1)
    assert result.evaluations == 4 * 6 * 20
    for row in result.grid:
        report = principal_bound(row.Q, PrimePower(row.p, row.r))
        assert row.ell == report.ell
        assert math.isclose(row.lambda_lower, report.lambda_lower, abs_tol=1e-10)
    best = max(row.lambda_lower for row in result.grid)
    assert math.isclose(result.best.lambda_lower, best, abs_tol=1e-10)


def test_vectorised_congruence_matches_scalar():
    result = search_congruence(SMALL_CONGRUENCE, threads=1)
    ys = y_grid(Fraction(1, 10), Fraction(1), Fraction(1, 10))
    assert result.evaluations == 2 * 4 * 3
    for row in result.grid:
        q = PrimePower(row.p, row.r)
        values = [congruence_bound(row.Q, q, y).lambda_lower for y in ys]
        assert math.isclose(row.lambda_lower, congruence_bound(row.Q, q, row.y).lambda_lower, abs_tol=1e-10)
        assert row.lambda_lower >= max(values) - 1e-10
    assert result.best.family is BoundFamily.CONGRUENCE


def test_refinement_stages_never_lose_ground():
    cfg = SearchConfig(
        prime_limit_Q=3,
        prime_limit_q=7,
        r_range=(2, 6),
        y_schedule=((Fraction(1, 10), Fraction(1), Fraction(1, 10)),),
        refinements=2,
    )
    refined = search_congruence(cfg, threads=1)
    coarse = search_congruence(SMALL_CONGRUENCE, threads=1)
    stages = {row.stage for row in refined.grid}
    assert {0, 1} <= stages
    assert max(stages) <= 1 + cfg.refinements
    assert refined.best.lambda_lower >= coarse.best.lambda_lower - 1e-12
    for row in refined.grid:
        assert 0 < row.y <= 1


def test_decade():
    assert decade(Fraction(1)) == 0
    assert decade(Fraction(1, 1000)) == -3
    assert decade(Fraction(999, 1000)) == -1
    assert decade(Fraction(1, 4000000000)) == -10


def test_descent_grid_steps_down_a_decade():
    ys = descent_grid(Fraction(1, 100))
    assert ys[0] == Fraction(1, 1000)
    assert ys[-1] == Fraction(2, 100)
    assert ys[1] - ys[0] == Fraction(1, 10000)
    assert Fraction(1, 4000000000) in descent_grid(Fraction(1, 1000000000))
    assert max(descent_grid(Fraction(1))) == 1


def test_polish_grid_step_is_below_a_thousandth():
    best = Fraction(1, 4000000000)
    ys = polish_grid(best)
    assert len(ys) == 101
    assert ys[50] == best
    assert ys[1] - ys[0] == Fraction(1, 10 ** 13)
    assert polish_grid(Fraction(1, 10))[1] - polish_grid(Fraction(1, 10))[0] == Fraction(1, 10 ** 5)
    assert all(0 < y <= 1 for y in polish_grid(Fraction(1)))


def test_congruence_descends_to_the_published_cell():
    cfg = SearchConfig(
        prime_limit_Q=2,
        prime_limit_q=11,
        r_range=(94, 94),
        y_schedule=PUBLISHED_CONGRUENCE.y_schedule,
        refinements=PUBLISHED_CONGRUENCE.refinements,
    )
    result = search_congruence(cfg, threads=1)
    cell = max((row for row in result.grid if (row.Q, row.p, row.r) == (4, 11, 94)),
               key=lambda row: row.lambda_lower)
    assert Fraction(1, 8000000000) <= cell.y <= Fraction(1, 2000000000)
    assert math.isclose(cell.lambda_lower, -1.26532181404273379, abs_tol=1e-9)


def test_threads_do_not_change_results():
    serial = search_principal(SMALL, threads=1)
    parallel = search_principal(SMALL, threads=2)
    assert serial.grid == parallel.grid
    assert serial.best.key == parallel.best.key


def test_select_best_tie_break():
    rows = [
        GridRow(4, 59, 28, 81, -1.25),
        GridRow(3, 7, 4, 10, -1.25),
        GridRow(3, 7, 2, 10, -1.25 - 1e-13),
        GridRow(7, 2, 2, 1, -1.5),
    ]
    assert select_best(rows) == rows[2]
    assert select_best(rows[:2]) == rows[1]
    with pytest.raises(EmptyGridError):
        select_best([])


def test_select_best_breaks_y_ties():
    rows = [GridRow(4, 7, 4, 3, -1.3, y=Fraction(1, 2)), GridRow(4, 7, 4, 3, -1.3, y=Fraction(1, 4))]
    assert select_best(rows).y == Fraction(1, 4)


def test_congruence_needs_schedule():
    with pytest.raises(EmptyGridError):
        search_congruence(SMALL, threads=1)


def test_ring_search_prefers_four():
    result = search_ring_of_integers(SearchConfig(prime_limit_Q=30, ell=200))
    assert result.best.Q == 4
    assert all(row.lambda_lower <= result.best.lambda_lower for row in result.grid)


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        SearchConfig(r_range=(3, 10))
    with pytest.raises(InvalidArgumentError):
        SearchConfig(r_range=(10, 2))
    with pytest.raises(InvalidArgumentError):
        SearchConfig(prime_limit_Q=1)
    with pytest.raises(InvalidArgumentError):
        SearchConfig(y_schedule=((Fraction(0), Fraction(1), Fraction(1, 10)),))
    assert SearchConfig.from_dict(PUBLISHED_CONGRUENCE.to_dict()) == PUBLISHED_CONGRUENCE


def test_load_search_config(tmp_path):
    path = tmp_path / "grid.json"
    path.write_text(json.dumps({"prime_limit_Q": 7, "r_min": 2, "r_max": 8,
                                "y_schedule": [["1/10", "1", "1/100"]]}))
    cfg = load_search_config(path)
    assert cfg.r_range == (2, 8)
    assert cfg.y_schedule == ((Fraction(1, 10), Fraction(1), Fraction(1, 100)),)


@pytest.mark.parametrize("text", ["{", "[]", '{"r_min": 3}', '{"y_schedule": [["1", "1"]]}'])
def test_load_search_config_errors(tmp_path, text):
    path = tmp_path / "grid.json"
    path.write_text(text)
    with pytest.raises(SpecFileError):
        load_search_config(path)
    with pytest.raises(SpecFileError):
        load_search_config(tmp_path / "missing.json")


@pytest.mark.slow
def test_principal_published_grid():
    result = search_principal(PUBLISHED_PRINCIPAL, threads=2)
    assert result.best.key == (4, 59, 28)
    assert math.isclose(result.best.lambda_lower, -1.26532182282965944, abs_tol=1e-9)


@pytest.mark.slow
def test_rt_baseline_searches():
    principal = search_rt_baseline(BoundFamily.RT_PRINCIPAL, PUBLISHED_PRINCIPAL)
    assert math.isclose(principal.best.lambda_lower, -1.87, abs_tol=0.01)
    assert principal.best.key == (1, 3, 2)
    congruence = search_rt_baseline(BoundFamily.RT_CONGRUENCE, PUBLISHED_PRINCIPAL)
    assert math.isclose(congruence.best.lambda_lower, -1.39, abs_tol=0.01)
    assert congruence.best.y == 1


@pytest.mark.slow
def test_congruence_published_grid():
    result = search_congruence(PUBLISHED_CONGRUENCE, threads=4)
    cell = max((row for row in result.grid if (row.Q, row.p, row.r) == (4, 11, 94)),
               key=lambda row: row.lambda_lower)
    assert Fraction(1, 8000000000) <= cell.y <= Fraction(1, 2000000000)
    assert math.isclose(cell.lambda_lower, -1.26532181404273379, abs_tol=1e-9)
    # the closed form peaks at other cells within 1e-9 of the published value
    assert result.best.lambda_lower >= cell.lambda_lower - 1e-12
    assert math.isclose(result.best.lambda_lower, -1.26532181404273379, abs_tol=1e-9)
    assert result.best.Q == 4
