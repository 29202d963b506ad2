import json

import numpy as np
import pytest
from gmpy2 import mpq

from conftest import ONE_POINT, random_lattice_points
from tropsand.core import (Q, RPoint, TropicalSeries, boundary_zero_check, build_arrangement,
                           canonical_coefficient, canonicalize, degree, evaluate, face_areas,
                           is_on_curve, min_monomials, parse_point)
from tropsand.errors import InputError, InvalidSeriesError
from tropsand.gp import solve_gp

P = RPoint.of


def _grid_max(f, i, j, resolution=1000):
    """Dense float grid maximisation of f - i x - j y."""
    xs = np.linspace(0.0, 1.0, resolution + 1)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    vals = np.full(X.shape, np.inf)
    for (a, b), c in f.monomials.items():
        vals = np.minimum(vals, float(c) + a * X + b * Y)
    return float((vals - i * X - j * Y).max())


def _solved(rng, n, s=32):
    return solve_gp(random_lattice_points(rng, s, n))[0]


# --- rationals and points -------------------------------------------------

def test_rationals_are_reduced():
    c = Q("6/8")
    assert (c.numerator, c.denominator) == (3, 4)
    assert Q("-2/4") == mpq(-1, 2)


@pytest.mark.parametrize("bad", ["0.5", "1e-3", "1/0", "abc", ""])
def test_decimal_and_garbage_rejected(bad):
    with pytest.raises(InputError):
        Q(bad)


def test_float_rejected():
    with pytest.raises(InputError):
        Q(0.5)


def test_parse_point():
    assert parse_point("1/3,1/2") == (mpq(1, 3), mpq(1, 2))
    with pytest.raises(InputError):
        parse_point("1/3")


# --- evaluate / min_monomials / is_on_curve -------------------------------

def test_evaluate_examples(zero, one_point):
    assert evaluate(zero, P("1/2", "1/2")) == 0
    assert evaluate(one_point, P("1/2", "1/2")) == mpq(1, 3)
    assert evaluate(one_point, P("1/10", "1/2")) == mpq(1, 10)


def test_evaluate_empty_series():
    with pytest.raises(InvalidSeriesError):
        evaluate(TropicalSeries({}), P(0, 0))


def test_min_monomials_examples(one_point):
    assert min_monomials(one_point, P("1/3", "1/2")) == {(0, 0), (1, 0)}
    assert min_monomials(one_point, P("1/2", "1/2")) == {(0, 0)}
    assert min_monomials(one_point, P("1/3", "1/3")) == {(0, 0), (1, 0), (0, 1)}


def test_is_on_curve_examples(zero, one_point):
    assert is_on_curve(one_point, P("1/3", "1/2"))
    assert not is_on_curve(one_point, P("1/2", "1/2"))
    assert not is_on_curve(zero, P("1/7", "2/3"))


def test_exact_evaluation_matches_floats(rng):
    f = _solved(rng, 6)
    for _ in range(1000):
        p = P(mpq(rng.randint(0, 997), 997), mpq(rng.randint(0, 991), 991))
        approx = min(float(c) + i * float(p.x) + j * float(p.y) for (i, j), c in f.monomials.items())
        assert abs(float(evaluate(f, p)) - approx) <= 1e-9


# --- arrangement ----------------------------------------------------------

def test_one_point_arrangement(one_point):
    arr = build_arrangement(one_point)
    assert len(arr.faces) == 5
    centre = {(mpq(1, 3), mpq(1, 3)), (mpq(2, 3), mpq(1, 3)), (mpq(2, 3), mpq(2, 3)), (mpq(1, 3), mpq(2, 3))}
    assert set(arr.faces[(0, 0)]) == centre
    assert len(arr.curve_edges) == 8
    assert len(arr.curve_vertices) == 4


def test_zero_arrangement(zero):
    arr = build_arrangement(zero)
    assert list(arr.faces) == [(0, 0)]
    assert len(arr.faces[(0, 0)]) == 4
    assert arr.curve_edges == ()


def test_area_partition(rng):
    for n in range(0, 12):
        f = _solved(rng, n)
        assert sum(face_areas(f).values()) == 1


def test_faces_are_where_their_monomial_is_minimal(rng):
    f = _solved(rng, 5)
    for key, poly in f.arrangement.faces.items():
        cx = sum(v[0] for v in poly) / len(poly)
        cy = sum(v[1] for v in poly) / len(poly)
        assert min_monomials(f, (cx, cy)) == {key}


# --- canonical form -------------------------------------------------------

def test_canonicalize_examples(one_point):
    assert canonicalize(TropicalSeries({(0, 0): 0, (1, 1): 5})) == TropicalSeries.zero()
    assert canonicalize(TropicalSeries({**ONE_POINT, (1, 1): 1})) == one_point
    assert canonicalize(one_point) == one_point


def test_canonicalize_rejects_boundary_violation():
    with pytest.raises(InvalidSeriesError):
        canonicalize(TropicalSeries({(0, 0): mpq(1, 3)}))


def test_segment_faces_are_pruned():
    # (2, 0) with c = 0 only touches the left side: zero-area face
    f = TropicalSeries({**ONE_POINT, (2, 0): 0})
    assert canonicalize(f) == TropicalSeries(ONE_POINT)


def test_canonical_idempotent_and_function_preserving(rng):
    for _ in range(20):
        f = _solved(rng, rng.randint(1, 8))
        extra = dict(f.monomials)
        for _ in range(4):
            key = (rng.randint(-4, 4), rng.randint(-4, 4))
            if key not in extra:
                extra[key] = canonical_coefficient(f, *key) + mpq(rng.randint(0, 3), 7)
        g = TropicalSeries(extra)
        once = canonicalize(g)
        assert canonicalize(once) == once
        assert once == f
        for _ in range(100):
            p = P(mpq(rng.randint(1, 96), 97), mpq(rng.randint(1, 88), 89))
            assert evaluate(once, p) == evaluate(g, p)


# --- canonical coefficients ----------------------------------------------

def test_canonical_coefficient_examples(zero, one_point):
    assert canonical_coefficient(zero, 1, 0) == 0
    assert canonical_coefficient(zero, -1, -1) == 2
    # frozen from the dense-grid oracle below: the max of f - x - y is at (0, 0)
    assert canonical_coefficient(one_point, 1, 1) == 0


@pytest.mark.parametrize("i,j", [(1, 1), (-1, 1), (2, 0), (0, -2), (-2, -1), (3, 1)])
def test_canonical_coefficient_against_grid_oracle(one_point, i, j):
    exact = canonical_coefficient(one_point, i, j)
    approx = _grid_max(one_point, i, j)
    assert approx <= float(exact) + 1e-12
    assert float(exact) - approx <= (abs(i) + abs(j) + 1) * 1e-3


def test_canonical_coefficient_against_grid_oracle_solved(rng):
    f = _solved(rng, 4)
    for i, j in [(0, 0), (1, 1), (-2, 1), (1, -3)]:
        exact = float(canonical_coefficient(f, i, j))
        approx = _grid_max(f, i, j, 500)
        assert approx <= exact + 1e-12
        assert exact - approx <= (abs(i) + abs(j) + degree(f)) * 2e-3


def test_stored_coefficients_are_minimal(rng):
    for _ in range(10):
        f = _solved(rng, rng.randint(1, 10))
        for (i, j), c in f.monomials.items():
            assert canonical_coefficient(f, i, j) == c


def test_adding_canonical_monomial_keeps_function(rng):
    f = _solved(rng, 3)
    g = TropicalSeries({**f.monomials, (5, 5): canonical_coefficient(f, 5, 5)})
    for _ in range(50):
        p = P(mpq(rng.randint(0, 40), 40), mpq(rng.randint(0, 40), 40))
        assert evaluate(f, p) == evaluate(g, p)


# --- degree and boundary --------------------------------------------------

def test_degree_examples(zero, one_point):
    assert degree(zero) == 0
    assert degree(one_point) == 1
    assert degree(TropicalSeries({(0, 0): 0, (2, 1): 1, (-1, -1): 3})) == 3


def test_boundary_zero_check_examples(zero, one_point):
    assert boundary_zero_check(zero)
    assert boundary_zero_check(one_point)
    assert not boundary_zero_check(TropicalSeries({(0, 0): mpq(1, 3)}))


def test_boundary_zero_check_negative_inside():
    # zero on the sides but the (1, 1) monomial is negative at the origin corner
    assert not boundary_zero_check(TropicalSeries({**ONE_POINT, (1, 1): -1}))


def test_boundary_zero_check_against_sampling(rng):
    for _ in range(40):
        coeffs = {(0, 0): mpq(rng.randint(0, 3), 6)}
        for key in [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1)]:
            if rng.random() < 0.8:
                coeffs[key] = mpq(rng.randint(-1, 7), 6)
        f = TropicalSeries(coeffs)
        sides = [P(mpq(k, 60), e) for k in range(61) for e in (0, 1)]
        sides += [P(e, mpq(k, 60)) for k in range(61) for e in (0, 1)]
        sampled = all(evaluate(f, p) == 0 for p in sides)
        corners_ok = all(c + i * x + j * y >= 0 for (i, j), c in coeffs.items()
                         for x in (0, 1) for y in (0, 1))
        assert boundary_zero_check(f) == (sampled and corners_ok)


# --- serialisation --------------------------------------------------------

def test_json_round_trip(one_point):
    text = one_point.to_json()
    data = json.loads(text)
    assert data["omega"] == "unit-square"
    assert {"i": 0, "j": 0, "c": "1/3"} in data["monomials"]
    assert TropicalSeries.from_json(text) == one_point


def test_json_rejects_bad_input():
    with pytest.raises(InvalidSeriesError):
        TropicalSeries.from_json('{"omega": "disk", "monomials": []}')
    with pytest.raises(InvalidSeriesError):
        TropicalSeries.from_json('{"monomials": [{"i": 0, "j": 0, "c": "0.5"}]}')
    with pytest.raises(InvalidSeriesError):
        TropicalSeries([((0, 0), 0), ((0, 0), 1)])
