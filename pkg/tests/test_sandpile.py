import json

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st
from scipy.ndimage import label

from conftest import random_lattice_points
from tropsand.core import RPoint, TropicalSeries
from tropsand.errors import InputError
from tropsand.gp import solve_gp
from tropsand.sandpile import (POLICIES, SandpileGrid, compare_with_exact, conservation_residual,
                               deviation_set, rasterize_curve, relax, sup_gap, tropical_state)

P = RPoint.of


def _solve_and_relax(s, pts, policy="queue"):
    f, _ = solve_gp(pts)
    return f, relax(tropical_state(s, pts), policy)


def test_tropical_state_examples(rng):
    g = tropical_state(4, [P("1/2", "1/2")])
    expected = np.full((5, 5), 3)
    expected[2, 2] = 4
    assert (g.grains == expected).all() and not g.topplings.any()
    assert tropical_state(4, []).is_stable
    g = tropical_state(64, random_lattice_points(rng, 64, 3))
    assert int((g.grains == 4).sum()) == 3


@pytest.mark.parametrize("bad", [P("1/3", "1/2"), P(0, "1/2"), P("1/2", 1)])
def test_tropical_state_rejects(bad):
    with pytest.raises(InputError):
        tropical_state(4, [bad])


def test_relax_constant_three():
    g = tropical_state(8, [])
    out = relax(g)
    assert (out.grains == 3).all() and not out.topplings.any()


def test_relax_single_centre_against_naive():
    start = tropical_state(4, [P("1/2", "1/2")])
    fast = relax(start, "queue")
    naive = relax(start, "scan")
    assert fast.is_stable
    assert (fast.grains == naive.grains).all()
    assert (fast.topplings == naive.topplings).all()


def test_relax_small_by_hand():
    # a lone 4 in a 3x3 grid of zeros fires once and stops
    grains = np.zeros((3, 3), dtype=int)
    grains[1, 1] = 4
    out = relax(SandpileGrid(2, grains))
    assert out.topplings.sum() == 1
    assert out.grains.tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]


def test_relax_rejects():
    with pytest.raises(InputError):
        relax(tropical_state(4, []), "random")
    with pytest.raises(InputError):
        relax(SandpileGrid(2, -np.ones((3, 3), dtype=int)))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 32), st.integers(0, 2**32 - 1))
def test_abelian_property(s, seed):
    rs = np.random.default_rng(seed)
    grid = SandpileGrid(s, rs.integers(0, 9, size=(s + 1, s + 1)))
    outs = [relax(grid, p) for p in POLICIES]
    for o in outs[1:]:
        assert (o.grains == outs[0].grains).all()
        assert (o.topplings == outs[0].topplings).all()
    assert not conservation_residual(grid, outs[0]).any()


def test_conservation_detects_tampering():
    g = tropical_state(8, [P("1/2", "1/2")])
    out = relax(g)
    out.grains[3, 3] += 1
    assert conservation_residual(g, out).any()


def test_deviation_set_examples():
    assert deviation_set(relax(tropical_state(16, []))) == set()
    with pytest.raises(InputError):
        deviation_set(tropical_state(4, [P("1/2", "1/2")]))


def test_deviation_set_centre_is_thin_contour():
    stable = relax(tropical_state(64, [P("1/2", "1/2")]))
    dev = deviation_set(stable)
    assert (32, 32) in dev
    assert 0 < len(dev) < 8 * 64
    mask = np.zeros((65, 65), dtype=bool)
    for u, v in dev:
        mask[u, v] = True
    # no 3x3 block is entirely deviating
    blocks = mask[:-2, :-2] & mask[1:-1, :-2] & mask[2:, :-2] & mask[:-2, 1:-1] & mask[1:-1, 1:-1] \
        & mask[2:, 1:-1] & mask[:-2, 2:] & mask[1:-1, 2:] & mask[2:, 2:]
    assert not blocks.any()


def test_deviation_set_connected_through_two_points():
    pts = [P("1/4", "1/2"), P("5/8", "3/8")]
    stable = relax(tropical_state(32, pts))
    mask = np.zeros((33, 33), dtype=bool)
    for u, v in deviation_set(stable):
        mask[u, v] = True
    labels, _ = label(mask, structure=np.ones((3, 3)))
    # the dropped grain can leave the point itself at 3; look at its neighbours
    near = [set(labels[x - 1:x + 2, y - 1:y + 2].ravel()) - {0} for x, y in ((8, 16), (20, 12))]
    assert near[0] & near[1]


def test_rasterize_against_sampling(one_point):
    s = 24
    mask = rasterize_curve(one_point, s)
    sampled = np.zeros_like(mask)
    for e in one_point.arrangement.curve_edges:
        for k in range(401):
            t = mpq(k, 400)
            x = e.a.x + t * (e.b.x - e.a.x)
            y = e.a.y + t * (e.b.y - e.a.y)
            u, v = x * s, y * s
            for du in (0, -1):
                for dv in (0, -1):
                    cu = int(np.floor(float(u + mpq(1, 2)))) + du
                    cv = int(np.floor(float(v + mpq(1, 2)))) + dv
                    if 0 <= cu <= s and 0 <= cv <= s and abs(u - cu) <= mpq(1, 2) and abs(v - cv) <= mpq(1, 2):
                        sampled[cu, cv] = True
    assert (sampled <= mask).all()
    assert mask.sum() - sampled.sum() <= 4


def test_compare_empty():
    for s in (8, 16):
        rep = compare_with_exact(TropicalSeries.zero(), relax(tropical_state(s, [])))
        assert rep.sup_norm_gap == 0 and rep.deviation_cells == 0 and rep.curve_cells == 0
        assert rep.deviation_coverage == 1.0 and rep.curve_coverage == 1.0


def test_centre_gap_scales_like_one_over_s():
    gaps = {}
    for s in (16, 32, 64):
        f, stable = _solve_and_relax(s, [P("1/2", "1/2")])
        gaps[s] = sup_gap(f, stable)
    calibrated = max(g * s for s, g in gaps.items())
    assert calibrated <= 4
    assert gaps[64] <= gaps[32] <= gaps[16]


def test_three_point_coverage(rng):
    for _ in range(3):
        pts = random_lattice_points(rng, 64, 3)
        f, stable = _solve_and_relax(64, pts)
        rep = compare_with_exact(f, stable, radius=3)
        assert 0 <= rep.deviation_coverage <= 1 and 0 <= rep.curve_coverage <= 1
        assert rep.deviation_coverage >= 0.95 and rep.curve_coverage >= 0.95


def test_report_json(one_point):
    stable = relax(tropical_state(12, [P("1/3", "1/2")]))
    data = json.loads(compare_with_exact(one_point, stable).to_json())
    assert data["schema"] == "deviation-report/1"
    assert mpq(data["sup_norm_gap_exact"]) == sup_gap(one_point, stable)


def test_exports():
    stable = relax(tropical_state(4, [P("1/2", "1/2")]))
    pgm = stable.to_pgm()
    header = b"P5\n5 5\n255\n"
    assert pgm.startswith(header) and len(pgm) == len(header) + 25
    body = np.frombuffer(pgm[len(header):], dtype=np.uint8).reshape(5, 5)
    assert (body[::-1].T == stable.grains * 85).all()
    raw = np.frombuffer(stable.topplings_bytes(), dtype="<u4").reshape(5, 5)
    assert (raw.T == stable.topplings).all()
