import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semiwf.families import CoherentFamily
from semiwf.states import TestBump, Window
from semiwf.wavefront import (BOUNDED, INCONCLUSIVE, POLYNOMIAL, RAPID, UNDERFLOW, HLadder, cell_centers,
                              coherent_pairings, decay_fit, dumps, fit_magnitudes, noise_floor, pairing, sector_check,
                              spatial_pairing, stretched_rate, wf_scan, within_one_cell)

HS = np.array(HLadder.dyadic(4, 14).values)


def gaussian_overlap(p, q, h):
    # |(phi_p, phi_q)| for unit gaussian coherent states
    return math.exp(-((p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2) / (4 * h))


def test_ladder_validation():
    with pytest.raises(ValueError):
        HLadder((0.5, 0.25, 0.125))
    with pytest.raises(ValueError):
        HLadder((0.5, 0.25, 0.3, 0.1))
    with pytest.raises(ValueError):
        HLadder((1.0, 0.5, 0.25, 0.1))
    lad = HLadder.dyadic(4, 14)
    assert len(lad) == 11 and lad.values[0] == 2.0**-4


@given(p=st.floats(0.5, 4.5), c=st.floats(1e-3, 1e3))
def test_power_law_slope_is_recovered(p, c):
    f = fit_magnitudes(HS, c * HS**p, floors=0.0)
    assert f.slope == pytest.approx(p, abs=1e-9)
    assert f.residual < 1e-9
    assert f.classification == POLYNOMIAL
    assert f.detected


@given(p=st.floats(0.0, 4.0), c1=st.floats(1e-2, 1e2), c2=st.floats(1e-2, 1e2))
def test_fit_is_scale_invariant(p, c1, c2):
    a = fit_magnitudes(HS, c1 * HS**p, floors=0.0)
    b = fit_magnitudes(HS, c2 * HS**p, floors=0.0)
    assert a.slope == pytest.approx(b.slope, abs=1e-9)
    assert a.classification == b.classification


def test_classes():
    assert fit_magnitudes(HS, HS**7, floors=0.0).classification == RAPID
    assert fit_magnitudes(HS, np.full(HS.size, 0.3)).classification == BOUNDED
    rng = np.random.default_rng(0)
    noisy = HS**2 * np.exp(3 * rng.normal(size=HS.size))
    assert fit_magnitudes(HS, noisy).classification == INCONCLUSIVE


def test_underflow_tail_counts_as_decay():
    m = np.exp(-1 / HS)
    f = fit_magnitudes(HS, m)
    assert f.n_underflow > 0 and f.underflow_tail
    assert f.decays and not f.detected


def test_underflow_in_the_middle_is_not_a_tail():
    m = HS**1.0
    m[3] = 0.0
    f = fit_magnitudes(HS, m)
    assert f.n_underflow == 1 and not f.underflow_tail
    assert f.detected


def test_floors_raise_the_underflow_threshold():
    m = HS**8
    assert fit_magnitudes(HS, m, floors=1e-9).n_underflow > fit_magnitudes(HS, m).n_underflow


def test_nan_points_are_ignored():
    m = HS**2.0
    m[0] = np.nan
    f = fit_magnitudes(HS, m)
    assert f.n_used == HS.size - 1 and f.slope == pytest.approx(2.0)


def test_stretched_rate():
    assert stretched_rate(HS, 3.0 * np.exp(-2.5 / np.sqrt(HS))) == pytest.approx(2.5, abs=1e-2)
    assert math.isnan(stretched_rate(HS, np.zeros(HS.size)))


@pytest.mark.parametrize("q", [(0.0, 0.0), (0.1, 0.05), (-0.2, 0.3)])
def test_coherent_pairings_match_gaussian_overlap(q):
    h = 2.0**-8
    w = Window("gaussian")
    u = CoherentFamily(w, 0.0, 0.0, xi_extent=2.0, x_cover=2.0)(h)
    got = abs(coherent_pairings(u, w, [q[0]], [q[1]])[0, 0])
    assert got == pytest.approx(gaussian_overlap((0, 0), q, h), rel=1e-9, abs=1e-15)
    assert abs(spatial_pairing(u, w, q[0], q[1])) == pytest.approx(got, rel=1e-9, abs=1e-15)


def test_coherent_pairings_guard_grid():
    h = 2.0**-6
    w = Window("gaussian")
    u = CoherentFamily(w, 0.0, 0.0)(h)
    with pytest.raises(ValueError):
        coherent_pairings(u, w, [u.grid.half_width], [0.0])
    with pytest.raises(ValueError):
        coherent_pairings(u, w, [0.0], [10 * u.grid.xi_max(h)])


def test_noise_floor_lower_bound():
    u = CoherentFamily(Window("gaussian"), 0.0, 0.0)(0.01)
    assert noise_floor(u) >= UNDERFLOW


def test_pairing_decays_off_centre_and_not_on_it(short_ladder):
    fam = CoherentFamily(Window("gaussian"), 0.0, 0.0, xi_extent=2.0, x_cover=2.0)
    on = pairing(fam, Window("gaussian"), (0.0, 0.0), short_ladder)
    off = pairing(fam, Window("gaussian"), (0.5, 0.5), short_ladder)
    assert np.allclose(on.magnitudes, 1.0)
    assert not fit_magnitudes(short_ladder.values, on.magnitudes).decays
    assert decay_fit(off).decays


def test_pairing_rule_and_errors(short_ladder):
    fam = CoherentFamily(Window("gaussian"), 0.0, 0.0)
    s = pairing(fam, TestBump(0.5), lambda h: (h, 0.0), short_ladder)
    assert s.points[0] == (short_ladder.values[0], 0.0)
    bad = pairing(fam, Window("gaussian"), (0.0, 100.0), short_ladder)
    assert np.all(np.isnan(bad.magnitudes)) and len(bad.errors) == len(short_ladder)


@pytest.fixture(scope="module")
def scan():
    fam = CoherentFamily(Window("gaussian"), 0.5, -1.0, xi_extent=3.0, x_cover=2.0)
    return wf_scan(fam, Window("gaussian"), (-1.0, 1.0, -2.0, 2.0), (5, 5), HLadder.dyadic(4, 12))


def test_scan_detects_only_the_centre(scan):
    assert scan.detected_points() == [(0.5, -1.0)]
    assert scan.magnitudes.shape == (9, 5, 5)


def test_scan_csv_format(scan):
    rows = list(csv.reader(io.StringIO(scan.to_csv())))
    assert rows[0] == ["x", "xi", "slope", "residual", "class"]
    assert len(rows) == 26
    for r in rows[1:]:
        for v in r[:4]:
            assert float(v) == float(v) or v == "nan"
    # 17 significant digits round-trip exactly
    i = next(k for k, r in enumerate(rows[1:]) if r[0] == "0.5" and r[1] == "-1")
    assert float(rows[1 + i][2]) == scan.fits[3][1].slope


def test_scan_json_round_trip(scan):
    d = json.loads(dumps(scan.to_json()))
    assert d["detected"] == [[0.5, -1.0]]


def test_cell_centers():
    assert np.allclose(cell_centers(-1, 1, 5), [-1, -0.5, 0, 0.5, 1])
    assert cell_centers(0, 2, 1).tolist() == [1.0]
    with pytest.raises(ValueError):
        cell_centers(0, 1, 0)


def test_within_one_cell():
    assert within_one_cell([], [(0, 0)], 1, 1)
    assert not within_one_cell([(0, 0)], [], 1, 1)
    assert within_one_cell([(0, 0)], [(1, 1)], 1, 1)
    assert not within_one_cell([(0, 0)], [(2, 0)], 1, 1)


@given(theta=st.floats(0.01, 1.5), seed=st.integers(0, 2**32 - 1), axis=st.floats(-3, 3))
def test_sector_bound_holds_inside_sector(theta, seed, axis):
    rng = np.random.default_rng(seed)
    ang = axis + rng.uniform(-theta, theta, size=50)
    f = rng.uniform(0.1, 2, size=50) * np.exp(1j * ang)
    w = rng.uniform(0, 1, size=50)
    res = sector_check(f, w)
    assert res.theta <= theta + 1e-12
    assert res.holds is True
    assert res.lhs >= math.cos(theta) * res.rhs - 1e-12


def test_sector_check_edge_cases():
    assert sector_check([1, -1], [1, 1]).holds is None
    with pytest.raises(ValueError):
        sector_check([0, 0], [1, 1])
    with pytest.raises(ValueError):
        sector_check([1, 1], [1, -1])
