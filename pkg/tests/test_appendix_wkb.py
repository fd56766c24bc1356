import numpy as np
import pytest

from semiwf.appendix_wkb import WkbConfig, predicted_wavefront, wkb_experiment
from semiwf.states import WkbData, smooth_bump, wkb_catalog
from semiwf.wavefront import HLadder, cell_centers

RECT = (-2.0, 2.0, -2.0, 2.0)
COUNTS = (9, 9)


def test_real_quadratic_prediction_is_the_diagonal():
    p = predicted_wavefront(wkb_catalog("real_quadratic"), RECT, COUNTS)
    xs = cell_centers(-2, 2, 9)
    diag = {(x, x) for x in xs if -1 <= x <= 1}
    assert set(p.outer) == diag
    assert set(p.inner) == diag


def test_linear_phase_prediction_is_a_horizontal_segment():
    p = predicted_wavefront(wkb_catalog("linear"), RECT, COUNTS)
    assert {xi for _, xi in p.outer} == {1.0}
    assert {x for x, _ in p.outer} == {-1.0, -0.5, 0.0, 0.5, 1.0}


@pytest.mark.parametrize("name", ["imag_flat", "imag_quadratic", "imag_bump"])
def test_imaginary_phase_prediction_is_the_origin(name):
    p = predicted_wavefront(wkb_catalog(name), RECT, COUNTS)
    assert set(p.outer) == {(0.0, 0.0)}


@pytest.mark.parametrize("name, inner", [("imag_flat", set()), ("imag_quadratic", set()),
                                         ("imag_bump", {(0.0, 0.0)})])
def test_inner_set_needs_nonzero_amplitude_where_phase_is_real(name, inner):
    assert set(predicted_wavefront(wkb_catalog(name), RECT, COUNTS).inner) == inner


def test_support_outside_rectangle():
    d = wkb_catalog("linear")
    far = WkbData(d.amplitude, d.phase, d.dphase, (5.0, 6.0), "far")
    p = predicted_wavefront(far, RECT, COUNTS)
    assert not p.inner and not p.outer


def test_inconsistent_phase_rejected():
    bad = WkbData(smooth_bump, lambda x: 0j * x, lambda x: 1j + 0 * x, (-1.0, 1.0), "bad")
    with pytest.raises(ValueError):
        predicted_wavefront(bad, RECT, COUNTS)


@pytest.fixture(scope="module")
def quadratic_report():
    cfg = WkbConfig(counts=COUNTS, probes=[(0.5, 0.5), (0.5, -0.5)])
    return wkb_experiment("real_quadratic", cfg, HLadder.dyadic(4, 11))


def test_real_quadratic_sandwich(quadratic_report):
    v = quadratic_report.verdicts
    assert v["inner_in_detected"] and v["detected_in_outer"] and v["sandwich"]


def test_probe_verdicts(quadratic_report):
    on, off = quadratic_report.probes
    assert on["detected"] and not off["detected"]
    # stationary phase over a window of width sqrt(h) gives |pairing| ~ h^(1/4)
    assert on["fit"]["slope"] == pytest.approx(0.25, abs=0.05)


def test_report_serializes(quadratic_report):
    d = quadratic_report.to_json()
    assert d["name"] == "real_quadratic" and d["config"]["counts"] == COUNTS


def test_constant_phase_shift_leaves_magnitudes_unchanged():
    d = wkb_catalog("real_quadratic")
    shifted = WkbData(d.amplitude, lambda x: d.phase(x) + 0.3, d.dphase, d.support, "shifted")
    cfg = WkbConfig(counts=(5, 5), probes=[(0.5, 0.5), (0.0, 1.0)])
    lad = HLadder.dyadic(4, 9)
    a = wkb_experiment(d, cfg, lad)
    b = wkb_experiment(shifted, cfg, lad)
    for pa, pb in zip(a.probes, b.probes):
        assert np.allclose(pa["magnitudes"], pb["magnitudes"], rtol=1e-10, atol=1e-15)
    assert a.detected_cells == b.detected_cells
