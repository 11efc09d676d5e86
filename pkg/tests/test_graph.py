import numpy as np
import pytest

from limitspec.action import action
from limitspec.graph import assemble_graph, find_lambda0, polyline_distance
from limitspec.profile import default_strip, parse_profile

COUETTE = parse_profile("builtin:couette")


@pytest.fixture(scope="module")
def couette_graph():
    return assemble_graph(COUETTE)


def test_lambda0_couette_closed_form():
    lam0 = find_lambda0(COUETTE)
    assert lam0 == pytest.approx(-1j / np.sqrt(3.0), abs=1e-10)


def test_lambda0_is_on_all_three_level_sets(couette_graph):
    lam0 = couette_graph.lambda0
    for side in ("plus", "minus", "full"):
        assert abs(action(COUETTE, lam0, side).real) < 1e-9


def test_curve_endpoints_reach_real_axis(couette_graph):
    g = couette_graph
    assert g.gamma_plus.endpoint == pytest.approx(complex(COUETTE.b), abs=1e-8)
    assert g.gamma_minus.endpoint == pytest.approx(complex(COUETTE.a), abs=1e-8)
    # the tracer may overshoot the cutoff by at most one step
    tail = g.gamma_inf.vertices[-1].imag
    assert -g.strip.im_cutoff - 0.05 <= tail <= -g.strip.im_cutoff + 1e-6


def test_gamma_inf_is_imaginary_axis(couette_graph):
    # for the odd profile q = x, Re Q = 0 exactly on the imaginary axis
    assert np.max(np.abs(couette_graph.gamma_inf.vertices.real)) < 1e-8


def test_gamma_inf_strictly_decreasing(couette_graph):
    ims = couette_graph.gamma_inf.vertices.imag
    assert np.all(np.diff(ims) < 0)


def test_residuals_below_tolerance(couette_graph):
    for curve in couette_graph.curves.values():
        assert np.max(curve.residuals) < 1e-8


def test_curves_start_at_lambda0(couette_graph):
    g = couette_graph
    for curve in g.curves.values():
        assert abs(curve.vertices[0] - g.lambda0) < 1e-10


def test_polyline_distance():
    verts = np.array([0.0 + 0.0j, 1.0 + 0.0j, 1.0 + 1.0j])
    assert polyline_distance(verts, 0.5 + 0.5j) == pytest.approx(0.5)
    assert polyline_distance(verts, 2.0 + 1.0j) == pytest.approx(1.0)


def test_asymmetric_profile_graph():
    p = parse_profile("builtin:shifted2:-2")
    g = assemble_graph(p)
    assert p.a < g.lambda0.real < p.b and g.lambda0.imag < 0
    assert g.gamma_plus.endpoint == pytest.approx(complex(p.b), abs=1e-8)
    assert g.gamma_minus.endpoint == pytest.approx(complex(p.a), abs=1e-8)


def test_graph_csv_has_lambda0_row(couette_graph):
    lines = couette_graph.to_csv().splitlines()
    assert lines[0] == "kind,re,im,residual"
    assert lines[1].startswith("lambda0,")
    kinds = {line.split(",")[0] for line in lines[1:]}
    assert kinds == {"lambda0", "plus", "minus", "infinity"}
