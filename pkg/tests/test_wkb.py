import math

import numpy as np
import pytest

from limitspec.errors import OffCurve
from limitspec.graph import assemble_graph
from limitspec.profile import parse_profile
from limitspec.wkb import (QuantizationRule, WkbEigenvalue, counting_function,
                           enumerate_wkb, match_spectra, quantization_value,
                           solve_quantization)

COUETTE = parse_profile("builtin:couette")
EPS = 0.1


@pytest.fixture(scope="module")
def graph():
    return assemble_graph(COUETTE)


@pytest.fixture(scope="module")
def enumeration(graph):
    return enumerate_wkb(COUETTE, EPS, graph)


def test_rhs_signs():
    assert QuantizationRule("minus", 2).rhs(EPS) == \
        pytest.approx(EPS * math.pi * 1.75)
    assert QuantizationRule("plus", 2).rhs(EPS) == \
        pytest.approx(-EPS * math.pi * 1.75)
    assert QuantizationRule("full", 3).rhs(EPS) == \
        pytest.approx(-EPS * math.pi * 3)


def test_roots_satisfy_quantization(enumeration):
    assert enumeration.eigenvalues, "no quantization roots found"
    for w in enumeration.eigenvalues:
        rhs = QuantizationRule(w.branch, w.k).rhs(EPS)
        val = quantization_value(COUETTE, w.mu, w.branch)
        assert abs(val - rhs) < 1e-10
        assert w.residual < 1e-10


def test_roots_sit_on_their_curves(enumeration, graph):
    for w in enumeration.eigenvalues:
        assert w.distance_to_curve < 5e-3


def test_indices_positive_and_consecutive(enumeration):
    for branch in ("plus", "minus", "full"):
        ks = sorted(w.k for w in enumeration.by_branch(branch))
        assert ks, f"no roots on branch {branch}"
        assert ks[0] >= 1
        assert ks == list(range(ks[0], ks[0] + len(ks)))


def test_plus_minus_mirror_symmetry(enumeration):
    # q = x is odd, so the spectrum is symmetric under lam -> -conj(lam)
    plus = sorted(enumeration.by_branch("plus"), key=lambda w: w.k)
    minus = sorted(enumeration.by_branch("minus"), key=lambda w: w.k)
    assert len(plus) == len(minus)
    for wp, wm in zip(plus, minus):
        assert wp.mu == pytest.approx(-wm.mu.conjugate(), abs=1e-9)


def test_solve_quantization_from_rough_seed(graph):
    rule = QuantizationRule("minus", 2)
    seed = graph.gamma_minus.vertices[len(graph.gamma_minus.vertices) // 2]
    w = solve_quantization(COUETTE, EPS, rule, seed,
                           curve=graph.gamma_minus)
    assert w.residual < 1e-11


def test_counting_function_on_curve(graph):
    lam = complex(graph.gamma_inf.vertices[40])
    n = counting_function(COUETTE, EPS, lam, "full", curve=graph.gamma_inf)
    assert n > 0
    n_half = counting_function(COUETTE, EPS / 2, lam, "full",
                               curve=graph.gamma_inf)
    assert n_half == pytest.approx(2 * n, rel=1e-9)


def test_counting_function_off_curve_raises(graph):
    with pytest.raises(OffCurve):
        counting_function(COUETTE, EPS, 0.4 - 1.5j, "full",
                          curve=graph.gamma_inf)


def _pred(mu, branch="full", k=1):
    return WkbEigenvalue(branch, k, mu, 0.0, 0.0)


def test_match_spectra_counts():
    preds = [_pred(0.0 - 0.5j, k=1), _pred(0.0 - 1.0j, k=2),
             _pred(0.0 - 2.0j, k=3)]
    computed = [0.001 - 0.5j, 0.0 - 1.002j, 5.0 - 5.0j]
    rep = match_spectra(preds, computed, radius=0.01)
    assert rep.n_matched == 2
    assert rep.match_rate == pytest.approx(2 / 3)
    assert rep.n_singleton == 2
    assert rep.unmatched_computed == 1
    assert rep.circles_disjoint


def test_match_spectra_overlapping_circles_flagged():
    preds = [_pred(0.0 - 0.5j, k=1), _pred(0.0 - 0.505j, k=2)]
    rep = match_spectra(preds, [0.0 - 0.5j], radius=0.01)
    assert not rep.circles_disjoint


def test_match_report_json_schema(enumeration):
    import json
    rep = match_spectra(enumeration.eigenvalues, [w.mu for w in
                                                  enumeration.eigenvalues],
                        radius=1e-6)
    doc = json.loads(rep.to_json())
    assert set(doc) == {"summary", "records"}
    assert doc["summary"]["match_rate"] == 1.0
    assert {"branch", "k", "mu", "nearest", "distance", "within_radius",
            "circle_count"} <= set(doc["records"][0])
