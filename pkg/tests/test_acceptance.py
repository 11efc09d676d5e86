"""Acceptance gate: ten numbered criteria, one printed pass/fail line each.

Heavy inputs (graphs, filtered spectra, sweeps) are shared module-scope
fixtures so each criterion reads as a direct statement of its gate.
"""

import math
import time

import numpy as np
import pytest

from limitspec.action import action
from limitspec.disc import (build_model, build_os, eigensolve,
                            filter_spurious, hausdorff)
from limitspec.graph import assemble_graph, polyline_distance
from limitspec.nonnormal import growth_fit, riesz_growth_fit
from limitspec.profile import default_strip, parse_profile
from limitspec.wkb import counting_function, enumerate_wkb, match_spectra

COUETTE = parse_profile("builtin:couette")
SHIFTED = parse_profile("builtin:shifted2:-2")
FLAT = parse_profile("poly:0")
DELTA = 0.05
EPS_SWEEP = [1 / 20, 1 / 25, 1 / 30, 1 / 40, 1 / 50]


def report(num: int, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {num}: {'PASS' if ok else 'FAIL'} - {detail}")


def trusted(builder, n):
    low = eigensolve(builder(n))
    high = eigensolve(builder(2 * n))
    filter_spurious(low, high)
    return low


@pytest.fixture(scope="module")
def graph():
    return assemble_graph(COUETTE)


@pytest.fixture(scope="module")
def model_005():
    return trusted(lambda n: build_model(COUETTE, 0.05, n), 200)


@pytest.fixture(scope="module")
def model_0025():
    return trusted(lambda n: build_model(COUETTE, 0.025, n), 480)


@pytest.fixture(scope="module")
def wkb_005(graph):
    return enumerate_wkb(COUETTE, 0.05, graph, delta=DELTA)


def exclusions(graph):
    return (complex(COUETTE.a), complex(COUETTE.b), graph.lambda0)


def test_criterion_1_exact_oracle_discretization():
    t0 = time.time()
    spec = eigensolve(build_model(FLAT, 1.0, 64))
    exact = np.array([-1j * (k * np.pi / 2) ** 2 for k in range(1, 11)])
    err = float(np.max(np.abs(spec.eigenvalues[:10] - exact)))
    elapsed = time.time() - t0
    ok = err <= 1e-8 and elapsed < 5
    report(1, ok, f"max |lam_k + i(k pi/2)^2| = {err:.2e} "
                  f"(gate 1e-8), {elapsed:.1f}s")
    assert ok


def test_criterion_2_action_identity():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for p in (COUETTE, SHIFTED):
        strip = default_strip(p)
        for _ in range(100):
            lam = complex(rng.uniform(p.a + 1e-3, p.b - 1e-3),
                          rng.uniform(-strip.im_cutoff, -1e-3))
            # different node counts so the two sides come from independent
            # quadratures rather than one algebraic rearrangement
            gap = abs(action(p, lam, "full", nodes=96) -
                      (action(p, lam, "plus", nodes=64) -
                       action(p, lam, "minus", nodes=64)))
            worst = max(worst, gap)
    elapsed = time.time() - t0
    ok = worst <= 1e-9 and elapsed < 10
    report(2, ok, f"max |Q - (Q+ - Q-)| = {worst:.2e} over 2x100 samples "
                  f"(gate 1e-9), {elapsed:.1f}s")
    assert ok


def test_criterion_3_closed_form_action():
    err = abs(action(COUETTE, 0.0j, "plus") -
              (2.0 / 3.0) * np.exp(1j * np.pi / 4))
    ok = err <= 1e-10
    report(3, ok, f"|Q+(0) - (2/3)e^(i pi/4)| = {err:.2e} (gate 1e-10)")
    assert ok


def test_criterion_4_graph_structure(graph, model_005):
    t0 = time.time()
    lam0_ok = abs(graph.lambda0.real) <= 1e-8
    tr = model_005.trusted_eigenvalues()
    # the claim concerns the truncated semistrip the graph is traced in
    outside = [complex(v) for v in tr
               if graph.strip.contains(v, pad=-DELTA)
               and all(abs(v - e) > DELTA for e in exclusions(graph))]
    dists = [graph.distance_to(v) for v in outside]
    worst = max(dists)
    elapsed = time.time() - t0
    ok = worst <= 0.05 and lam0_ok and elapsed < 120
    report(4, ok, f"max dist(trusted, Gamma) = {worst:.2e} over "
                  f"{len(outside)} modes (gate 0.05), |Re lambda0| = "
                  f"{abs(graph.lambda0.real):.1e}, {elapsed:.0f}s")
    assert ok


def test_criterion_5_quantization_localization(model_005, wkb_005):
    radius = 10 * 0.05 ** 2
    tr = [complex(v) for v in model_005.trusted_eigenvalues()]
    rep = match_spectra(wkb_005.eigenvalues, tr, radius)
    singleton = all(r.circle_count == 1 for r in rep.records
                    if r.within_radius)
    ok = rep.match_rate >= 0.9 and singleton
    report(5, ok, f"match rate = {rep.match_rate:.0%} of "
                  f"{rep.n_predicted} predictions within {radius} "
                  f"(gate 90%), all matched circles singleton: {singleton}")
    assert ok


def test_criterion_6_counting_function(graph, model_005, model_0025):
    depths = (0.9, 1.4, 1.9, 2.4, 2.9)
    curve = graph.gamma_inf
    brute_by_eps = {}
    ok = True
    details = []
    for eps, spec in ((0.05, model_005), (0.025, model_0025)):
        tr = spec.trusted_eigenvalues()
        on_axis = np.array([v for v in tr
                            if polyline_distance(curve.vertices, v) < 0.02])
        n0 = counting_function(COUETTE, eps, graph.lambda0, "full",
                               curve=curve)
        brute_counts = []
        for depth in depths:
            lam = complex(curve.vertices[
                int(np.argmin(np.abs(curve.vertices.imag + depth)))])
            predicted = counting_function(COUETTE, eps, lam, "full",
                                          curve=curve) - n0
            brute = int(np.sum(on_axis.imag >= -depth))
            brute_counts.append(brute)
            if abs(predicted - brute) > 3:
                ok = False
            details.append(f"eps={eps} depth={depth}: "
                           f"{predicted:.1f} vs {brute}")
        brute_by_eps[eps] = brute_counts[-1]
    ratio = brute_by_eps[0.025] / brute_by_eps[0.05]
    if not 1.7 <= ratio <= 2.3:
        ok = False
    report(6, ok, f"predicted vs brute within +-3 at {len(depths)} depths "
                  f"({'; '.join(details[:3])}; ...), halving ratio = "
                  f"{ratio:.2f} (gate [1.7, 2.3])")
    assert ok


def test_criterion_7_model_os_coincidence(graph, model_005):
    t0 = time.time()
    os_spec = trusted(lambda n: build_os(COUETTE, 1.0, 400.0, n), 240)
    cut = graph.strip.im_cutoff

    def trim(vals):
        return [complex(v) for v in vals
                if all(abs(v - e) > DELTA for e in exclusions(graph))
                and v.imag >= -cut + DELTA]

    d = hausdorff(trim(model_005.trusted_eigenvalues()),
                  trim(os_spec.trusted_eigenvalues()))
    elapsed = time.time() - t0
    ok = d <= 0.05 and elapsed < 300
    report(7, ok, f"Hausdorff(model eps=0.05, OS R=400) = {d:.4f} "
                  f"(gate 0.05), {elapsed:.0f}s")
    assert ok


def test_criterion_8_resolvent_growth():
    t0 = time.time()
    rep = growth_fit(COUETTE, -0.2j, EPS_SWEEP)
    ctrl = growth_fit(COUETTE, -0.2j, EPS_SWEEP, builder="hermitian")
    elapsed = time.time() - t0
    ok = (rep.slope > 0 and rep.r_squared >= 0.99
          and abs(ctrl.slope) <= 0.01 and elapsed < 600)
    report(8, ok, f"slope = {rep.slope:.3f} (gate > 0), r^2 = "
                  f"{rep.r_squared:.4f} (gate 0.99), hermitian slope = "
                  f"{ctrl.slope:.2e} (gate |.| <= 0.01), {elapsed:.0f}s")
    assert ok


def test_criterion_9_riesz_growth():
    t0 = time.time()
    rep = riesz_growth_fit(COUETTE, EPS_SWEEP)
    ctrl = riesz_growth_fit(COUETTE, EPS_SWEEP, builder="hermitian")
    elapsed = time.time() - t0
    ctrl_ok = all(abs(v - 1.0) <= 1e-8 for _, v in ctrl.samples)
    ok = rep.slope > 0 and rep.r_squared >= 0.98 and ctrl_ok
    report(9, ok, f"slope = {rep.slope:.3f} (gate > 0), r^2 = "
                  f"{rep.r_squared:.4f} (gate 0.98), skipped = "
                  f"{[s['eps'] for s in rep.skipped]}, hermitian cond in "
                  f"1 +- {max(abs(v - 1) for _, v in ctrl.samples):.1e} "
                  f"(gate 1e-8), {elapsed:.0f}s")
    assert ok


def test_criterion_10_sobolev_analog():
    t0 = time.time()
    rep = growth_fit(COUETTE, -0.2j, EPS_SWEEP, builder="os",
                     norm_kind="Sobolev")
    elapsed = time.time() - t0
    ok = rep.slope > 0 and rep.r_squared >= 0.98 and elapsed < 900
    report(10, ok, f"OS Sobolev resolvent slope = {rep.slope:.3f} "
                   f"(gate > 0), r^2 = {rep.r_squared:.4f} (gate 0.98), "
                   f"{elapsed:.0f}s")
    assert ok
