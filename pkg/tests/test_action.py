import math

import numpy as np
import pytest

from limitspec.action import action, action_derivative
from limitspec.profile import default_strip, parse_profile

COUETTE = parse_profile("builtin:couette")
SHIFTED = parse_profile("builtin:shifted2:-2")


def closed_form_q_plus(lam: complex) -> complex:
    """For q = x: Q+(lam) = (2/3) e^{i pi/4} (1 - lam)^{3/2} (principal)."""
    return (2.0 / 3.0) * np.exp(1j * np.pi / 4) * (1.0 - lam) ** 1.5


def closed_form_q_minus(lam: complex) -> complex:
    return (2.0 / 3.0) * np.exp(1j * np.pi / 4) * (-1.0 - lam) ** 1.5


def test_q_plus_at_zero_closed_form():
    val = action(COUETTE, 0.0 - 0.0j, "plus")
    assert abs(val - (2.0 / 3.0) * np.exp(1j * np.pi / 4)) < 1e-10


@pytest.mark.parametrize("lam", [0.2 - 0.3j, -0.5 - 0.8j, 0.0 - 1.0j,
                                 0.9 - 0.05j, -0.9 - 1.5j])
def test_couette_closed_form_both_sides(lam):
    assert abs(action(COUETTE, lam, "plus") - closed_form_q_plus(lam)) < 1e-11
    assert abs(action(COUETTE, lam, "minus") - closed_form_q_minus(lam)) < 1e-11


@pytest.mark.parametrize("profile", [COUETTE, SHIFTED])
def test_action_identity_full_equals_difference(profile):
    rng = np.random.default_rng(7)
    strip = default_strip(profile)
    for _ in range(25):
        lam = complex(rng.uniform(profile.a + 0.05, profile.b - 0.05),
                      rng.uniform(-strip.im_cutoff, -0.05))
        full = action(profile, lam, "full")
        diff = action(profile, lam, "plus") - action(profile, lam, "minus")
        assert abs(full - diff) <= 1e-9


def test_derivative_matches_finite_difference():
    lam = 0.3 - 0.6j
    h = 1e-6
    for side in ("plus", "minus", "full"):
        num = (action(COUETTE, lam + h, side) -
               action(COUETTE, lam - h, side)) / (2 * h)
        assert action_derivative(COUETTE, lam, side) == \
            pytest.approx(num, rel=1e-7)


def test_node_doubling_stability():
    lam = -0.4 - 0.7j
    for side in ("plus", "minus", "full"):
        v64 = action(SHIFTED, lam, side, nodes=64)
        v128 = action(SHIFTED, lam, side, nodes=128)
        assert abs(v64 - v128) < 1e-10
