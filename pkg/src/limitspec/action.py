"""Action integrals of sqrt(i(q - lambda)) from the turning point to +-1.

The integrand has a square-root zero at the turning point xi; the
substitution z(t) = xi + t^2 * (endpoint - xi) removes it analytically, and
Gauss-Legendre quadrature in t then converges spectrally.

Branch convention: the square root is the principal value at the real
endpoint +1 and is continued without jumps along the plus segment back to
xi, then through xi onto the minus segment (rotating the local sqrt(z - xi)
factor by half the turn angle between the two segment directions). With this
convention Q = Q_plus - Q_minus holds by construction; the convention itself
is a declared choice, and a global sign flip only re-indexes quantization.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import BranchAmbiguity
from .profile import Profile, turning_point

_MAX_REFINE_DEPTH = 12


@lru_cache(maxsize=32)
def _gauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    # map from [-1, 1] to [0, 1]
    return 0.5 * (x + 1.0), 0.5 * w


def _deflate(p: Profile, lam: complex, xi: complex) -> np.ndarray:
    """Coefficients of m(z) with i*(q(z) - lambda) = (z - xi) * m(z).

    Synthetic division; the remainder equals the turning-point residual and
    is dropped.
    """
    c = np.asarray(p.coeffs, dtype=complex).copy()
    c[0] -= lam
    quo, _rem = P.polydiv(c, np.array([-xi, 1.0], dtype=complex))
    return 1j * quo


def _step_sqrt(prev: complex, t_prev: float, t_cur: float, m_cur: complex,
               mfun, depth: int) -> complex:
    """One continuation step of sqrt(m): pick the sign closest to `prev`,
    refining the step in t when the argument jump exceeds pi/2."""
    r = np.sqrt(m_cur)
    if abs(r - prev) > abs(-r - prev):
        r = -r
    if (r * np.conj(prev)).real > 0 or prev == 0 or r == 0:
        return r
    if depth >= _MAX_REFINE_DEPTH:
        raise BranchAmbiguity(
            "square-root continuation jump exceeds pi/2 after refinement"
        )
    t_mid = 0.5 * (t_prev + t_cur)
    r_mid = _step_sqrt(prev, t_prev, t_mid, mfun(t_mid), mfun, depth + 1)
    return _step_sqrt(r_mid, t_mid, t_cur, m_cur, mfun, depth + 1)


class _Segment:
    """Branch-tracked quadrature data for one straight segment xi -> endpoint.

    sqrt_d is the chosen square root of (endpoint - xi); the tracked square
    root of the deflated factor m is stored at the Gauss nodes, plus its
    continuation value at the turning point (t = 0).
    """

    def __init__(self, mcoef: np.ndarray, xi: complex, endpoint: float,
                 sqrt_d: complex, seed_t: float, seed_value: complex,
                 nodes: int):
        self.d = endpoint - xi
        self.sqrt_d = sqrt_d
        t, w = _gauss(nodes)
        self.t, self.w = t, w

        def mfun(tv: float) -> complex:
            return complex(P.polyval(xi + (tv * tv) * self.d, mcoef))

        # tracking chain: from the seeded end through all Gauss nodes to the
        # opposite end (t = 0 is the turning point, t = 1 the real endpoint)
        if seed_t == 1.0:
            chain_t = np.concatenate(([1.0], t[np.argsort(-t)], [0.0]))
        else:
            chain_t = np.concatenate(([0.0], t[np.argsort(t)], [1.0]))
        chain_m = np.array([mfun(tv) for tv in chain_t])
        tracked = np.empty(len(chain_t), dtype=complex)
        r0 = np.sqrt(chain_m[0])
        tracked[0] = r0 if abs(r0 - seed_value) <= abs(-r0 - seed_value) else -r0
        for i in range(1, len(chain_t)):
            tracked[i] = _step_sqrt(tracked[i - 1], chain_t[i - 1], chain_t[i],
                                    chain_m[i], mfun, 0)
        by_t = dict(zip(chain_t, tracked))
        self.sm = np.array([by_t[tv] for tv in t])
        self.sm_at_xi = by_t[0.0]
        self.sm_at_end = by_t[1.0]

    def integral(self) -> complex:
        # Q_seg = 2 d sqrt_d * sum_j w_j t_j^2 sm(t_j)
        return 2.0 * self.d * self.sqrt_d * complex(
            np.sum(self.w * self.t ** 2 * self.sm))

    def derivative(self) -> complex:
        # dQ_seg/dlambda = (-i d / sqrt_d) * sum_j w_j / sm(t_j)
        return -1j * self.d / self.sqrt_d * complex(np.sum(self.w / self.sm))


def _segments(p: Profile, lam: complex, nodes: int, tol: float):
    lam = complex(lam)
    xi = turning_point(p, lam, tol=tol).xi
    mcoef = _deflate(p, lam, xi)
    d_plus = 1.0 - xi
    d_minus = -1.0 - xi

    if abs(d_plus) < 1e-13:
        # lambda at the right branch point: the plus segment is empty; seed
        # the minus segment from the principal value at its own endpoint
        seg_minus = _Segment(mcoef, xi, -1.0, np.sqrt(d_minus), 1.0,
                             np.sqrt(complex(P.polyval(-1.0, mcoef))), nodes)
        return None, seg_minus

    sqrt_dp = np.sqrt(d_plus)
    u_end = d_plus * complex(P.polyval(1.0, mcoef))
    seed_plus = np.sqrt(u_end) / sqrt_dp  # makes sqrt_d * sm principal at +1
    seg_plus = _Segment(mcoef, xi, 1.0, sqrt_dp, 1.0, seed_plus, nodes)

    if abs(d_minus) < 1e-13:
        return seg_plus, None

    turn = float(np.angle(d_minus / d_plus))
    if turn <= -np.pi:
        turn += 2.0 * np.pi
    sqrt_dm = np.sqrt(abs(d_minus)) * np.exp(0.5j * (np.angle(d_plus) + turn))
    seg_minus = _Segment(mcoef, xi, -1.0, sqrt_dm, 0.0, seg_plus.sm_at_xi,
                         nodes)
    return seg_plus, seg_minus


@dataclass(frozen=True)
class ActionValue:
    q_plus: complex
    q_minus: complex
    q_full: complex
    branch_note: str = "principal-at-plus-one, tracked through turning point"


def action_value(p: Profile, lam: complex, nodes: int = 64,
                 tol: float = 1e-12) -> ActionValue:
    """All three action integrals with a shared branch continuation."""
    if nodes < 16:
        raise ValueError("quadrature node count must be >= 16")
    seg_plus, seg_minus = _segments(p, lam, nodes, tol)
    qp = seg_plus.integral() if seg_plus is not None else 0j
    qm = seg_minus.integral() if seg_minus is not None else 0j
    return ActionValue(qp, qm, qp - qm)


def action(p: Profile, lam: complex, side: str = "full", nodes: int = 64,
           tol: float = 1e-12) -> complex:
    """Action integral Q_plus, Q_minus or Q = Q_plus - Q_minus."""
    v = action_value(p, lam, nodes=nodes, tol=tol)
    return {"plus": v.q_plus, "minus": v.q_minus, "full": v.q_full}[side]


def action_derivative(p: Profile, lam: complex, side: str = "full",
                      nodes: int = 64, tol: float = 1e-12) -> complex:
    """dQ_side/dlambda along the same branch-tracked path.

    The moving-endpoint term at xi vanishes (the primitive behaves like
    (z - xi)^(3/2) there), leaving the integral of -i/(2 sqrt(i(q-lambda))).
    """
    if nodes < 16:
        raise ValueError("quadrature node count must be >= 16")
    seg_plus, seg_minus = _segments(p, lam, nodes, tol)
    dp = seg_plus.derivative() if seg_plus is not None else 0j
    dm = seg_minus.derivative() if seg_minus is not None else 0j
    return {"plus": dp, "minus": dm, "full": dp - dm}[side]
