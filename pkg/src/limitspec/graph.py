"""Limit spectral graph: the curves Re Q+- = 0, Re Q = 0 and their meeting
point lambda0, traced as polylines in the truncated semistrip."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .action import action, action_derivative
from .errors import (InconsistentGraph, NoConvergence, OutsideStrip,
                     StallNearBranchPoint, StepCollapse)
from .profile import Profile, Semistrip, default_strip

_STEP_MIN = 1e-4
_STEP_MAX = 5e-2


@dataclass
class Curve:
    kind: str  # plus | minus | infinity
    vertices: np.ndarray  # complex polyline, starts at lambda0
    residuals: np.ndarray  # |Re F| at each vertex
    endpoint: complex | None = None  # real branch point reached, if any
    termination: str = ""

    def distance_to(self, lam: complex) -> float:
        """Distance from lam to this polyline."""
        return polyline_distance(self.vertices, lam)


@dataclass
class SpectralGraph:
    lambda0: complex
    gamma_plus: Curve
    gamma_minus: Curve
    gamma_inf: Curve
    strip: Semistrip
    # endpoint pairing actually observed: gamma_plus reaches b, gamma_minus
    # reaches a (forced by Q+(b) = 0, Q-(a) = 0)
    metadata: dict = field(default_factory=dict)

    @property
    def curves(self):
        return {"plus": self.gamma_plus, "minus": self.gamma_minus,
                "infinity": self.gamma_inf}

    def distance_to(self, lam: complex) -> float:
        return min(c.distance_to(lam) for c in self.curves.values())

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("kind,re,im,residual\n")
        buf.write(f"lambda0,{self.lambda0.real:.16g},{self.lambda0.imag:.16g},0\n")
        for kind, c in self.curves.items():
            for v, r in zip(c.vertices, c.residuals):
                buf.write(f"{kind},{v.real:.16g},{v.imag:.16g},{r:.3e}\n")
        return buf.getvalue()


def polyline_distance(vertices: np.ndarray, lam: complex) -> float:
    v = np.asarray(vertices)
    if len(v) == 0:
        return np.inf
    if len(v) == 1:
        return abs(lam - v[0])
    a, b = v[:-1], v[1:]
    ab = b - a
    denom = np.abs(ab) ** 2
    t = np.clip(((lam - a) * np.conj(ab)).real / np.where(denom == 0, 1, denom),
                0.0, 1.0)
    proj = a + t * ab
    return float(np.min(np.abs(lam - proj)))


def _F(p: Profile, lam: complex, kind: str, nodes: int) -> complex:
    side = {"plus": "plus", "minus": "minus", "infinity": "full"}[kind]
    return action(p, lam, side, nodes=nodes)


def _Fprime(p: Profile, lam: complex, kind: str, nodes: int) -> complex:
    side = {"plus": "plus", "minus": "minus", "infinity": "full"}[kind]
    return action_derivative(p, lam, side, nodes=nodes)


def find_lambda0(p: Profile, seed: complex | None = None, tol: float = 1e-12,
                 strip: Semistrip | None = None, max_iter: int = 60,
                 nodes: int = 64) -> complex:
    """Two-dimensional damped Newton on (Re Q+, Re Q-) = (0, 0)."""
    if strip is None:
        strip = default_strip(p)
    lam = complex(seed) if seed is not None else strip.midpoint_seed

    def g(z):
        return np.array([action(p, z, "plus", nodes=nodes).real,
                         action(p, z, "minus", nodes=nodes).real])

    gv = g(lam)
    for _ in range(max_iter):
        if np.max(np.abs(gv)) <= tol:
            return lam
        dp = action_derivative(p, lam, "plus", nodes=nodes)
        dm = action_derivative(p, lam, "minus", nodes=nodes)
        J = np.array([[dp.real, -dp.imag], [dm.real, -dm.imag]])
        try:
            dx = np.linalg.solve(J, -gv)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular Jacobian in lambda0 search") from exc
        step = complex(dx[0], dx[1])
        t = 1.0
        for _ in range(40):
            cand = lam + t * step
            if not strip.contains(cand, pad=1e-9):
                t *= 0.5
                continue
            gc = g(cand)
            if np.max(np.abs(gc)) < np.max(np.abs(gv)):
                lam, gv = cand, gc
                break
            t *= 0.5
        else:
            if not strip.contains(lam + step, pad=1e-9):
                raise OutsideStrip(
                    f"lambda0 iterate left the strip from seed {lam}")
            raise NoConvergence("lambda0 Newton stalled; adjust the seed")
    raise NoConvergence("lambda0 Newton did not converge in budget")


def _correct(p: Profile, lam: complex, kind: str, tol: float, nodes: int,
             max_iter: int = 12) -> tuple[complex, float] | None:
    """Newton on Re F along the normal direction; None on failure."""
    for _ in range(max_iter):
        f = _F(p, lam, kind, nodes).real
        if abs(f) <= tol:
            return lam, abs(f)
        fp = _Fprime(p, lam, kind, nodes)
        n2 = abs(fp) ** 2
        if n2 == 0:
            return None
        lam = lam - f * np.conj(fp) / n2
    f = _F(p, lam, kind, nodes).real
    if abs(f) <= tol:
        return lam, abs(f)
    return None


def trace_curve(p: Profile, kind: str, start: complex, strip: Semistrip,
                step: float = 1e-2, tol: float = 1e-9,
                direction: complex | None = None,
                stop_points: tuple = (), stop_radius: float = 5e-3,
                nodes: int = 64, max_vertices: int = 200_000) -> Curve:
    """Predictor-corrector trace of Re F = 0 starting at `start`.

    Stops near a stop point (appending the exact branch point when it is
    real), at the strip's depth cutoff, or raises StepCollapse.
    """
    lam = complex(start)
    fixed = _correct(p, lam, kind, tol, nodes)
    if fixed is None:
        raise NoConvergence(f"trace start {start} does not satisfy Re F = 0")
    lam, res = fixed
    verts = [lam]
    resid = [res]
    h = step
    prev_tau = None
    easy = 0
    termination = "max_vertices"
    endpoint = None
    stall_guard = 10 * tol

    for _ in range(max_vertices):
        fp = _Fprime(p, lam, kind, nodes)
        if abs(fp) == 0:
            termination = "gradient_vanished"
            break
        tau = 1j * np.conj(fp) / abs(fp)
        if prev_tau is not None:
            if (tau * np.conj(prev_tau)).real < 0:
                tau = -tau
        elif direction is not None:
            if (tau * np.conj(direction)).real < 0:
                tau = -tau
        # stopping rules
        hit = None
        for sp in stop_points:
            if abs(lam - sp) <= max(stop_radius, 2 * h):
                hit = sp
                break
        if hit is not None:
            if abs(hit.imag) < 1e-12:
                verts.append(complex(hit))
                resid.append(0.0)
                endpoint = complex(hit)
            termination = "endpoint"
            break
        if lam.imag <= -strip.im_cutoff:
            termination = "cutoff"
            break

        moved = False
        while True:
            cand = lam + h * tau
            fixed = _correct(p, cand, kind, tol, nodes)
            if fixed is not None and abs(fixed[0] - lam) <= 3 * h:
                lam, res = fixed
                verts.append(lam)
                resid.append(res)
                prev_tau = tau
                easy += 1
                if easy >= 5:
                    h = min(2 * h, _STEP_MAX)
                    easy = 0
                moved = True
                break
            easy = 0
            h *= 0.5
            if h < _STEP_MIN:
                near = [sp for sp in stop_points
                        if abs(lam - sp) < 50 * max(stop_radius, stall_guard)]
                if near and abs(near[0].imag) < 1e-12:
                    verts.append(complex(near[0]))
                    resid.append(0.0)
                    endpoint = complex(near[0])
                    termination = "stall_near_branch_point"
                    moved = False
                    break
                raise StepCollapse(
                    f"step collapsed at {lam} tracing gamma_{kind}")
        if not moved:
            break

    return Curve(kind, np.array(verts), np.array(resid), endpoint, termination)


def assemble_graph(p: Profile, strip: Semistrip | None = None,
                   seed: complex | None = None, step: float = 1e-2,
                   tol: float = 1e-9, lambda0_tol: float = 1e-12,
                   nodes: int = 64) -> SpectralGraph:
    """lambda0 plus the three curve traces, with structural checks."""
    if strip is None:
        strip = default_strip(p)
    lam0 = find_lambda0(p, seed=seed, tol=lambda0_tol, strip=strip,
                        nodes=nodes)
    a, b = complex(p.a), complex(p.b)

    g_plus = trace_curve(p, "plus", lam0, strip, step=step, tol=tol,
                         direction=(b - lam0) / abs(b - lam0),
                         stop_points=(b, a), nodes=nodes)
    g_minus = trace_curve(p, "minus", lam0, strip, step=step, tol=tol,
                          direction=(a - lam0) / abs(a - lam0),
                          stop_points=(a, b), nodes=nodes)
    g_inf = trace_curve(p, "infinity", lam0, strip, step=step, tol=tol,
                        direction=-1j, stop_points=(), nodes=nodes)

    ims = g_inf.vertices.imag
    if not np.all(np.diff(ims) < 0):
        raise InconsistentGraph(
            "gamma_infinity vertices are not strictly decreasing in Im")

    meta = {
        "endpoint_pairing": {"plus": g_plus.endpoint, "minus": g_minus.endpoint},
        "pairing_note": ("gamma_plus reaches b and gamma_minus reaches a, "
                         "forced by the endpoint values of the actions"),
    }
    return SpectralGraph(lam0, g_plus, g_minus, g_inf, strip, meta)
