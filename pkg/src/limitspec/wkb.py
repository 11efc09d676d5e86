"""Quantization-condition roots along the limit curves, counting functions,
and matching of predicted against computed eigenvalues."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .action import action, action_derivative
from .errors import NoConvergence, OffCurve, WanderedOffCurve
from .graph import Curve, SpectralGraph, polyline_distance
from .profile import Profile

_SIDE = {"plus": "plus", "minus": "minus", "full": "full"}
_CURVE_OF_BRANCH = {"plus": "plus", "minus": "minus", "full": "infinity"}
# sign in the counting functions: +Q+ on gamma_plus, -Q- on gamma_minus,
# +Q on gamma_infinity
_COUNT_SIGN = {"plus": 1.0, "minus": -1.0, "full": 1.0}

# With the declared square-root branch (principal at +1, continued through
# the turning point), i*Q+ and i*Q run negative along their curves while
# i*Q- runs positive; the quantization targets carry the matching sign so
# that k = 1, 2, ... walks outward from lambda0 (or downward on
# gamma_infinity). These signs are the same orientation choice the
# counting-function table above encodes.
_RHS_SIGN = {"plus": -1.0, "minus": 1.0, "full": -1.0}


@dataclass(frozen=True)
class QuantizationRule:
    branch: str  # plus | minus | full
    k: int

    def rhs(self, eps: float) -> float:
        shift = 0.25 if self.branch in ("plus", "minus") else 0.0
        return _RHS_SIGN[self.branch] * eps * math.pi * (self.k - shift)


@dataclass(frozen=True)
class WkbEigenvalue:
    branch: str
    k: int
    mu: complex
    residual: float
    distance_to_curve: float


def quantization_value(p: Profile, lam: complex, branch: str,
                       nodes: int = 64) -> complex:
    """i * Q_branch(lambda); real on the corresponding curve."""
    return 1j * action(p, lam, _SIDE[branch], nodes=nodes)


def solve_quantization(p: Profile, eps: float, rule: QuantizationRule,
                       seed: complex, tol: float = 1e-12,
                       curve: Curve | None = None, delta: float = 0.05,
                       nodes: int = 64, max_iter: int = 60) -> WkbEigenvalue:
    """Complex Newton on i*Q_branch(mu) = rhs(k)."""
    rhs = rule.rhs(eps)
    lam = complex(seed)
    f = quantization_value(p, lam, rule.branch, nodes) - rhs
    for _ in range(max_iter):
        if abs(f) <= tol:
            break
        fp = 1j * action_derivative(p, lam, _SIDE[rule.branch], nodes=nodes)
        if fp == 0:
            raise NoConvergence("vanishing derivative in quantization solve")
        step = f / fp
        t = 1.0
        for _ in range(40):
            cand = lam - t * step
            fc = quantization_value(p, cand, rule.branch, nodes) - rhs
            if abs(fc) < abs(f):
                lam, f = cand, fc
                break
            t *= 0.5
        else:
            raise NoConvergence(
                f"quantization Newton stalled for branch={rule.branch} k={rule.k}")
    if abs(f) > tol:
        raise NoConvergence(
            f"quantization Newton did not converge for k={rule.k}")
    dist = polyline_distance(curve.vertices, lam) if curve is not None else 0.0
    if curve is not None and dist > 2 * delta:
        raise WanderedOffCurve(
            f"root {lam} is {dist:.3g} from the {rule.branch} curve")
    return WkbEigenvalue(rule.branch, rule.k, lam, abs(f), dist)


def _trim_curve(curve: Curve, delta: float,
                exclusions: tuple[complex, ...]) -> np.ndarray:
    """Vertices farther than delta from every exclusion point."""
    v = curve.vertices
    keep = np.ones(len(v), dtype=bool)
    for c in exclusions:
        keep &= np.abs(v - c) > delta
    return v[keep]


@dataclass
class EnumerationResult:
    eigenvalues: list[WkbEigenvalue]
    failures: list[dict] = field(default_factory=list)

    def by_branch(self, branch: str) -> list[WkbEigenvalue]:
        return [w for w in self.eigenvalues if w.branch == branch]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("branch,k,re_mu,im_mu,residual\n")
        for w in self.eigenvalues:
            buf.write(f"{w.branch},{w.k},{w.mu.real:.16g},{w.mu.imag:.16g},"
                      f"{w.residual:.3e}\n")
        return buf.getvalue()


def enumerate_wkb(p: Profile, eps: float, g: SpectralGraph,
                  delta: float = 0.05, tol: float = 1e-11,
                  nodes: int = 64) -> EnumerationResult:
    """All quantization roots on the delta-trimmed curves of the graph.

    The admissible k-range per branch comes from the values of i*Q at the
    trimmed curve ends; each Newton solve is warm-started from the curve
    vertex where i*Q crosses the target.
    """
    exclusions = (complex(p.a), complex(p.b), g.lambda0)
    out = EnumerationResult([])
    for branch in ("plus", "minus", "full"):
        curve = g.curves[_CURVE_OF_BRANCH[branch]]
        verts = _trim_curve(curve, delta, exclusions)
        if len(verts) < 2:
            continue
        vals = np.array([quantization_value(p, v, branch, nodes).real
                         for v in verts])
        vmin, vmax = float(np.min(vals)), float(np.max(vals))
        shift = 0.25 if branch in ("plus", "minus") else 0.0
        sign = _RHS_SIGN[branch]
        ends = sorted((sign * vmin / (eps * math.pi) + shift,
                       sign * vmax / (eps * math.pi) + shift))
        k_lo = math.ceil(ends[0] - 1e-9)
        k_hi = math.floor(ends[1] + 1e-9)
        order = np.argsort(vals)
        for k in range(k_lo, k_hi + 1):
            rule = QuantizationRule(branch, k)
            rhs = rule.rhs(eps)
            seed = complex(np.interp(rhs, vals[order], verts[order].real)) + \
                1j * float(np.interp(rhs, vals[order], verts[order].imag))
            try:
                w = solve_quantization(p, eps, rule, seed, tol=tol,
                                       curve=curve, delta=delta, nodes=nodes)
            except (NoConvergence, WanderedOffCurve) as exc:
                out.failures.append({"branch": branch, "k": k,
                                     "error": type(exc).__name__,
                                     "message": str(exc)})
                continue
            if all(abs(w.mu - c) > delta for c in exclusions):
                out.eigenvalues.append(w)
    return out


def counting_function(p: Profile, eps: float, lam: complex, branch: str,
                      curve: Curve | None = None, nodes: int = 64,
                      trace_tol: float = 1e-9) -> float:
    """Leading term of the eigenvalue counting function at lam on a curve.

    Evaluates sign * Q_branch(lam) / (i pi eps); on the curve this is real,
    and the imaginary part is asserted small relative to the distance from
    the curve polyline.
    """
    sign = _COUNT_SIGN[branch]
    val = sign * action(p, lam, _SIDE[branch], nodes=nodes) / (1j * math.pi * eps)
    if curve is not None:
        dist = polyline_distance(curve.vertices, lam)
        bound = 1e-3 / eps * max(dist, 10 * trace_tol)
        if abs(val.imag) > bound:
            raise OffCurve(
                f"counting function imaginary part {val.imag:.3g} exceeds "
                f"{bound:.3g} at distance {dist:.3g} from the curve")
    return float(val.real)


@dataclass
class MatchRecord:
    branch: str
    k: int
    mu: complex
    nearest: complex | None
    distance: float
    within_radius: bool
    circle_count: int  # computed eigenvalues inside the C*eps^2 circle


@dataclass
class MatchReport:
    records: list[MatchRecord]
    radius: float
    n_predicted: int
    n_computed: int
    n_matched: int
    n_singleton: int
    max_distance: float
    mean_distance: float
    unmatched_computed: int
    circles_disjoint: bool

    @property
    def match_rate(self) -> float:
        return self.n_matched / self.n_predicted if self.n_predicted else 0.0

    def to_json(self) -> str:
        return json.dumps({
            "summary": {
                "radius": self.radius,
                "n_predicted": self.n_predicted,
                "n_computed": self.n_computed,
                "n_matched": self.n_matched,
                "n_singleton": self.n_singleton,
                "match_rate": self.match_rate,
                "max_distance": self.max_distance,
                "mean_distance": self.mean_distance,
                "unmatched_computed": self.unmatched_computed,
                "circles_disjoint": self.circles_disjoint,
            },
            "records": [
                {
                    "branch": r.branch, "k": r.k,
                    "mu": [r.mu.real, r.mu.imag],
                    "nearest": None if r.nearest is None
                    else [r.nearest.real, r.nearest.imag],
                    "distance": r.distance,
                    "within_radius": r.within_radius,
                    "circle_count": r.circle_count,
                }
                for r in self.records
            ],
        }, sort_keys=True, indent=2)


def match_spectra(predicted: list[WkbEigenvalue], computed: list[complex],
                  radius: float) -> MatchReport:
    """Greedy nearest-neighbour match of predictions to computed eigenvalues
    within localization circles of the given radius."""
    comp = np.asarray(computed, dtype=complex)
    records = []
    used = np.zeros(len(comp), dtype=bool)
    for w in sorted(predicted, key=lambda w: (w.branch, w.k)):
        if len(comp) == 0:
            records.append(MatchRecord(w.branch, w.k, w.mu, None, np.inf,
                                       False, 0))
            continue
        d = np.abs(comp - w.mu)
        j = int(np.argmin(np.where(used, np.inf, d))) if not used.all() \
            else int(np.argmin(d))
        circle = int(np.sum(d <= radius))
        within = d[j] <= radius
        if within:
            used[j] = True
        records.append(MatchRecord(w.branch, w.k, w.mu, complex(comp[j]),
                                   float(d[j]), bool(within), circle))
    dists = [r.distance for r in records if np.isfinite(r.distance)]
    # circles around predictions that are >= 2*radius apart cannot overlap;
    # flag any pair closer than that
    mus = [r.mu for r in records]
    disjoint = all(abs(mus[i] - mus[j]) >= 2 * radius
                   for i in range(len(mus)) for j in range(i + 1, len(mus)))
    return MatchReport(
        records=records,
        radius=radius,
        n_predicted=len(records),
        n_computed=len(comp),
        n_matched=sum(r.within_radius for r in records),
        n_singleton=sum(r.circle_count == 1 for r in records),
        max_distance=float(np.max(dists)) if dists else 0.0,
        mean_distance=float(np.mean(dists)) if dists else 0.0,
        unmatched_computed=int(len(comp) - used.sum()),
        circles_disjoint=disjoint,
    )
