"""Velocity profiles: polynomial q(x), complex evaluation, turning points.

Profiles are real polynomials, strictly increasing on [-1, 1]. The turning
point xi(lambda) is the complex root of q(xi) = lambda reachable by Newton
from the unique real solution of q(x) = Re(lambda) on [-1, 1].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ConfigError, NoConvergence


@dataclass(frozen=True)
class Profile:
    """Real polynomial velocity profile on [-1, 1].

    coeffs are ascending power-basis coefficients.
    """

    coeffs: tuple[float, ...]
    label: str = "poly"

    def __post_init__(self):
        if len(self.coeffs) < 1:
            raise ConfigError("profile polynomial needs at least one coefficient")

    @property
    def a(self) -> float:
        """q(-1)."""
        return float(P.polyval(-1.0, self.coeffs))

    @property
    def b(self) -> float:
        """q(+1)."""
        return float(P.polyval(1.0, self.coeffs))

    def deriv_coeffs(self, order: int) -> np.ndarray:
        return P.polyder(self.coeffs, m=order) if order else np.asarray(self.coeffs)

    def __call__(self, z, order: int = 0):
        return peval(self, z, order)


@dataclass(frozen=True)
class Semistrip:
    """Truncated semistrip {a < Re < b, -im_cutoff <= Im < 0}."""

    a: float
    b: float
    im_cutoff: float

    def __post_init__(self):
        if not (self.a < self.b and self.im_cutoff > 0):
            raise ConfigError("semistrip requires a < b and im_cutoff > 0")

    def contains(self, lam: complex, pad: float = 0.0) -> bool:
        return (
            self.a - pad < lam.real < self.b + pad
            and -self.im_cutoff - pad <= lam.imag < pad
        )

    @property
    def midpoint_seed(self) -> complex:
        return complex(0.5 * (self.a + self.b), -0.25 * (self.b - self.a))


def default_strip(p: Profile, im_cutoff: float | None = None) -> Semistrip:
    if im_cutoff is None:
        im_cutoff = 2.0 * (p.b - p.a)
    return Semistrip(p.a, p.b, im_cutoff)


@dataclass(frozen=True)
class TurningPoint:
    xi: complex
    residual: float


def peval(p: Profile, z, order: int = 0):
    """Evaluate q, q' or q'' at a (possibly complex, possibly array) point."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    c = p.coeffs if order == 0 else P.polyder(p.coeffs, m=order)
    out = P.polyval(z, c)
    if np.isscalar(z) or np.ndim(z) == 0:
        return complex(out) if np.iscomplexobj(np.asarray(z)) else out
    return out


def _real_seed(p: Profile, target: float, n_iter: int = 200) -> float:
    """Bisection for the unique real root of q(x) = target on [-1, 1]."""
    lo, hi = -1.0, 1.0
    target = min(max(target, p.a), p.b)
    flo = P.polyval(lo, p.coeffs) - target
    if flo > 0:
        return lo
    for _ in range(n_iter):
        mid = 0.5 * (lo + hi)
        if P.polyval(mid, p.coeffs) - target <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def turning_point(
    p: Profile, lam: complex, tol: float = 1e-12, max_iter: int = 100
) -> TurningPoint:
    """Complex root of q(xi) = lambda near the real seed, by damped Newton."""
    lam = complex(lam)
    d1 = P.polyder(p.coeffs, m=1)
    xi = complex(_real_seed(p, lam.real))
    r = P.polyval(xi, p.coeffs) - lam
    for _ in range(max_iter):
        if abs(r) <= tol:
            return TurningPoint(xi, abs(r))
        dq = P.polyval(xi, d1)
        if dq == 0:
            break
        step = r / dq
        t = 1.0
        for _ in range(40):
            xi_new = xi - t * step
            r_new = P.polyval(xi_new, p.coeffs) - lam
            if abs(r_new) < abs(r):
                xi, r = xi_new, r_new
                break
            t *= 0.5
        else:
            break
    if abs(r) <= tol:
        return TurningPoint(xi, abs(r))
    raise NoConvergence(
        f"turning point iteration stalled at residual {abs(r):.3e} for lambda={lam}"
    )


@dataclass
class AmValidationReport:
    profile: str
    monotone: bool
    min_slope: float
    solvable: bool
    injective: bool
    passed: bool = field(init=False)
    witnesses: list = field(default_factory=list)

    def __post_init__(self):
        self.passed = self.monotone and self.solvable and self.injective

    def as_dict(self) -> dict:
        return {
            "profile": self.profile,
            "monotone": self.monotone,
            "min_slope": self.min_slope,
            "turning_points_solvable": self.solvable,
            "injective": self.injective,
            "passed": self.passed,
            "witnesses": [str(w) for w in self.witnesses],
        }


def validate_am(
    p: Profile,
    n_real: int = 2001,
    n_re: int = 21,
    n_im: int = 11,
    im_cutoff: float | None = None,
    tol: float = 1e-10,
) -> AmValidationReport:
    """Partial admissibility check: monotone on [-1,1], turning points
    solvable over a grid in the truncated semistrip, injectivity spot-check.

    Full conformal bijectivity onto the semistrip is not decidable from
    samples; a passing report is necessary, not sufficient.
    """
    n_real = max(n_real, 1001)
    xs = np.linspace(-1.0, 1.0, n_real)
    slopes = P.polyval(xs, P.polyder(p.coeffs, m=1))
    min_slope = float(np.min(slopes))
    monotone = min_slope > 0 and p.a < p.b
    witnesses: list = []
    if not monotone:
        witnesses.append(("nonmonotone_at", float(xs[int(np.argmin(slopes))])))
        return AmValidationReport(p.label, monotone, min_slope, False, False,
                                  witnesses=witnesses)

    if im_cutoff is None:
        im_cutoff = 2.0 * (p.b - p.a)
    res = np.linspace(p.a, p.b, n_re)[1:-1]
    ims = np.linspace(-im_cutoff, -1e-6, n_im)
    solvable = True
    roots = {}
    for re_ in res:
        for im_ in ims:
            lam = complex(re_, im_)
            try:
                tp = turning_point(p, lam, tol=tol)
            except NoConvergence:
                solvable = False
                witnesses.append(("unsolvable_at", lam))
                continue
            roots[(re_, im_)] = tp.xi

    injective = True
    vals = list(roots.items())
    xi_arr = np.array([v for _, v in vals])
    for i in range(len(vals)):
        d = np.abs(xi_arr - xi_arr[i])
        d[i] = np.inf
        j = int(np.argmin(d))
        if d[j] < 1e-8:
            injective = False
            witnesses.append(("duplicate_xi", vals[i][0], vals[j][0]))
            break
    return AmValidationReport(p.label, monotone, min_slope, solvable, injective,
                              witnesses=witnesses)


def parse_profile(spec: str) -> Profile:
    """Parse a CLI profile string.

    Accepted forms: ``builtin:couette``, ``builtin:cubic:c``,
    ``builtin:shifted2:s``, ``poly:c0,c1,...,cn``.
    """
    parts = spec.strip().split(":")
    try:
        if parts[0] == "builtin":
            name = parts[1]
            if name == "couette":
                return Profile((0.0, 1.0), "couette")
            if name == "cubic":
                c = float(parts[2])
                if c < 0:
                    raise ConfigError("cubic coefficient must be >= 0")
                return Profile((0.0, 1.0, 0.0, c), f"cubic:{c:g}")
            if name == "shifted2":
                s = float(parts[2])
                if abs(s) <= 1:
                    raise ConfigError("shifted2 requires |s| > 1")
                return Profile((s * s, -2.0 * s, 1.0), f"shifted2:{s:g}")
            raise ConfigError(f"unknown builtin profile {name!r}")
        if parts[0] == "poly":
            coeffs = tuple(float(c) for c in parts[1].split(","))
            return Profile(coeffs, spec)
    except (IndexError, ValueError) as exc:
        raise ConfigError(f"malformed profile spec {spec!r}") from exc
    raise ConfigError(f"unknown profile spec {spec!r}")
