"""Chebyshev collocation discretizations of the model problem and the
Orr-Sommerfeld pencil, eigensolving, and two-resolution spurious filtering.

The Orr-Sommerfeld leading term is taken as (D^2 - alpha^2)^2: the four
clamped boundary conditions force a fourth-order operator. Clamped
conditions are imposed by basis recombination with (1 - x^2)^2 T_k(x),
whose derivatives are evaluated exactly in the Chebyshev basis (no D^4
matrix products, which lose ~n^8 * macheps absolute accuracy).
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from numpy.polynomial import chebyshev as C

from .errors import EigensolverFailure, SingularB
from .profile import Profile, peval


@lru_cache(maxsize=16)
def _grid_arrays(n: int):
    j = np.arange(n + 1)
    x = np.cos(np.pi * j / n)  # nodes from +1 down to -1
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** j
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    # Clenshaw-Curtis weights for the extreme points
    w = np.zeros(n + 1)
    theta = np.pi * j / n
    v = np.ones(n - 1)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
        v -= np.cos(n * theta[1:-1]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[1:-1]) / (4 * k * k - 1)
    w[1:-1] = 2.0 * v / n
    return x, D, w


@dataclass(frozen=True)
class CollocationGrid:
    n: int
    nodes: np.ndarray
    diff1: np.ndarray
    diff2: np.ndarray
    weights: np.ndarray

    @classmethod
    def make(cls, n: int) -> "CollocationGrid":
        if n < 16:
            raise ValueError("grid needs n >= 16")
        x, D, w = _grid_arrays(n)
        return cls(n, x, D, D @ D, w)


@dataclass
class ModelOperator:
    matrix: np.ndarray  # (n-1) x (n-1) on interior nodes
    eps: float
    grid: CollocationGrid
    hermitian_variant: bool = False

    @property
    def interior(self) -> np.ndarray:
        return self.grid.nodes[1:-1]

    def embed(self, vec: np.ndarray) -> np.ndarray:
        """Interior samples -> full-grid samples with boundary zeros."""
        full = np.zeros((self.grid.n + 1,) + vec.shape[1:], dtype=complex)
        full[1:-1] = vec
        return full


def build_model(p: Profile, eps: float, n: int,
                hermitian: bool = False) -> ModelOperator:
    """-i eps^2 z'' + q z on interior nodes with Dirichlet conditions.

    hermitian=True builds the self-adjoint control -eps^2 z'' + q z instead.
    """
    if n < 16:
        raise ValueError("build_model needs n >= 16")
    grid = CollocationGrid.make(n)
    d2 = grid.diff2[1:-1, 1:-1]
    qdiag = np.diag(peval(p, grid.nodes[1:-1]).astype(complex))
    # sign convention: +i eps^2 D^2 puts the spectrum in the lower
    # half-plane, where the semistrip, the action branch and the q = 0
    # closed form -i (k pi / 2)^2 all live
    factor = -eps * eps if hermitian else 1j * eps * eps
    return ModelOperator(factor * d2 + qdiag, eps, grid, hermitian)


@lru_cache(maxsize=16)
def _clamped_basis(n: int):
    """Samples of phi_k = (1-x^2)^2 T_k and its derivatives at the nodes.

    Returns (E, E1, E2, E4): values, first, second, fourth derivatives,
    shape (n+1) x (n-3), exact in the Chebyshev coefficient basis.
    """
    x, _, _ = _grid_arrays(n)
    # (1-x^2)^2 = 1 - 2x^2 + x^4 in Chebyshev coefficients
    win = C.poly2cheb([1.0, 0.0, -2.0, 0.0, 1.0])
    cols = n - 3
    E = np.empty((n + 1, cols))
    E1 = np.empty_like(E)
    E2 = np.empty_like(E)
    E4 = np.empty_like(E)
    for k in range(cols):
        tk = np.zeros(k + 1)
        tk[k] = 1.0
        phi = C.chebmul(win, tk)
        E[:, k] = C.chebval(x, phi)
        E1[:, k] = C.chebval(x, C.chebder(phi, 1))
        E2[:, k] = C.chebval(x, C.chebder(phi, 2))
        E4[:, k] = C.chebval(x, C.chebder(phi, 4))
    return E, E1, E2, E4


@dataclass
class OSOperator:
    a_matrix: np.ndarray
    b_matrix: np.ndarray
    s_matrix: np.ndarray  # B^-1 A, the discretized operator
    alpha: float
    r: float
    grid: CollocationGrid
    basis: np.ndarray  # node samples of the clamped basis columns
    basis_d1: np.ndarray  # first-derivative samples (for Sobolev products)
    b_condition: float

    @property
    def eps(self) -> float:
        return (self.alpha * self.r) ** -0.5

    def embed(self, coef: np.ndarray) -> np.ndarray:
        """Coefficient vector(s) -> node samples."""
        return self.basis @ coef


def build_os(p: Profile, alpha: float, r: float, n: int) -> OSOperator:
    """Clamped-basis collocation of the Orr-Sommerfeld pencil A y = lam B y.

    A = (D^2-a^2)^2 - i a R [q (D^2-a^2) - q''],  B = i a R (D^2-a^2),
    collocated at nodes 2..n-2 (matching the n-3 basis columns).
    """
    if n < 32:
        raise ValueError("build_os needs n >= 32")
    if alpha == 0 or r <= 0:
        raise ValueError("build_os needs alpha != 0 and R > 0")
    grid = CollocationGrid.make(n)
    E, E1, E2, E4 = _clamped_basis(n)
    x = grid.nodes
    q = peval(p, x)
    q2 = peval(p, x, 2)
    a2 = alpha * alpha
    L = E2 - a2 * E  # (D^2 - alpha^2) applied to the basis
    # same lower-half-plane sign convention as build_model (the pencil with
    # the opposite sign of i yields the mirror spectrum in the upper
    # half-plane)
    A_cols = (E4 - 2 * a2 * E2 + a2 * a2 * E
              + 1j * alpha * r * (q[:, None] * L - q2[:, None] * E))
    B_cols = -1j * alpha * r * L
    rows = slice(2, n - 1)
    A_r = A_cols[rows]
    B_r = B_cols[rows]
    cond = float(np.linalg.cond(B_r))
    if cond > 1e14:
        raise SingularB(f"restricted B condition number {cond:.3e}")
    s = np.linalg.solve(B_r, A_r)
    return OSOperator(A_r, B_r, s, alpha, r, grid, E, E1, cond)


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # full-grid node samples, one column per mode
    grid: CollocationGrid
    resolution: int
    near_defective: np.ndarray = field(default=None)
    trusted: np.ndarray = field(default=None)  # set by filter_spurious
    trust_distance: np.ndarray = field(default=None)

    def trusted_eigenvalues(self) -> np.ndarray:
        if self.trusted is None:
            raise ValueError("run filter_spurious first")
        return self.eigenvalues[self.trusted]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("re,im,trusted,near_defective,resolution\n")
        trusted = self.trusted if self.trusted is not None \
            else np.zeros(len(self.eigenvalues), dtype=bool)
        for lam, t, d in zip(self.eigenvalues, trusted, self.near_defective):
            buf.write(f"{lam.real:.16g},{lam.imag:.16g},{int(t)},{int(d)},"
                      f"{self.resolution}\n")
        return buf.getvalue()


def eigensolve(op: ModelOperator | OSOperator,
               defect_gap: float = 1e-6,
               defect_angle: float = 1e-3,
               shift: complex | None = None) -> SpectrumResult:
    """Dense eigendecomposition with L2-normalized node-sample vectors.

    With `shift` given, the decomposition is done on (M - shift I)^-1,
    whose O(1) norm gives far smaller backward error than the raw
    collocation matrix (norm ~ eps^2 n^4); eigenvalues are mapped back.
    Near-defective pairs (eigenvalues within defect_gap and eigenvector
    angle below defect_angle) are flagged, not repaired.
    """
    if isinstance(op, ModelOperator):
        mat = op.matrix
    else:
        mat = op.s_matrix
    try:
        if shift is None:
            vals, vecs = sla.eig(mat)
        else:
            ident = np.eye(mat.shape[0], dtype=complex)
            inv = sla.solve(mat - shift * ident, ident)
            mu, vecs = sla.eig(inv)
            mu[mu == 0] = np.finfo(float).tiny
            vals = shift + 1.0 / mu
    except Exception as exc:  # LAPACK failure is opaque; re-tag it
        raise EigensolverFailure(str(exc)) from exc
    samples = op.embed(vecs)
    w = op.grid.weights
    norms = np.sqrt(np.einsum("i,ij->j", w, np.abs(samples) ** 2).real)
    norms[norms == 0] = 1.0
    samples = samples / norms
    order = np.lexsort((vals.real, -vals.imag))
    vals = vals[order]
    samples = samples[:, order]

    nd = np.zeros(len(vals), dtype=bool)
    for i in range(len(vals)):
        close = np.nonzero(np.abs(vals - vals[i]) < defect_gap)[0]
        for j in close:
            if j <= i:
                continue
            ip = np.einsum("i,i,i->", w, np.conj(samples[:, i]),
                           samples[:, j])
            cosang = min(abs(ip), 1.0)
            if np.arccos(min(cosang, 1.0)) < defect_angle:
                nd[i] = nd[j] = True
    return SpectrumResult(vals, samples, op.grid,
                          op.grid.n, near_defective=nd)


def filter_spurious(low: SpectrumResult, high: SpectrumResult,
                    tol: float = 1e-6) -> list[complex]:
    """Trust a low-resolution eigenvalue iff the high-resolution spectrum
    has an eigenvalue within tol. Marks flags on `low`, returns the
    trusted eigenvalues."""
    if high.resolution < 2 * low.resolution:
        raise ValueError("high resolution must be at least twice low")
    trusted = np.zeros(len(low.eigenvalues), dtype=bool)
    dists = np.full(len(low.eigenvalues), np.inf)
    hv = high.eigenvalues
    for i, lam in enumerate(low.eigenvalues):
        d = float(np.min(np.abs(hv - lam)))
        dists[i] = d
        trusted[i] = d <= tol
    low.trusted = trusted
    low.trust_distance = dists
    return [complex(v) for v in low.eigenvalues[trusted]]


def trusted_spectrum(builder, n: int, filter_tol: float = 1e-6,
                     **kwargs) -> SpectrumResult:
    """Build + eigensolve at n and 2n, filter, return the flagged low result."""
    low = eigensolve(builder(n=n, **kwargs))
    high = eigensolve(builder(n=2 * n, **kwargs))
    filter_spurious(low, high, tol=filter_tol)
    return low


def hausdorff(set_a, set_b) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    a = np.asarray(set_a, dtype=complex)
    b = np.asarray(set_b, dtype=complex)
    if len(a) == 0 or len(b) == 0:
        return np.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
