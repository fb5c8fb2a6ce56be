"""Numerical radius, weighted seminorm, a-adjoint, and state-space oracles.

The numerical radius of x is computed by sweeping the support function
g(theta) = lambda_max(Re(e^{i theta} x)) over a uniform angular grid and
refining the best local maxima by golden-section search; g is a pointwise
maximum of sinusoids with amplitude at most ||x||, so a bracket of width w
carries error at most ||x|| w^2 / 2.

Weighted quantities reduce by conjugation: for an invertible positive
weight a and x~ = a^(1/2) x a^(-1/2),

    v_a(x) = v(x~)   and   ||x||_a = ||x~||,

via the substitution sigma = a^(1/2) rho a^(1/2), which maps densities
normalized by trace(rho a) = 1 onto ordinary density matrices. The oracle
functions at the bottom maximize over rank-1 states directly, without the
conjugation, and exist to validate that reduction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.optimize

from .errors import (
    DimensionMismatchError,
    NotHermitianError,
    SingularWeightError,
)
from .linalg import as_matrix, hermitian_part, HERMITIAN_TOL_REL

GRID_POINTS = 720
DEFAULT_RADIUS_TOL = 1e-9
_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


# ---------------------------------------------------------------------------
# support-function evaluation
# ---------------------------------------------------------------------------


def _eigmax_2x2(h: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of a stack of Hermitian 2x2 matrices, closed form."""
    a = h[..., 0, 0].real
    c = h[..., 1, 1].real
    b = h[..., 0, 1]
    return (a + c) / 2.0 + np.hypot((a - c) / 2.0, np.abs(b))


def _eigmax_3x3(h: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of a stack of Hermitian 3x3 matrices.

    Trigonometric closed form; accurate to ~1e-13 relative in the generic
    case but can lose digits near triple degeneracy, so it is used only to
    locate grid maxima, never for the returned value.
    """
    d0 = h[..., 0, 0].real
    d1 = h[..., 1, 1].real
    d2 = h[..., 2, 2].real
    q = (d0 + d1 + d2) / 3.0
    p01, p02, p12 = h[..., 0, 1], h[..., 0, 2], h[..., 1, 2]
    off = (np.abs(p01) ** 2 + np.abs(p02) ** 2 + np.abs(p12) ** 2)
    p2 = (d0 - q) ** 2 + (d1 - q) ** 2 + (d2 - q) ** 2 + 2.0 * off
    p = np.sqrt(np.maximum(p2 / 6.0, 0.0))
    b00, b11, b22 = d0 - q, d1 - q, d2 - q
    detb = (
        b00 * (b11 * b22 - np.abs(p12) ** 2)
        - b22 * np.abs(p01) ** 2
        - b11 * np.abs(p02) ** 2
        + 2.0 * (p01 * p12 * np.conj(p02)).real
    )
    safe_p = np.where(p > 0, p, 1.0)
    r = np.clip(detb / (2.0 * safe_p**3), -1.0, 1.0)
    lam = q + 2.0 * p * np.cos(np.arccos(r) / 3.0)
    return np.where(p > 0, lam, q)


_heevd_cache: dict = {}


def _lapack_heevd(n: int):
    if n not in _heevd_cache:
        probe = np.zeros((n, n), dtype=np.complex128)
        _heevd_cache[n] = scipy.linalg.get_lapack_funcs("heevd", (probe,))
    return _heevd_cache[n]


def _support_values(
    h1: np.ndarray, h2: np.ndarray, thetas: np.ndarray, exact: bool
) -> np.ndarray:
    """g(theta) = lambda_max(cos(theta) h1 + sin(theta) h2) for a theta array.

    `exact` selects the LAPACK path; otherwise dims 2 and 3 use the closed
    forms above (grid location only). Small batches go through the raw
    LAPACK wrapper: the gufunc dispatch of stacked eigvalsh costs more than
    the factorization itself for a handful of tiny matrices.
    """
    stack = (
        np.cos(thetas)[:, None, None] * h1 + np.sin(thetas)[:, None, None] * h2
    )
    n = h1.shape[0]
    if n == 2:
        return _eigmax_2x2(stack)
    if n == 3 and not exact:
        return _eigmax_3x3(stack)
    if thetas.size <= 8:
        heevd = _lapack_heevd(n)
        out = np.empty(thetas.size)
        for k in range(thetas.size):
            w, _, info = heevd(stack[k], compute_v=0)
            if info != 0:  # pragma: no cover - zheevd failure on finite input
                return np.linalg.eigvalsh(stack)[:, -1]
            out[k] = w[-1]
        return out
    return np.linalg.eigvalsh(stack)[:, -1]


def _golden_max(f, lo, hi, width):
    """Vectorized golden-section maximization on brackets [lo, hi].

    `f` maps a theta array to g values; one batched evaluation per
    iteration. Returns (theta, value) per bracket at the best interior
    point seen.
    """
    d = hi - lo
    x1 = hi - _INVPHI * d
    x2 = lo + _INVPHI * d
    f1, f2 = f(x1), f(x2)
    while np.max(hi - lo) > width:
        take1 = f1 >= f2
        old_x1, old_f1, old_x2, old_f2 = x1, f1, x2, f2
        hi = np.where(take1, old_x2, hi)
        lo = np.where(take1, lo, old_x1)
        d = hi - lo
        newx = np.where(take1, hi - _INVPHI * d, lo + _INVPHI * d)
        newf = f(newx)
        x1 = np.where(take1, newx, old_x2)
        f1 = np.where(take1, newf, old_f2)
        x2 = np.where(take1, old_x1, newx)
        f2 = np.where(take1, old_f1, newf)
    best1 = f1 >= f2
    return np.where(best1, x1, x2), np.where(best1, f1, f2)


def numerical_radius(
    x, tol: float = DEFAULT_RADIUS_TOL, grid_points: Optional[int] = None
) -> float:
    """Numerical radius v(x) = max over theta of lambda_max(Re(e^{i theta} x)).

    Absolute accuracy tol * max(1, ||x||); the sweep evaluates g on
    grid_points uniform angles (default GRID_POINTS) and golden-section-
    refines brackets around the top three local maxima. The result never
    exceeds the true value by more than eigensolver roundoff (every
    estimate is an evaluation of g).
    """
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    n_grid = GRID_POINTS if grid_points is None else int(grid_points)
    if n_grid < 16:
        raise ValueError(f"grid_points must be >= 16, got {n_grid}")
    x = as_matrix(x)
    n = x.shape[0]
    if n == 1:
        return float(abs(x[0, 0]))
    scale = float(np.linalg.norm(x))  # Frobenius upper-bounds the 2-norm
    if scale == 0.0:
        return 0.0
    h1 = hermitian_part(x)
    h2 = 1j * (x - x.conj().T) / 2.0

    thetas = 2.0 * np.pi * np.arange(n_grid) / n_grid
    g = _support_values(h1, h2, thetas, exact=False)
    is_max = (g >= np.roll(g, 1)) & (g >= np.roll(g, -1))
    cand = np.nonzero(is_max)[0]
    if cand.size == 0:
        cand = np.arange(n_grid)
    order = np.argsort(g[cand], kind="stable")[::-1]
    top = cand[order[:3]]

    step = 2.0 * np.pi / n_grid
    lo = thetas[top] - step
    hi = thetas[top] + step
    # bracket error <= ||x|| w^2 / 2 <= tol * max(1, ||x||)
    width = np.sqrt(2.0 * tol * max(1.0, scale) / scale)

    def f(th):
        return _support_values(h1, h2, th, exact=True)

    _, refined = _golden_max(f, lo, hi, width)
    center = f(thetas[top])
    return float(max(refined.max(), center.max()))


def numerical_range_boundary(x, n_points: int) -> np.ndarray:
    """Boundary samples of the numerical range.

    For each theta on a uniform grid, returns <x u, u> with u the top
    eigenvector of Re(e^{i theta} x); these are boundary points of the
    (convex) numerical range.
    """
    if n_points < 3:
        raise ValueError(f"n_points must be >= 3, got {n_points}")
    x = as_matrix(x)
    h1 = hermitian_part(x)
    h2 = 1j * (x - x.conj().T) / 2.0
    thetas = 2.0 * np.pi * np.arange(n_points) / n_points
    stack = (
        np.cos(thetas)[:, None, None] * h1 + np.sin(thetas)[:, None, None] * h2
    )
    _, vecs = np.linalg.eigh(stack)
    u = vecs[:, :, -1]
    return np.einsum("ki,ij,kj->k", u.conj(), x, u)


# ---------------------------------------------------------------------------
# weights and states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Weight:
    """Positive-definite weight a with cached square root and inverses.

    The geq_one flag records lambda_min(a) >= 1 - 1e-12; several bounds are
    proved only under that hypothesis and the harness honors it. Singular or
    indefinite weights are rejected: invertibility is what makes every
    weighted quantity finite and enables the conjugation reduction.
    """

    a: np.ndarray
    sqrt_a: np.ndarray = field(repr=False)
    inv_sqrt_a: np.ndarray = field(repr=False)
    inv_a: np.ndarray = field(repr=False)
    geq_one: bool
    norm_a: float

    @staticmethod
    def from_matrix(a) -> "Weight":
        a = as_matrix(a, "weight")
        if np.linalg.norm(a - a.conj().T, 2) > HERMITIAN_TOL_REL * (
            1.0 + np.linalg.norm(a, 2)
        ):
            raise NotHermitianError("weight must be Hermitian")
        w, v = np.linalg.eigh(hermitian_part(a))
        if w[0] <= 1e-10 * w[-1] or w[-1] <= 0.0:
            raise SingularWeightError(
                f"weight must be positive definite; spectrum in "
                f"[{w[0]:.3e}, {w[-1]:.3e}]"
            )
        vh = v.conj().T
        return Weight(
            a=a,
            sqrt_a=(v * np.sqrt(w)) @ vh,
            inv_sqrt_a=(v / np.sqrt(w)) @ vh,
            inv_a=(v / w) @ vh,
            geq_one=bool(w[0] >= 1.0 - 1e-12),
            norm_a=float(w[-1]),
        )

    @staticmethod
    def identity(n: int) -> "Weight":
        eye = np.eye(n, dtype=np.complex128)
        return Weight(a=eye, sqrt_a=eye, inv_sqrt_a=eye, inv_a=eye,
                      geq_one=True, norm_a=1.0)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @property
    def is_identity(self) -> bool:
        return self.norm_a == 1.0 and np.array_equal(self.a, np.eye(self.dim))

    def conjugate(self, x: np.ndarray) -> np.ndarray:
        """a^(1/2) x a^(-1/2), the similarity carrying v_a and ||.||_a to the
        unweighted quantities."""
        return self.sqrt_a @ x @ self.inv_sqrt_a


@dataclass(frozen=True)
class AState:
    """A state f on the weighted state space: f(y) = trace(rho y) with rho
    PSD and trace(rho a) = 1."""

    rho: np.ndarray
    weight: Weight

    def __post_init__(self):
        rho = as_matrix(self.rho, "rho")
        if rho.shape != self.weight.a.shape:
            raise DimensionMismatchError("state and weight dimensions differ")
        scale = float(np.linalg.norm(rho, 2))
        if scale > 0 and float(np.linalg.eigvalsh(hermitian_part(rho))[0]) < -1e-10 * scale:
            raise ValueError("rho must be positive semidefinite")
        norm = complex(np.trace(rho @ self.weight.a))
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"trace(rho a) = {norm:.6g}, expected 1")

    def apply(self, y) -> complex:
        """f(y) = trace(rho y)."""
        y = np.asarray(y, dtype=np.complex128)
        if y.shape != self.rho.shape:
            raise DimensionMismatchError(
                f"operand shape {y.shape} does not match state dim {self.rho.shape}"
            )
        return complex(np.trace(self.rho @ y))

    def apply_real(self, y) -> float:
        """f(y) for y with real f-value (Hermitian-type operands)."""
        return self.apply(y).real


def state_apply(f: AState, y) -> complex:
    """Evaluate the positive functional f at y."""
    return f.apply(y)


def random_state(w: Weight, seed, rank: Optional[int] = None) -> AState:
    """Random state: rho = g g* / trace(g g* a) for complex Gaussian g.

    Bit-identical for a fixed seed. rank defaults to full rank; rank 1 is
    enough for suprema (the extreme points of the state space lie in the
    rank-1 closure).
    """
    n = w.dim
    rank = n if rank is None else rank
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    m = g @ g.conj().T
    return AState(m / np.trace(m @ w.a).real, w)


# ---------------------------------------------------------------------------
# weighted quantities
# ---------------------------------------------------------------------------


def a_adjoint(x, w: Weight) -> np.ndarray:
    """The a-adjoint x#: the unique solution of a x# = x* a, i.e. a^-1 x* a.

    The defining identity is re-verified (in Frobenius norm) on every call;
    a failure indicates a corrupted weight cache.
    """
    x = as_matrix(x)
    if x.shape != w.a.shape:
        raise DimensionMismatchError("matrix and weight dimensions differ")
    xs = x.conj().T
    adj = w.inv_a @ xs @ w.a
    resid = np.linalg.norm(w.a @ adj - xs @ w.a)
    bound = 1e-10 * w.norm_a * max(np.linalg.norm(x), 1e-300)
    if resid > bound:
        raise SingularWeightError(
            f"a-adjoint identity residual {resid:.3e} exceeds {bound:.3e}"
        )
    return adj


def a_seminorm(x, w: Weight) -> float:
    """||x||_a = sup over states of sqrt(f(x* a x)) = ||a^(1/2) x a^(-1/2)||."""
    x = as_matrix(x)
    if x.shape != w.a.shape:
        raise DimensionMismatchError("matrix and weight dimensions differ")
    return float(np.linalg.svd(w.conjugate(x), compute_uv=False)[0])


def a_numerical_radius(
    x, w: Weight, tol: float = DEFAULT_RADIUS_TOL,
    grid_points: Optional[int] = None,
) -> float:
    """v_a(x) = sup |f(ax)| over the weighted state space = v(a^(1/2) x a^(-1/2))."""
    x = as_matrix(x)
    if x.shape != w.a.shape:
        raise DimensionMismatchError("matrix and weight dimensions differ")
    return numerical_radius(w.conjugate(x), tol, grid_points)


def is_a_selfadjoint(x, w: Weight, tol: float = 1e-10) -> bool:
    """True when ax is Hermitian within tol * ||ax||."""
    x = as_matrix(x)
    m = w.a @ x
    return np.linalg.norm(m - m.conj().T, 2) <= tol * np.linalg.norm(m, 2)


def is_a_positive(x, w: Weight, tol: float = 1e-10) -> bool:
    """True when ax is Hermitian PSD, both within tol * ||ax||."""
    x = as_matrix(x)
    m = w.a @ x
    nm = np.linalg.norm(m, 2)
    if np.linalg.norm(m - m.conj().T, 2) > tol * nm:
        return False
    if nm == 0.0:
        return True
    return float(np.linalg.eigvalsh(hermitian_part(m))[0]) >= -tol * nm


# ---------------------------------------------------------------------------
# state-space oracles
# ---------------------------------------------------------------------------
#
# These maximize over rank-1 states f_v(y) = (v* y v) / (v* a v) directly,
# independently of the conjugation reduction used above. Random sampling
# provides broad coverage; climbs solve generalized Hermitian eigenproblems
# against a by Cholesky reduction (scipy), never the a^(1/2) similarity.


def _rayleigh_batch(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("bi,ij,bj->b", v.conj(), m, v)


def oracle_a_seminorm(
    x, w: Weight, n_samples: int = 100_000, seed: int = 0
) -> float:
    """Brute-force ||x||_a: sample rank-1 states, then climb.

    The objective sqrt(v* x*ax v / v* a v) is a generalized Rayleigh
    quotient, so a single generalized eigensolve lands on the climb's fixed
    point; the sampled maximum certifies it from below.
    """
    x = as_matrix(x)
    n = x.shape[0]
    m = x.conj().T @ w.a @ x
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_samples, n)) + 1j * rng.normal(size=(n_samples, n))
    num = _rayleigh_batch(m, v).real
    den = _rayleigh_batch(w.a, v).real
    sampled = float(np.max(np.sqrt(np.maximum(num, 0.0) / den)))
    top = scipy.linalg.eigh(
        hermitian_part(m), w.a, eigvals_only=True, subset_by_index=[n - 1, n - 1]
    )[0]
    climbed = float(np.sqrt(max(top, 0.0)))
    return max(sampled, climbed)


def oracle_a_numerical_radius(
    x,
    w: Weight,
    n_samples: int = 100_000,
    seed: int = 0,
    n_starts: int = 4,
    phase_grid: int = 64,
) -> float:
    """Brute-force v_a(x): sample rank-1 states, then hill-climb.

    For a fixed phase angle theta, sup over states of Re(e^{-i theta} f(ax))
    is the top generalized eigenvalue of the pencil (Re(e^{-i theta} a x), a),
    solved here by Cholesky reduction (scipy), not by the a^(1/2)
    similarity the production path uses. The climb is therefore over theta
    alone: a coarse phase grid plus Brent refinement of the best brackets,
    seeded additionally from the best sampled states (whose phase updates
    f -> arg f(ax) ascend the objective). Every intermediate value is a
    true state-space evaluation, so the result never overshoots.
    """
    x = as_matrix(x)
    n = x.shape[0]
    m = w.a @ x
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_samples, n)) + 1j * rng.normal(size=(n_samples, n))
    s = _rayleigh_batch(m, v)
    den = _rayleigh_batch(w.a, v).real
    obj = np.abs(s) / den
    order = np.argsort(obj, kind="stable")[::-1]
    best = float(obj[order[0]])
    if n == 1:
        return float(abs(m[0, 0]) / w.a[0, 0].real)

    def g(theta):
        h = hermitian_part(m * np.exp(-1j * theta))
        val = scipy.linalg.eigh(
            h, w.a, eigvals_only=True, subset_by_index=[n - 1, n - 1]
        )
        return float(val[0])

    def refine(theta, half_width):
        res = scipy.optimize.minimize_scalar(
            lambda th: -g(th),
            bounds=(theta - half_width, theta + half_width),
            method="bounded",
            options={"xatol": 1e-10},
        )
        return max(-float(res.fun), g(theta))

    thetas = 2.0 * np.pi * np.arange(phase_grid) / phase_grid
    grid_vals = np.array([g(th) for th in thetas])
    is_max = (grid_vals >= np.roll(grid_vals, 1)) & (
        grid_vals >= np.roll(grid_vals, -1)
    )
    tops = np.nonzero(is_max)[0]
    tops = tops[np.argsort(grid_vals[tops], kind="stable")[::-1][:3]]
    step = 2.0 * np.pi / phase_grid
    for k in tops:
        best = max(best, refine(float(thetas[k]), step))
    # climb from the best sampled states: their phases mark extra basins
    for k in order[:n_starts]:
        sk = s[k]
        if abs(sk) == 0.0:
            continue
        best = max(best, refine(float(np.angle(sk)), step))
    return best
