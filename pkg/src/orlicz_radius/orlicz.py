"""Orlicz functions, complementary pairs, and Young's inequality.

An Orlicz function is a continuous, convex, nondecreasing map
phi: [0, inf) -> [0, inf) with phi(0) = 0 and phi(u) -> inf; we require the
non-degenerate case phi(u) > 0 for u > 0 throughout. Every such phi with a
density has phi(u) = integral of p over [0, u] for a nondecreasing p, and
the complementary function is psi(v) = integral of q with q the right
inverse of p. The pair satisfies Young's inequality x*y <= phi(x) + psi(y).

Four representations coexist:

* ``power_scaled(p)`` -- t^p / p (closed-form complementary t^q / q)
* ``power(r)``        -- t^r (multiplicative; no density representation here)
* density table      -- tabulated p on an ascending grid, complementary
  built numerically by monotone inversion plus adaptive trapezoid rule
* custom             -- arbitrary callable, no complementary
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import NegativeInputError, NoDensityError

VALIDATION_GRID_MAX = 10.0
VALIDATION_GRID_N = 256


def _as_nonneg(t, what: str = "argument") -> np.ndarray:
    arr = np.asarray(t, dtype=np.float64)
    if np.any(arr < 0):
        raise NegativeInputError(f"{what} must be nonnegative")
    return arr


@dataclass(frozen=True)
class OrliczFn:
    """A concrete Orlicz function. Instances are immutable and callable.

    ``submultiplicative`` / ``multiplicative`` are tri-state flags:
    True / False when known from the form, None when unclassified.
    """

    kind: str  # "power" | "power_scaled" | "table" | "custom"
    name: str
    exponent: float = 0.0
    grid: Optional[np.ndarray] = None
    density: Optional[np.ndarray] = None
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    submultiplicative: Optional[bool] = None
    multiplicative: Optional[bool] = None
    _cum: Optional[np.ndarray] = field(default=None, repr=False)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def power(r: float) -> "OrliczFn":
        """t^r with r >= 1. Exactly multiplicative: (uv)^r = u^r v^r."""
        if r < 1:
            raise ValueError(f"power exponent must be >= 1, got {r}")
        return OrliczFn(
            kind="power",
            name="t" if r == 1 else f"t^{r:g}",
            exponent=float(r),
            submultiplicative=True,
            multiplicative=True,
        )

    @staticmethod
    def power_scaled(p: float) -> "OrliczFn":
        """t^p / p with p >= 1; density p(t) = t^(p-1).

        For p > 1 the scaled power is not submultiplicative:
        (uv)^p / p > (uv)^p / p^2 whenever uv > 0.
        """
        if p < 1:
            raise ValueError(f"power_scaled exponent must be >= 1, got {p}")
        if p == 1:
            return OrliczFn.linear()
        return OrliczFn(
            kind="power_scaled",
            name=f"t^{p:g}/{p:g}",
            exponent=float(p),
            submultiplicative=False,
            multiplicative=False,
        )

    @staticmethod
    def linear() -> "OrliczFn":
        """The identity t, admitted as a first-class (boundary) form."""
        return OrliczFn(
            kind="power",
            name="t",
            exponent=1.0,
            submultiplicative=True,
            multiplicative=True,
        )

    @staticmethod
    def from_density_table(grid, density, name: str = "table") -> "OrliczFn":
        """Orlicz function from a tabulated density p on an ascending grid.

        Requires grid[0] = 0, p(0) = 0, p nondecreasing and positive beyond
        the first node. Evaluation integrates the piecewise-linear
        interpolant of p exactly; beyond the table the density continues
        with the slope of the last segment.
        """
        g = np.asarray(grid, dtype=np.float64)
        p = np.asarray(density, dtype=np.float64)
        if g.ndim != 1 or g.shape != p.shape or g.size < 2:
            raise ValueError("grid and density must be 1-d arrays of equal length >= 2")
        if g[0] != 0.0 or np.any(np.diff(g) <= 0):
            raise ValueError("grid must start at 0 and be strictly ascending")
        if p[0] != 0.0:
            raise ValueError("density must satisfy p(0) = 0")
        if np.any(np.diff(p) < 0) or np.any(p[1:] <= 0):
            raise ValueError("density must be nondecreasing and positive beyond 0")
        cum = np.concatenate(
            ([0.0], np.cumsum(0.5 * (p[1:] + p[:-1]) * np.diff(g)))
        )
        return OrliczFn(
            kind="table", name=name, grid=g, density=p, _cum=cum,
        )

    @staticmethod
    def from_density_csv(path) -> "OrliczFn":
        """Load a density table from a two-column CSV (t, p(t)), ascending t,
        no header."""
        ts, ps = [], []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row:
                    continue
                ts.append(float(row[0]))
                ps.append(float(row[1]))
        return OrliczFn.from_density_table(ts, ps, name=f"csv:{path}")

    @staticmethod
    def custom(
        fn: Callable[[np.ndarray], np.ndarray],
        name: str,
        submultiplicative: Optional[bool] = None,
        multiplicative: Optional[bool] = None,
    ) -> "OrliczFn":
        """Wrap an arbitrary evaluable map [0, inf) -> [0, inf). No density,
        so no complementary construction."""
        return OrliczFn(
            kind="custom",
            name=name,
            fn=fn,
            submultiplicative=submultiplicative,
            multiplicative=multiplicative,
        )

    # -- evaluation --------------------------------------------------------

    def __call__(self, t):
        arr = _as_nonneg(t, f"argument of {self.name}")
        if self.kind == "power":
            out = np.power(arr, self.exponent)
        elif self.kind == "power_scaled":
            out = np.power(arr, self.exponent) / self.exponent
        elif self.kind == "table":
            out = self._eval_table(arr)
        else:
            out = np.asarray(self.fn(arr), dtype=np.float64)
        if np.isscalar(t) or np.ndim(t) == 0:
            return float(out)
        return out

    def _eval_table(self, u: np.ndarray) -> np.ndarray:
        g, p, cum = self.grid, self.density, self._cum
        idx = np.clip(np.searchsorted(g, u, side="right") - 1, 0, g.size - 2)
        g0, g1 = g[idx], g[idx + 1]
        p0, p1 = p[idx], p[idx + 1]
        slope = (p1 - p0) / (g1 - g0)
        du = u - g0
        inside = cum[idx] + du * (p0 + 0.5 * slope * du)
        # beyond the table: continue with the last segment's slope
        last = g.size - 2
        du_out = u - g[-1]
        outside = cum[-1] + du_out * (p[-1] + 0.5 * ((p[-1] - p[last]) / (g[-1] - g[last])) * du_out)
        return np.where(u <= g[-1], inside, outside)

    @property
    def has_density(self) -> bool:
        return self.kind in ("power_scaled", "table")

    def density_at(self, s) -> np.ndarray:
        """Evaluate the density p at s (power_scaled and table forms only)."""
        arr = _as_nonneg(s, "density argument")
        if self.kind == "power_scaled":
            return np.power(arr, self.exponent - 1.0)
        if self.kind == "table":
            g, p = self.grid, self.density
            last_slope = (p[-1] - p[-2]) / (g[-1] - g[-2])
            return np.where(
                arr <= g[-1],
                np.interp(arr, g, p),
                p[-1] + last_slope * (arr - g[-1]),
            )
        raise NoDensityError(f"{self.name} has no density representation")

    def __repr__(self):
        return f"OrliczFn({self.name})"


# -- validation -------------------------------------------------------------


@dataclass
class OrliczValidation:
    """Outcome of the grid validation of an Orlicz-function candidate."""

    passed: bool
    failures: list  # (check name, u, v) triples; v is nan when unary
    grid_max: float
    grid_n: int

    @property
    def first_violation(self):
        return self.failures[0] if self.failures else None


def validate_orlicz(
    phi: OrliczFn,
    grid_max: float = VALIDATION_GRID_MAX,
    grid_n: int = VALIDATION_GRID_N,
) -> OrliczValidation:
    """Check the Orlicz-function axioms on a uniform grid over [0, grid_max].

    Verifies phi(0) = 0, monotonicity, midpoint convexity
    phi((u+v)/2) <= (phi(u)+phi(v))/2 + 1e-10*(1+phi(v)), and
    non-degeneracy phi(first grid step) > 0. Failures are collected, not
    raised.
    """
    if grid_n < 16:
        raise ValueError(f"grid_n must be >= 16, got {grid_n}")
    u = np.linspace(0.0, grid_max, grid_n)
    vals = np.asarray(phi(u), dtype=np.float64)
    failures = []

    if abs(vals[0]) > 1e-12:
        failures.append(("zero_at_origin", 0.0, np.nan))
    if vals[1] <= 0.0:
        failures.append(("non_degenerate", float(u[1]), np.nan))
    mono_bad = np.nonzero(np.diff(vals) < -1e-12 * (1.0 + np.abs(vals[:-1])))[0]
    if mono_bad.size:
        k = int(mono_bad[0])
        failures.append(("nondecreasing", float(u[k]), float(u[k + 1])))

    # midpoint convexity on all ordered pairs
    uu, vv = np.meshgrid(u, u, indexing="ij")
    mid = np.asarray(phi((uu + vv) / 2.0))
    bound = (vals[:, None] + vals[None, :]) / 2.0 + 1e-10 * (1.0 + vals[None, :])
    bad = np.nonzero(mid > bound)
    if bad[0].size:
        i, j = int(bad[0][0]), int(bad[1][0])
        failures.append(("midpoint_convex", float(u[i]), float(u[j])))

    return OrliczValidation(not failures, failures, grid_max, grid_n)


# -- submultiplicativity -----------------------------------------------------


@dataclass
class SubmultReport:
    """Grid verdict on phi(uv) <= phi(u) phi(v); witness set when it fails."""

    result: bool
    witness: Optional[tuple]


def is_submultiplicative(
    phi: OrliczFn,
    grid_max: float = VALIDATION_GRID_MAX,
    grid_n: int = VALIDATION_GRID_N,
) -> SubmultReport:
    """Grid check of phi(uv) <= phi(u) phi(v) + 1e-10 (1 + phi(u) phi(v)).

    Pure powers t^r short-circuit to yes (exact multiplicativity).
    """
    if grid_n < 16:
        raise ValueError(f"grid_n must be >= 16, got {grid_n}")
    if phi.kind == "power":
        return SubmultReport(True, None)
    u = np.linspace(0.0, grid_max, grid_n)
    vals = np.asarray(phi(u), dtype=np.float64)
    uu, vv = np.meshgrid(u, u, indexing="ij")
    lhs = np.asarray(phi(uu * vv))
    rhs = vals[:, None] * vals[None, :]
    bad = np.nonzero(lhs > rhs + 1e-10 * (1.0 + rhs))
    if bad[0].size:
        i, j = int(bad[0][0]), int(bad[1][0])
        return SubmultReport(False, (float(u[i]), float(u[j])))
    return SubmultReport(True, None)


# -- complementary construction ----------------------------------------------


@dataclass(frozen=True)
class ComplementaryPair:
    """Complementary Orlicz pair (phi, psi): x*y <= phi(x) + psi(y)."""

    phi: OrliczFn
    psi: OrliczFn
    construction: str  # "closed_form" | "numeric"

    def young_margin_grid(self, grid_max: float = 10.0, n: int = 50):
        """Worst Young slack phi(x)+psi(y)-x*y over an n-by-n grid; the pair
        invariant requires it above -1e-8*(1+x*y) everywhere."""
        x = np.linspace(0.0, grid_max, n)
        xx, yy = np.meshgrid(x, x, indexing="ij")
        margin = (
            np.asarray(self.phi(xx)) + np.asarray(self.psi(yy)) - xx * yy
            + 1e-8 * (1.0 + xx * yy)
        )
        k = np.unravel_index(np.argmin(margin), margin.shape)
        return float(margin[k]), (float(xx[k]), float(yy[k]))


def _invert_density(phi: OrliczFn, s: np.ndarray) -> np.ndarray:
    """Right inverse q(s) = sup{t : p(t) <= s} of a tabulated density.

    Monotone inversion with linear interpolation; past the table the last
    segment is extrapolated, which requires a strictly increasing tail.
    """
    g, p = phi.grid, phi.density
    out = np.empty_like(s)
    i = np.searchsorted(p, s, side="right")  # first index with p > s
    inside = i < p.size
    ii = np.clip(i[inside], 1, p.size - 1)
    p0, p1 = p[ii - 1], p[ii]
    t0, t1 = g[ii - 1], g[ii]
    out[inside] = t0 + (s[inside] - p0) / (p1 - p0) * (t1 - t0)
    if np.any(~inside):
        last_slope = (p[-1] - p[-2]) / (g[-1] - g[-2])
        if last_slope <= 0:
            raise NoDensityError(
                f"density table of {phi.name} tops out at {p[-1]:g} with a flat "
                f"tail; cannot invert up to {s.max():g}"
            )
        out[~inside] = g[-1] + (s[~inside] - p[-1]) / last_slope
    return out


def complementary(
    phi: OrliczFn,
    v_max: float = 10.0,
    integration_tol: float = 1e-9,
) -> ComplementaryPair:
    """Construct the complementary Orlicz function of phi.

    For t^p/p with p > 1 this is the closed form t^q/q with 1/p + 1/q = 1.
    For a density table, q is obtained by monotone inversion of p and psi by
    trapezoid integration on a uniform grid over [0, v_max], halved until
    successive estimates agree within integration_tol at every node. The
    linear function is rejected: its complementary degenerates.
    """
    if phi.kind == "power_scaled":
        p = phi.exponent
        q = p / (p - 1.0)
        pair = ComplementaryPair(phi, OrliczFn.power_scaled(q), "closed_form")
    elif phi.kind == "power" and phi.exponent == 1.0:
        raise NoDensityError(
            "the linear Orlicz function has a degenerate complementary "
            "(indicator-like); no pair is constructed"
        )
    elif phi.kind == "table":
        m = 257
        prev = None
        while True:
            s = np.linspace(0.0, v_max, m)
            q = _invert_density(phi, s)
            cum = np.concatenate(
                ([0.0], np.cumsum(0.5 * (q[1:] + q[:-1]) * np.diff(s)))
            )
            if prev is not None:
                err = float(np.max(np.abs(cum[::2] - prev)))
                if err <= integration_tol:
                    break
            if m > 1 << 21:
                break
            prev = cum
            m = 2 * m - 1
        psi = OrliczFn.from_density_table(s, q, name=f"compl({phi.name})")
        pair = ComplementaryPair(phi, psi, "numeric")
    else:
        raise NoDensityError(
            f"{phi.name} has no density representation; cannot build its "
            "complementary"
        )
    margin, at = pair.young_margin_grid()
    if margin < 0.0:
        raise ValueError(
            f"constructed pair violates Young's inequality by {-margin:.3e} "
            f"at (x, y) = {at}"
        )
    return pair


def young_check(pair: ComplementaryPair, x: float, y: float) -> bool:
    """Young's inequality x*y <= phi(x) + psi(y) + 1e-8*(1 + x*y)."""
    if x < 0 or y < 0:
        raise NegativeInputError("young_check requires x, y >= 0")
    return x * y <= pair.phi(x) + pair.psi(y) + 1e-8 * (1.0 + x * y)


# -- named registry ----------------------------------------------------------

_NAMED: dict = {}


def _register_named():
    _NAMED["t"] = OrliczFn.linear()
    _NAMED["t^2"] = OrliczFn.power(2)
    _NAMED["t^1.5"] = OrliczFn.power(1.5)
    _NAMED["t^3/3"] = OrliczFn.power_scaled(3)
    _NAMED["t^2/2"] = OrliczFn.power_scaled(2)
    # u^2 v + u v^2 >= 0 makes (u^2+u)(v^2+v) >= (uv)^2 + uv: submultiplicative
    _NAMED["t^2+t"] = OrliczFn.custom(
        lambda t: t * t + t, "t^2+t", submultiplicative=True, multiplicative=False
    )
    _NAMED["exp"] = OrliczFn.custom(
        np.expm1, "exp", submultiplicative=False, multiplicative=False
    )


_register_named()


def named_orlicz(spec: str) -> OrliczFn:
    """Resolve an Orlicz function from its CLI/config name.

    Accepts the fixed names (t, t^2, t^1.5, t^2+t, t^3/3, t^2/2, exp), the
    parametric forms ``power:R`` and ``power_scaled:P``, or a path to a
    density-table CSV.
    """
    if spec in _NAMED:
        return _NAMED[spec]
    if spec.startswith("power:"):
        return OrliczFn.power(float(spec.split(":", 1)[1]))
    if spec.startswith("power_scaled:"):
        return OrliczFn.power_scaled(float(spec.split(":", 1)[1]))
    if spec.endswith(".csv"):
        return OrliczFn.from_density_csv(spec)
    raise ValueError(f"unknown Orlicz function name: {spec!r}")


DEFAULT_PHI_SET = ("t", "t^2", "t^3/3", "t^1.5", "t^2+t")
