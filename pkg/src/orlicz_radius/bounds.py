"""Registry and evaluators for the upper-bound inequalities.

Every bound is identified by a stable string key and evaluated on an
:class:`Instance` (named matrices + weight + scalar parameters + Orlicz
function). Evaluation produces a :class:`BoundReport` with left side,
right side, slack = rhs - lhs, and the list of precondition checks.
Evaluation proceeds even when a precondition fails (the report flags it)
so hypothesis necessity can be probed.

The two-sided commutator/product bound ("dra") ships in two variants: the
"literal" reading applies the Orlicz function to v^2(x*w + z*y)/2 and is
falsified by a scalar instance; the "proof" reading applies it to
v^2((x*w + z*y)/2) and is the default. Reports always name the variant.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    MissingRoleError,
    NoDensityError,
)
from .linalg import (
    hermitian_part,
    matrix_func,
    operator_norm,
    psd_power,
)
from .orlicz import ComplementaryPair, OrliczFn, is_submultiplicative
from .radius import (
    AState,
    DEFAULT_RADIUS_TOL,
    Weight,
    a_adjoint,
    a_numerical_radius,
    a_seminorm,
    numerical_radius,
)

DEFAULT_TOL = 1e-8


class RadiusOpts(NamedTuple):
    """Sweep settings threaded through every evaluator."""

    tol: float = DEFAULT_RADIUS_TOL
    grid_points: Optional[int] = None


def _v(x, rt: "RadiusOpts") -> float:
    return numerical_radius(x, rt.tol, rt.grid_points)


def _va(x, w, rt: "RadiusOpts") -> float:
    return a_numerical_radius(x, w, rt.tol, rt.grid_points)


# ---------------------------------------------------------------------------
# instance and report types
# ---------------------------------------------------------------------------


@dataclass
class Instance:
    """One concrete input for a bound evaluation.

    matrices maps role names (x, y, z, w, p, q, r, s, x1..xk) to square
    complex arrays sharing the weight's dimension. Scalar parameters are
    carried whether or not the bound uses them; evaluators read only what
    they need and echo it into the report.
    """

    matrices: dict
    weight: Weight
    alpha: float = 0.5
    r_exp: float = 1.0
    s_exp: float = 1.0
    n_param: int = 2
    probs: Optional[np.ndarray] = None
    phi: Optional[OrliczFn] = None
    pair: Optional[ComplementaryPair] = None
    pair2: Optional[ComplementaryPair] = None

    def role(self, name: str, bound_id: str) -> np.ndarray:
        try:
            m = self.matrices[name]
        except KeyError:
            raise MissingRoleError(f"bound {bound_id!r} requires role {name!r}")
        m = np.asarray(m, dtype=np.complex128)
        if m.shape != self.weight.a.shape:
            raise DimensionMismatchError(
                f"role {name!r} has shape {m.shape}, weight has {self.weight.a.shape}"
            )
        return m

    def orlicz(self, bound_id: str) -> OrliczFn:
        if self.phi is None:
            raise MissingRoleError(f"bound {bound_id!r} requires an Orlicz function")
        return self.phi


@dataclass
class BoundReport:
    """One evaluated inequality instance."""

    bound_id: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    preconditions: list
    params: dict
    variant: Optional[str] = None
    tol: float = DEFAULT_TOL

    @property
    def preconditions_met(self) -> bool:
        return all(ok for _, ok in self.preconditions)

    def to_json_dict(self) -> dict:
        return {
            "bound_id": self.bound_id,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "holds": self.holds,
            "preconditions": [[name, bool(ok)] for name, ok in self.preconditions],
            "params": self.params,
            "variant": self.variant,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def _report(bound_id, lhs, rhs, pre, params, tol, variant=None) -> BoundReport:
    lhs, rhs = float(lhs), float(rhs)
    slack = rhs - lhs
    scale = max(1.0, abs(lhs), abs(rhs) if math.isfinite(rhs) else 1.0)
    holds = slack >= -tol * scale
    return BoundReport(bound_id, lhs, rhs, slack, holds, pre, params, variant, tol)


# ---------------------------------------------------------------------------
# registry plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundDef:
    """Registry metadata: roles, parameter needs, and the evaluator."""

    fn: Callable
    roles: tuple
    weight_policy: str  # "identity" | "any_pd" | "geq_one"
    needs_phi: bool = False
    needs_probs: bool = False
    params: tuple = ()
    phi_class: str = "any"  # "any" | "power" | "submultiplicative"
    role_constraints: dict = field(default_factory=dict)
    has_variant: bool = False


BOUND_REGISTRY: dict = {}


def _bound(bound_id, **meta):
    def wrap(fn):
        BOUND_REGISTRY[bound_id] = BoundDef(fn=fn, **meta)
        return fn

    return wrap


def registry_ids() -> list:
    """Stable public identifiers of all registered bounds."""
    return list(BOUND_REGISTRY)


def evaluate_bound(
    bound_id: str,
    inst: Instance,
    tol: float = DEFAULT_TOL,
    radius_tol: float = DEFAULT_RADIUS_TOL,
    grid_points: Optional[int] = None,
    variant: str = "proof",
) -> BoundReport:
    """Evaluate one registry bound on an instance.

    tol enters only the holds decision (slack >= -tol * scale with
    scale = max(1, |lhs|, |rhs|)); radius_tol is passed to the numerical
    radius sweeps (grid_points=None keeps the default sweep grid).
    variant selects the lhs reading for the dra family and is ignored
    elsewhere.
    """
    try:
        bdef = BOUND_REGISTRY[bound_id]
    except KeyError:
        raise KeyError(f"unknown bound id {bound_id!r}; see registry_ids()")
    rt = RadiusOpts(radius_tol, grid_points)
    if bdef.has_variant:
        if variant not in ("proof", "literal"):
            raise ValueError(f"variant must be 'proof' or 'literal', got {variant!r}")
        return bdef.fn(inst, rt, tol, variant)
    return bdef.fn(inst, rt, tol)


# ---------------------------------------------------------------------------
# shared sub-expressions
# ---------------------------------------------------------------------------


def _alpha_pre(alpha):
    return ("0 <= alpha <= 1", 0.0 <= alpha <= 1.0)


def _exp_pre(name, value, low):
    return (f"{name} >= {low:g}", value >= low)


def _phi_func(phi):
    # scalar map for the matrix functional calculus
    return lambda t: phi(t)


def _gram(m):
    """m* m, hermitianized against roundoff."""
    return hermitian_part(m.conj().T @ m)


def _cogram(m):
    """m m*, hermitianized against roundoff."""
    return hermitian_part(m @ m.conj().T)


def _self_commutant(x, w):
    """x x# + x# x for the weighted adjoint; Hermitian in the a-sense."""
    adj = a_adjoint(x, w)
    return x @ adj + adj @ x, adj


def _psd_precondition(name, m, tol=1e-10):
    h = hermitian_part(m)
    scale = np.linalg.norm(h, 2)
    dev = np.linalg.norm(m - m.conj().T, 2)
    if scale == 0.0:
        return (f"{name} is PSD", True)
    lo = float(np.linalg.eigvalsh(h)[0])
    return (f"{name} is PSD", dev <= tol * scale and lo >= -tol * scale)


def _invertible_pre(name, m):
    s = np.linalg.svd(m, compute_uv=False)
    ok = s[0] > 0 and s[-1] > 1e-12 * s[0]
    return (f"{name} is invertible", bool(ok))


def _phi_submult_pre(phi):
    flag = phi.submultiplicative
    if flag is None:
        flag = is_submultiplicative(phi).result
    return ("phi is submultiplicative", bool(flag))


def _phi_mult_pre(phi):
    return ("phi is multiplicative (power form)", phi.multiplicative is True)


# ---------------------------------------------------------------------------
# the registry
# ---------------------------------------------------------------------------


@_bound("norm_lower", roles=("x",), weight_policy="identity")
def _ev_norm_lower(inst, rt, tol):
    x = inst.role("x", "norm_lower")
    lhs = 0.5 * operator_norm(x)
    rhs = _v(x, rt)
    return _report("norm_lower", lhs, rhs, [], {}, tol)


@_bound("norm_upper", roles=("x",), weight_policy="identity")
def _ev_norm_upper(inst, rt, tol):
    x = inst.role("x", "norm_upper")
    lhs = _v(x, rt)
    rhs = operator_norm(x)
    return _report("norm_upper", lhs, rhs, [], {}, tol)


@_bound("a_norm_bounds", roles=("x",), weight_policy="any_pd")
def _ev_a_norm_bounds(inst, rt, tol):
    """Both sides of (1/2)||x||_a <= v_a(x) <= ||x||_a; the report carries
    the binding part, with both slacks echoed in params."""
    x = inst.role("x", "a_norm_bounds")
    w = inst.weight
    na = a_seminorm(x, w)
    va = _va(x, w, rt)
    slack_lower = va - 0.5 * na
    slack_upper = na - va
    if slack_lower <= slack_upper:
        lhs, rhs = 0.5 * na, va
    else:
        lhs, rhs = va, na
    params = {"v_a": va, "seminorm_a": na,
              "slack_lower": slack_lower, "slack_upper": slack_upper}
    return _report("a_norm_bounds", lhs, rhs, [], params, tol)


@_bound("mz3", roles=("x",), weight_policy="any_pd")
def _ev_mz3(inst, rt, tol):
    x = inst.role("x", "mz3")
    w = inst.weight
    s, _ = _self_commutant(x, w)
    lhs = _va(x, w, rt) ** 2
    rhs = 0.5 * a_seminorm(s, w)
    return _report("mz3", lhs, rhs, [], {}, tol)


@_bound("mz4", roles=("x",), weight_policy="any_pd")
def _ev_mz4(inst, rt, tol):
    x = inst.role("x", "mz4")
    w = inst.weight
    s, _ = _self_commutant(x, w)
    lhs = _va(x, w, rt) ** 2
    rhs = 0.5 * _va(x @ x, w, rt) + 0.25 * a_seminorm(s, w)
    return _report("mz4", lhs, rhs, [], {}, tol)


@_bound("th1a", roles=("x",), weight_policy="any_pd", params=("alpha",))
def _ev_th1a(inst, rt, tol):
    x = inst.role("x", "th1a")
    w = inst.weight
    al = inst.alpha
    adj = a_adjoint(x, w)
    lhs = _va(x, w, rt) ** 2
    rhs = a_seminorm(al * (adj @ x) + (1.0 - al) * (x @ adj), w)
    return _report("th1a", lhs, rhs, [_alpha_pre(al)], {"alpha": al}, tol)


@_bound("th1b", roles=("x",), weight_policy="identity", needs_phi=True,
        params=("alpha",))
def _ev_th1b(inst, rt, tol):
    x = inst.role("x", "th1b")
    phi = inst.orlicz("th1b")
    al = inst.alpha
    f = _phi_func(phi)
    lhs = phi(_v(x, rt) ** 2)
    rhs = operator_norm(
        al * matrix_func(_gram(x), f) + (1.0 - al) * matrix_func(_cogram(x), f)
    )
    return _report("th1b", lhs, rhs, [_alpha_pre(al)],
                   {"alpha": al, "phi": phi.name}, tol)


@_bound("re01", roles=("x",), weight_policy="identity", params=("alpha", "r"))
def _ev_re01(inst, rt, tol):
    x = inst.role("x", "re01")
    al, r = inst.alpha, inst.r_exp
    lhs = _v(x, rt) ** (2.0 * r)
    rhs = operator_norm(
        al * psd_power(_gram(x), r) + (1.0 - al) * psd_power(_cogram(x), r)
    )
    pre = [_alpha_pre(al), _exp_pre("r", r, 1.0)]
    return _report("re01", lhs, rhs, pre, {"alpha": al, "r": r}, tol)


@_bound("ramm", roles=("x",), weight_policy="geq_one", needs_phi=True)
def _ev_ramm(inst, rt, tol):
    x = inst.role("x", "ramm")
    w = inst.weight
    phi = inst.orlicz("ramm")
    s, _ = _self_commutant(x, w)
    lhs = phi(_va(x, w, rt) ** 2)
    rhs = 0.5 * phi(_va(x @ x, w, rt)) + 0.5 * phi(
        a_seminorm(s, w) / 2.0
    )
    return _report("ramm", lhs, rhs, [], {"phi": phi.name}, tol)


@_bound("re02", roles=("x",), weight_policy="geq_one", params=("r",))
def _ev_re02(inst, rt, tol):
    x = inst.role("x", "re02")
    w = inst.weight
    r = inst.r_exp
    s, _ = _self_commutant(x, w)
    lhs = _va(x, w, rt) ** (2.0 * r)
    rhs = 0.5 * _va(x @ x, w, rt) ** r + 2.0 ** (-(r + 1.0)) * (
        a_seminorm(s, w) ** r
    )
    return _report("re02", lhs, rhs, [_exp_pre("r", r, 1.0)], {"r": r}, tol)


def _th2a(bound_id, inst, rt, tol, swap):
    x = inst.role("x", bound_id)
    w = inst.weight
    al = inst.alpha
    adj = a_adjoint(x, w)
    first, second = (adj @ x, x @ adj) if swap else (x @ adj, adj @ x)
    lhs = _va(x, w, rt) ** 2
    rhs = (al / 2.0) * _va(x @ x, w, rt) + a_seminorm(
        (al / 4.0) * first + (1.0 - 0.75 * al) * second, w
    )
    return _report(bound_id, lhs, rhs, [_alpha_pre(al)], {"alpha": al}, tol)


@_bound("th2a_i", roles=("x",), weight_policy="any_pd", params=("alpha",))
def _ev_th2a_i(inst, rt, tol):
    return _th2a("th2a_i", inst, rt, tol, swap=False)


@_bound("th2a_ii", roles=("x",), weight_policy="any_pd", params=("alpha",))
def _ev_th2a_ii(inst, rt, tol):
    return _th2a("th2a_ii", inst, rt, tol, swap=True)


def _th2b(bound_id, inst, rt, tol, swap):
    x = inst.role("x", bound_id)
    phi = inst.orlicz(bound_id)
    al = inst.alpha
    f = _phi_func(phi)
    first, second = (_gram(x), _cogram(x)) if swap else (_cogram(x), _gram(x))
    lhs = phi(_v(x, rt) ** 2)
    rhs = (al / 2.0) * phi(_v(x @ x, rt)) + operator_norm(
        (al / 4.0) * matrix_func(first, f)
        + (1.0 - 0.75 * al) * matrix_func(second, f)
    )
    return _report(bound_id, lhs, rhs, [_alpha_pre(al)],
                   {"alpha": al, "phi": phi.name}, tol)


@_bound("th2b_i", roles=("x",), weight_policy="identity", needs_phi=True,
        params=("alpha",))
def _ev_th2b_i(inst, rt, tol):
    return _th2b("th2b_i", inst, rt, tol, swap=False)


@_bound("th2b_ii", roles=("x",), weight_policy="identity", needs_phi=True,
        params=("alpha",))
def _ev_th2b_ii(inst, rt, tol):
    return _th2b("th2b_ii", inst, rt, tol, swap=True)


def _ccc(bound_id, inst, rt, tol, swap):
    x = inst.role("x", bound_id)
    al, r = inst.alpha, inst.r_exp
    first, second = (_gram(x), _cogram(x)) if swap else (_cogram(x), _gram(x))
    lhs = _v(x, rt) ** (2.0 * r)
    rhs = (al / 2.0) * _v(x @ x, rt) ** r + operator_norm(
        (al / 4.0) * psd_power(first, r) + (1.0 - 0.75 * al) * psd_power(second, r)
    )
    pre = [_alpha_pre(al), _exp_pre("r", r, 1.0)]
    return _report(bound_id, lhs, rhs, pre, {"alpha": al, "r": r}, tol)


@_bound("ccc_i", roles=("x",), weight_policy="identity", params=("alpha", "r"))
def _ev_ccc_i(inst, rt, tol):
    return _ccc("ccc_i", inst, rt, tol, swap=False)


@_bound("ccc_ii", roles=("x",), weight_policy="identity", params=("alpha", "r"))
def _ev_ccc_ii(inst, rt, tol):
    return _ccc("ccc_ii", inst, rt, tol, swap=True)


@_bound("hhnn", roles=("x", "y"), weight_policy="any_pd")
def _ev_hhnn(inst, rt, tol):
    x = inst.role("x", "hhnn")
    y = inst.role("y", "hhnn")
    w = inst.weight
    adj_x = a_adjoint(x, w)
    adj_y = a_adjoint(y, w)
    lhs = _va(x + y, w, rt) ** 2
    rhs = (
        _va(x, w, rt) ** 2
        + _va(y, w, rt) ** 2
        + _va(y @ x, w, rt)
        + 0.5 * a_seminorm(adj_x @ x + y @ adj_y, w)
    )
    return _report("hhnn", lhs, rhs, [], {}, tol)


@_bound("sum2", roles=("x", "y"), weight_policy="any_pd", params=("n",))
def _ev_sum2(inst, rt, tol):
    """Sum bound with the Young pair (t^n/n, (n-1)/n t^(n/(n-1))).

    n = 1 degenerates the conjugate exponent; the limit n -> 1+ of the
    conjugate term is 0 when ||y||_a <= 1 and +inf otherwise, and the
    evaluation uses that limit (flagging the precondition when it is
    infinite)."""
    x = inst.role("x", "sum2")
    y = inst.role("y", "sum2")
    w = inst.weight
    n = inst.n_param
    nx = a_seminorm(x, w)
    ny = a_seminorm(y, w)
    pre = [_exp_pre("n", n, 1)]
    if n == 1:
        ok = ny <= 1.0 + 1e-12
        pre.append(("n=1 requires ||y||_a <= 1", ok))
        conj_term = 0.0 if ok else math.inf
    else:
        conj_term = (n - 1.0) / n * ny ** (n / (n - 1.0))
    lhs = _va(x + y, w, rt) ** 2
    rhs = (
        _va(x, w, rt) ** 2
        + _va(y, w, rt) ** 2
        + _va(y @ x, w, rt)
        + nx**n / n
        + conj_term
    )
    return _report("sum2", lhs, rhs, pre, {"n": n}, tol)


@_bound("sumpi", roles=("x*",), weight_policy="any_pd", needs_phi=True,
        needs_probs=True)
def _ev_sumpi(inst, rt, tol):
    """Probability-weighted sum bound over roles x1..xk (k = len(probs))."""
    if inst.probs is None:
        raise MissingRoleError("bound 'sumpi' requires a probability vector")
    probs = np.asarray(inst.probs, dtype=np.float64)
    phi = inst.orlicz("sumpi")
    w = inst.weight
    k = probs.size
    xs = [inst.role(f"x{i + 1}", "sumpi") for i in range(k)]
    pre = [
        ("probs sum to 1", bool(abs(probs.sum() - 1.0) <= 1e-12)),
        ("probs nonnegative", bool(np.all(probs >= 0.0))),
    ]
    sum_x = sum(p * x for p, x in zip(probs, xs))
    sum_sq = sum(p * (x @ x) for p, x in zip(probs, xs))
    sum_adj_x = np.zeros_like(sum_x)
    sum_x_adj = np.zeros_like(sum_x)
    for p, x in zip(probs, xs):
        adj = a_adjoint(x, w)
        sum_adj_x = sum_adj_x + p * (adj @ x)
        sum_x_adj = sum_x_adj + p * (x @ adj)
    lhs = phi(_va(sum_x, w, rt) ** 2)
    cross = math.sqrt(a_seminorm(sum_adj_x, w)) * math.sqrt(a_seminorm(sum_x_adj, w))
    rhs = 0.5 * phi(_va(sum_sq, w, rt)) + 0.5 * phi(cross)
    return _report("sumpi", lhs, rhs, pre,
                   {"phi": phi.name, "probs": probs.tolist()}, tol)


@_bound("piet_a", roles=("x", "y", "z"), weight_policy="any_pd",
        role_constraints={"y": "a_contraction"})
def _ev_piet_a(inst, rt, tol):
    x = inst.role("x", "piet_a")
    y = inst.role("y", "piet_a")
    z = inst.role("z", "piet_a")
    w = inst.weight
    ny = a_seminorm(y, w)
    adj_x = a_adjoint(x, w)
    adj_z = a_adjoint(z, w)
    lhs = _va(x @ y @ adj_z, w, rt)
    rhs = (ny / 2.0) * a_seminorm(x @ adj_x + z @ adj_z, w)
    pre = [("||y||_a <= 1", ny <= 1.0 + 1e-12)]
    return _report("piet_a", lhs, rhs, pre, {"seminorm_y": ny}, tol)


@_bound("piet_b", roles=("x", "y", "z"), weight_policy="identity",
        needs_phi=True, role_constraints={"y": "contraction"})
def _ev_piet_b(inst, rt, tol):
    x = inst.role("x", "piet_b")
    y = inst.role("y", "piet_b")
    z = inst.role("z", "piet_b")
    phi = inst.orlicz("piet_b")
    f = _phi_func(phi)
    ny = operator_norm(y)
    lhs = phi(_v(x @ y @ z.conj().T, rt))
    rhs = (ny / 2.0) * operator_norm(
        matrix_func(_cogram(x), f) + matrix_func(_cogram(z), f)
    )
    pre = [("||y|| <= 1", ny <= 1.0 + 1e-12)]
    return _report("piet_b", lhs, rhs, pre, {"norm_y": ny, "phi": phi.name}, tol)


@_bound("ram", roles=("x", "y", "z"), weight_policy="identity",
        params=("r",), role_constraints={"y": "contraction"})
def _ev_ram(inst, rt, tol):
    x = inst.role("x", "ram")
    y = inst.role("y", "ram")
    z = inst.role("z", "ram")
    r = inst.r_exp
    ny = operator_norm(y)
    lhs = _v(x @ y @ z.conj().T, rt) ** r
    rhs = (ny / 2.0) * operator_norm(
        psd_power(_cogram(x), r) + psd_power(_cogram(z), r)
    )
    pre = [_exp_pre("r", r, 1.0), ("||y|| <= 1", ny <= 1.0 + 1e-12)]
    return _report("ram", lhs, rhs, pre, {"r": r, "norm_y": ny}, tol)


@_bound("ra", roles=("x", "y", "z"), weight_policy="identity", needs_phi=True,
        params=("alpha", "r"), phi_class="submultiplicative",
        role_constraints={"x": "psd", "z": "psd"})
def _ev_ra(inst, rt, tol):
    x = inst.role("x", "ra")
    y = inst.role("y", "ra")
    z = inst.role("z", "ra")
    phi = inst.orlicz("ra")
    al, r = inst.alpha, inst.r_exp
    f = _phi_func(phi)
    hx, hz = hermitian_part(x), hermitian_part(z)
    lhs = phi(
        _v(psd_power(hx, al) @ y @ psd_power(hz, 1.0 - al), rt) ** r
    )
    rhs = phi(operator_norm(y) ** r) * operator_norm(
        al * matrix_func(psd_power(hx, r), f)
        + (1.0 - al) * matrix_func(psd_power(hz, r), f)
    )
    pre = [
        _psd_precondition("x", x),
        _psd_precondition("z", z),
        _alpha_pre(al),
        _exp_pre("r", r, 2.0),
        _phi_submult_pre(phi),
    ]
    return _report("ra", lhs, rhs, pre, {"alpha": al, "r": r, "phi": phi.name}, tol)


def _dra_rhs(phi, r, s, first_pair, second_pair):
    f = _phi_func(phi)
    m1 = 0.5 * (
        psd_power(matrix_func(first_pair[0], f), r)
        + psd_power(matrix_func(first_pair[1], f), r)
    )
    m2 = 0.5 * (
        psd_power(matrix_func(second_pair[0], f), s)
        + psd_power(matrix_func(second_pair[1], f), s)
    )
    return operator_norm(m1) ** (1.0 / r) * operator_norm(m2) ** (1.0 / s)


@_bound("dra", roles=("w", "x", "y", "z"), weight_policy="identity",
        needs_phi=True, params=("r", "s"), phi_class="power", has_variant=True)
def _ev_dra(inst, rt, tol, variant):
    wm = inst.role("w", "dra")
    x = inst.role("x", "dra")
    y = inst.role("y", "dra")
    z = inst.role("z", "dra")
    phi = inst.orlicz("dra")
    r, s = inst.r_exp, inst.s_exp
    c = x.conj().T @ wm + z.conj().T @ y
    if variant == "proof":
        lhs = phi(_v(c / 2.0, rt) ** 2)
    else:
        lhs = phi(_v(c, rt) ** 2 / 2.0)
    rhs = _dra_rhs(phi, r, s, (_gram(wm), _gram(y)), (_gram(x), _gram(z)))
    pre = [_phi_mult_pre(phi), _exp_pre("r", r, 1.0), _exp_pre("s", s, 1.0)]
    return _report("dra", lhs, rhs, pre,
                   {"r": r, "s": s, "phi": phi.name}, tol, variant=variant)


@_bound("dra_comm", roles=("p", "q"), weight_policy="identity",
        needs_phi=True, params=("r", "s"), phi_class="power", has_variant=True)
def _ev_dra_comm(inst, rt, tol, variant):
    """Commutator specialization of dra via w=q, x=p*, y=-p, z=q*."""
    p = inst.role("p", "dra_comm")
    q = inst.role("q", "dra_comm")
    phi = inst.orlicz("dra_comm")
    r, s = inst.r_exp, inst.s_exp
    c = p @ q - q @ p
    if variant == "proof":
        lhs = phi(_v(c / 2.0, rt) ** 2)
    else:
        lhs = phi(_v(c, rt) ** 2 / 2.0)
    rhs = _dra_rhs(phi, r, s, (_gram(q), _gram(p)), (_cogram(q), _cogram(p)))
    pre = [_phi_mult_pre(phi), _exp_pre("r", r, 1.0), _exp_pre("s", s, 1.0)]
    return _report("dra_comm", lhs, rhs, pre,
                   {"r": r, "s": s, "phi": phi.name}, tol, variant=variant)


@_bound("kit28", roles=("p", "x", "q", "r", "y", "s"), weight_policy="identity",
        params=("alpha", "n"),
        role_constraints={"x": "invertible", "y": "invertible"})
def _ev_kit28(inst, rt, tol):
    p = inst.role("p", "kit28")
    x = inst.role("x", "kit28")
    q = inst.role("q", "kit28")
    rm = inst.role("r", "kit28")
    y = inst.role("y", "kit28")
    sm = inst.role("s", "kit28")
    al, n = inst.alpha, inst.n_param
    # |x*|^(2(1-alpha)) = (x x*)^(1-alpha), |x|^(2 alpha) = (x* x)^alpha
    px = hermitian_part(p @ psd_power(_cogram(x), 1.0 - al) @ p.conj().T)
    ry = hermitian_part(rm @ psd_power(_cogram(y), 1.0 - al) @ rm.conj().T)
    qx = hermitian_part(q.conj().T @ psd_power(_gram(x), al) @ q)
    sy = hermitian_part(sm.conj().T @ psd_power(_gram(y), al) @ sm)
    lhs = _v(p @ x @ q + rm @ y @ sm, rt)
    expo = n / (2.0 * (n - 1.0))
    rhs = (1.0 / n) * operator_norm(
        psd_power(px, n / 2.0) + psd_power(ry, n / 2.0)
    ) + ((n - 1.0) / n) * (
        operator_norm(qx) ** expo + operator_norm(sy) ** expo
    )
    pre = [
        _invertible_pre("x", x),
        _invertible_pre("y", y),
        _alpha_pre(al),
        _exp_pre("n", n, 2),
    ]
    return _report("kit28", lhs, rhs, pre, {"alpha": al, "n": n}, tol)


# ---------------------------------------------------------------------------
# state-level lemma checks
# ---------------------------------------------------------------------------


LEMMA_IDS = (
    "gcauchy", "cauchy", "pp01", "pje", "lj", "m02", "lsplemma02",
    "cbuzano", "lal", "lemma1", "lemma2_a", "lemma2_b", "L01", "pie",
    "l426", "tla",
)


def _identity_pre(w: Weight):
    return ("weight is identity", bool(w.is_identity))


def _geq_one_pre(w: Weight):
    return ("a >= 1", bool(w.geq_one))


def _prob_roles(inst: Instance, prefix: str, k: int, lemma_id: str):
    return [inst.role(f"{prefix}{i + 1}", lemma_id) for i in range(k)]


def _need_pair(pair, lemma_id, which="pair"):
    if pair is None:
        raise NoDensityError(f"lemma {lemma_id!r} requires a complementary {which}")
    return pair


def lemma_check(
    lemma_id: str,
    inst: Instance,
    f: AState,
    tol: float = DEFAULT_TOL,
) -> BoundReport:
    """Evaluate both sides of a state-level lemma at the given state.

    The state's weight must be the instance's weight. Hypotheses that the
    instance cannot guarantee (a >= 1, PSD spectra, unit norms, identity
    weight for the unweighted lemmas) are recorded as preconditions.
    """
    if lemma_id not in LEMMA_IDS:
        raise KeyError(f"unknown lemma id {lemma_id!r}; see LEMMA_IDS")
    if f.weight is not inst.weight and not np.array_equal(f.weight.a, inst.weight.a):
        raise DimensionMismatchError("state was built for a different weight")
    w = inst.weight
    a = w.a
    fr = f.apply_real

    if lemma_id == "gcauchy":
        x = inst.role("x", lemma_id)
        y = inst.role("y", lemma_id)
        lhs = abs(f.apply(x.conj().T @ y)) ** 2
        rhs = fr(_gram(x)) * fr(_gram(y))
        pre = []
    elif lemma_id == "cauchy":
        x = inst.role("x", lemma_id)
        y = inst.role("y", lemma_id)
        lhs = abs(f.apply(x.conj().T @ a @ y)) ** 2
        rhs = fr(hermitian_part(x.conj().T @ a @ x)) * fr(
            hermitian_part(y.conj().T @ a @ y)
        )
        pre = []
    elif lemma_id == "pp01":
        x = inst.role("x", lemma_id)
        phi = inst.orlicz(lemma_id)
        lhs = phi(max(fr(x), 0.0))
        rhs = fr(matrix_func(x, _phi_func(phi)))
        pre = [_identity_pre(w), _psd_precondition("x", x)]
    elif lemma_id == "pje":
        x = inst.role("x", lemma_id)
        r = inst.r_exp
        lhs = fr(psd_power(x, r))
        rhs = max(fr(x), 0.0) ** r
        pre = [_identity_pre(w), _psd_precondition("x", x),
               ("0 < r <= 1", 0.0 < r <= 1.0)]
    elif lemma_id == "lj":
        x = inst.role("x", lemma_id)
        phi = inst.orlicz(lemma_id)
        ax = hermitian_part(a @ x)
        lhs = phi(max(fr(ax), 0.0))
        rhs = fr(matrix_func(ax, _phi_func(phi)))
        pre = [_geq_one_pre(w), _psd_precondition("ax", a @ x)]
    elif lemma_id == "m02":
        x = inst.role("x", lemma_id)
        r = inst.r_exp
        ax = hermitian_part(a @ x)
        lhs = max(fr(ax), 0.0) ** r
        rhs = fr(psd_power(ax, r))
        pre = [_geq_one_pre(w), _psd_precondition("ax", a @ x),
               _exp_pre("r", r, 1.0)]
    elif lemma_id == "lsplemma02":
        x = inst.role("x", lemma_id)
        y = inst.role("y", lemma_id)
        lhs = fr(hermitian_part(y.conj().T @ x.conj().T @ a @ x @ y))
        rhs = a_seminorm(x, w) ** 2 * fr(hermitian_part(y.conj().T @ a @ y))
        pre = []
    elif lemma_id == "cbuzano":
        probs = np.asarray(inst.probs, dtype=np.float64)
        k = probs.size
        xs = _prob_roles(inst, "x", k, lemma_id)
        ys = _prob_roles(inst, "y", k, lemma_id)
        sx = sum(p * f.apply(a @ x) for p, x in zip(probs, xs))
        sy = sum(p * f.apply(y.conj().T @ a) for p, y in zip(probs, ys))
        syx = sum(p * f.apply(y.conj().T @ a @ x) for p, x, y in zip(probs, xs, ys))
        sxx = sum(p * fr(hermitian_part(x.conj().T @ a @ x)) for p, x in zip(probs, xs))
        syy = sum(p * fr(hermitian_part(y.conj().T @ a @ y)) for p, y in zip(probs, ys))
        lhs = abs(sx) * abs(sy)
        rhs = 0.5 * (abs(syx) + math.sqrt(max(sxx, 0.0)) * math.sqrt(max(syy, 0.0)))
        pre = [("probs sum to 1", bool(abs(probs.sum() - 1.0) <= 1e-12))]
    elif lemma_id == "lal":
        probs = np.asarray(inst.probs, dtype=np.float64)
        k = probs.size
        xs = _prob_roles(inst, "x", k, lemma_id)
        ys = _prob_roles(inst, "y", k, lemma_id)
        sx = sum(p * f.apply(a @ x) for p, x in zip(probs, xs))
        sy = sum(p * f.apply(a @ y) for p, y in zip(probs, ys))
        sxx = sum(
            p * fr(hermitian_part(a @ a_adjoint(x, w) @ x)) for p, x in zip(probs, xs)
        )
        syy = sum(
            p * fr(hermitian_part(a @ y @ a_adjoint(y, w))) for p, y in zip(probs, ys)
        )
        syx = sum(p * f.apply(a @ y @ x) for p, x, y in zip(probs, xs, ys))
        lhs = abs(sx) * abs(sy)
        rhs = 0.5 * math.sqrt(max(sxx, 0.0)) * math.sqrt(max(syy, 0.0)) + 0.5 * abs(syx)
        pre = [("probs sum to 1", bool(abs(probs.sum() - 1.0) <= 1e-12))]
    elif lemma_id == "lemma1":
        x = inst.role("x", lemma_id)
        phi = inst.orlicz(lemma_id)
        al = inst.alpha
        adj = a_adjoint(x, w)
        pf = _phi_func(phi)
        lhs = phi(abs(f.apply(a @ x)) ** 2)
        rhs = al * fr(matrix_func(hermitian_part(a @ adj @ x), pf)) + (
            1.0 - al
        ) * fr(matrix_func(hermitian_part(a @ x @ adj), pf))
        pre = [_geq_one_pre(w), _alpha_pre(al)]
    elif lemma_id in ("lemma2_a", "lemma2_b"):
        x = inst.role("x", lemma_id)
        phi = inst.orlicz(lemma_id)
        al = inst.alpha
        adj = a_adjoint(x, w)
        pf = _phi_func(phi)
        t_xadj = fr(matrix_func(hermitian_part(a @ x @ adj), pf))
        t_adjx = fr(matrix_func(hermitian_part(a @ adj @ x), pf))
        if lemma_id == "lemma2_a":
            quarter, rest = t_xadj, t_adjx
        else:
            quarter, rest = t_adjx, t_xadj
        lhs = phi(abs(f.apply(a @ x)) ** 2)
        rhs = (
            (al / 2.0) * phi(abs(f.apply(a @ x @ x)))
            + (al / 4.0) * quarter
            + (1.0 - 0.75 * al) * rest
        )
        pre = [_geq_one_pre(w), _alpha_pre(al)]
    elif lemma_id == "L01":
        x = inst.role("x", lemma_id)
        y = inst.role("y", lemma_id)
        pair = _need_pair(inst.pair, lemma_id)
        psi1, psi2 = pair.phi, pair.psi
        adj_x = a_adjoint(x, w)
        adj_y = a_adjoint(y, w)
        lhs = abs(f.apply(a @ (x + y))) ** 2
        rhs = (
            abs(f.apply(a @ x)) ** 2
            + abs(f.apply(a @ y)) ** 2
            + abs(f.apply(a @ y @ x))
            + psi1(math.sqrt(max(fr(hermitian_part(a @ adj_x @ x)), 0.0)))
            + psi2(math.sqrt(max(fr(hermitian_part(a @ y @ adj_y)), 0.0)))
        )
        pre = []
    elif lemma_id == "pie":
        x = inst.role("x", lemma_id)
        y = inst.role("y", lemma_id)
        z = inst.role("z", lemma_id)
        phi = inst.orlicz(lemma_id)
        pf = _phi_func(phi)
        ny = a_seminorm(y, w)
        adj_x = a_adjoint(x, w)
        adj_z = a_adjoint(z, w)
        lhs = phi(abs(f.apply(a @ x @ y @ adj_z)))
        rhs = (ny / 2.0) * (
            fr(matrix_func(hermitian_part(a @ x @ adj_x), pf))
            + fr(matrix_func(hermitian_part(a @ z @ adj_z), pf))
        )
        pre = [_geq_one_pre(w), ("||y||_a <= 1", ny <= 1.0 + 1e-12)]
    elif lemma_id == "l426":
        x = inst.role("x", lemma_id)
        y = inst.role("y", lemma_id)
        z = inst.role("z", lemma_id)
        al = inst.alpha
        lhs = abs(f.apply(x @ y @ z)) ** 2
        rhs = fr(
            hermitian_part(x @ psd_power(_cogram(y), 1.0 - al) @ x.conj().T)
        ) * fr(hermitian_part(z.conj().T @ psd_power(_gram(y), al) @ z))
        pre = [_identity_pre(w), _invertible_pre("y", y), _alpha_pre(al)]
    elif lemma_id == "tla":
        p = inst.role("p", lemma_id)
        x = inst.role("x", lemma_id)
        q = inst.role("q", lemma_id)
        rm = inst.role("r", lemma_id)
        y = inst.role("y", lemma_id)
        sm = inst.role("s", lemma_id)
        al = inst.alpha
        pair1 = _need_pair(inst.pair, lemma_id, "pair")
        pair2 = _need_pair(inst.pair2, lemma_id, "pair2")
        psi1, psi2 = pair1.phi, pair1.psi
        psi3, psi4 = pair2.phi, pair2.psi
        tp = fr(hermitian_part(p @ psd_power(_cogram(x), 1.0 - al) @ p.conj().T))
        tq = fr(hermitian_part(q.conj().T @ psd_power(_gram(x), al) @ q))
        tr = fr(hermitian_part(rm @ psd_power(_cogram(y), 1.0 - al) @ rm.conj().T))
        ts = fr(hermitian_part(sm.conj().T @ psd_power(_gram(y), al) @ sm))
        lhs = abs(f.apply(p @ x @ q + rm @ y @ sm))
        rhs = (
            psi1(math.sqrt(max(tp, 0.0)))
            + psi2(math.sqrt(max(tq, 0.0)))
            + psi3(math.sqrt(max(tr, 0.0)))
            + psi4(math.sqrt(max(ts, 0.0)))
        )
        pre = [_identity_pre(w), _invertible_pre("x", x),
               _invertible_pre("y", y), _alpha_pre(al)]
    else:  # pragma: no cover
        raise AssertionError(lemma_id)

    return _report(lemma_id, float(lhs), float(rhs), pre, {}, tol)
