import json
import math

import numpy as np
import pytest

from orlicz_radius.bounds import (
    BOUND_REGISTRY,
    Instance,
    LEMMA_IDS,
    evaluate_bound,
    lemma_check,
    registry_ids,
)
from orlicz_radius.errors import (
    MissingRoleError,
    NoDensityError,
)
from orlicz_radius.harness import CampaignConfig, random_instance
from orlicz_radius.orlicz import OrliczFn, complementary, named_orlicz
from orlicz_radius.radius import Weight, random_state

from conftest import rand_matrix, rand_psd, rand_weight

ALL_IDS = (
    "norm_lower", "norm_upper", "a_norm_bounds", "mz3", "mz4", "th1a",
    "th1b", "re01", "ramm", "re02", "th2a_i", "th2a_ii", "th2b_i",
    "th2b_ii", "ccc_i", "ccc_ii", "hhnn", "sum2", "sumpi", "piet_a",
    "piet_b", "ram", "ra", "dra", "dra_comm", "kit28",
)

SCALAR_ONE = np.eye(1, dtype=complex)


def scalar_dra_instance():
    return Instance(
        matrices={k: SCALAR_ONE for k in ("w", "x", "y", "z")},
        weight=Weight.identity(1),
        phi=named_orlicz("t"),
        r_exp=1.0,
        s_exp=1.0,
    )


class TestRegistry:
    def test_all_ids_registered(self):
        assert tuple(registry_ids()) == ALL_IDS

    def test_unknown_id(self):
        with pytest.raises(KeyError):
            evaluate_bound("nope", scalar_dra_instance())

    def test_every_bound_holds_on_sampled_instances(self):
        cfg = CampaignConfig(n_instances=4, dim_range=(2, 4), seed=99)
        for bid in registry_ids():
            bdef = BOUND_REGISTRY[bid]
            for seed in range(4):
                inst = random_instance(cfg, bid, seed)
                kwargs = {"variant": "proof"} if bdef.has_variant else {}
                rep = evaluate_bound(bid, inst, **kwargs)
                assert rep.holds, (bid, seed, rep.slack)
                assert rep.preconditions_met, (bid, seed, rep.preconditions)

    def test_missing_role(self):
        inst = Instance(matrices={}, weight=Weight.identity(2))
        with pytest.raises(MissingRoleError):
            evaluate_bound("mz3", inst)

    def test_missing_phi(self):
        inst = Instance(matrices={"x": np.eye(2, dtype=complex)},
                        weight=Weight.identity(2))
        with pytest.raises(MissingRoleError):
            evaluate_bound("th1b", inst)

    def test_dimension_mismatch(self):
        inst = Instance(matrices={"x": np.eye(3, dtype=complex)},
                        weight=Weight.identity(2))
        from orlicz_radius.errors import DimensionMismatchError

        with pytest.raises(DimensionMismatchError):
            evaluate_bound("mz3", inst)

    def test_report_json_round_trip(self, rng):
        inst = Instance(matrices={"x": rand_matrix(rng, 3)},
                        weight=Weight.identity(3))
        rep = evaluate_bound("mz3", inst)
        doc = json.loads(rep.to_json())
        assert doc["bound_id"] == "mz3"
        assert doc["slack"] == rep.rhs - rep.lhs
        assert doc["holds"] is True


class TestCoincidences:
    def test_th1a_half_equals_mz3(self, rng):
        """At alpha = 1/2 the two right sides are the same formula."""
        for _ in range(10):
            w = rand_weight(rng, 3)
            inst = Instance(matrices={"x": rand_matrix(rng, 3)}, weight=w,
                            alpha=0.5)
            r1 = evaluate_bound("th1a", inst)
            r2 = evaluate_bound("mz3", inst)
            assert abs(r1.rhs - r2.rhs) <= 1e-12 * max(1.0, abs(r2.rhs))

    def test_ramm_linear_equals_mz4(self, rng):
        for _ in range(10):
            w = rand_weight(rng, 3, geq_one=True)
            inst = Instance(matrices={"x": rand_matrix(rng, 3)}, weight=w,
                            phi=named_orlicz("t"))
            r1 = evaluate_bound("ramm", inst)
            r2 = evaluate_bound("mz4", inst)
            assert abs(r1.rhs - r2.rhs) <= 1e-12 * max(1.0, abs(r2.rhs))

    def test_th1b_linear_equals_th1a_identity_weight(self, rng):
        for _ in range(5):
            inst = Instance(matrices={"x": rand_matrix(rng, 3)},
                            weight=Weight.identity(3), alpha=0.3,
                            phi=named_orlicz("t"))
            r1 = evaluate_bound("th1b", inst)
            r2 = evaluate_bound("th1a", inst)
            assert abs(r1.rhs - r2.rhs) <= 1e-12 * max(1.0, abs(r2.rhs))

    def test_re01_equals_th1b_power(self, rng):
        for r in (1.0, 1.7, 2.5):
            inst = Instance(matrices={"x": rand_matrix(rng, 3)},
                            weight=Weight.identity(3), alpha=0.4, r_exp=r,
                            phi=OrliczFn.power(r))
            r1 = evaluate_bound("re01", inst)
            r2 = evaluate_bound("th1b", inst)
            assert abs(r1.rhs - r2.rhs) <= 1e-12 * max(1.0, abs(r2.rhs))


class TestDraFamily:
    def test_scalar_fixture_literal_violated(self):
        rep = evaluate_bound("dra", scalar_dra_instance(), variant="literal")
        assert rep.lhs == 2.0 and rep.rhs == 1.0 and not rep.holds
        assert rep.variant == "literal"

    def test_scalar_fixture_proof_equality(self):
        rep = evaluate_bound("dra", scalar_dra_instance(), variant="proof")
        assert abs(rep.lhs - rep.rhs) <= 1e-12
        assert rep.holds and rep.variant == "proof"

    def test_requires_power_phi(self):
        inst = scalar_dra_instance()
        inst.phi = named_orlicz("t^2+t")
        rep = evaluate_bound("dra", inst)
        assert ("phi is multiplicative (power form)", False) in rep.preconditions

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            evaluate_bound("dra", scalar_dra_instance(), variant="wat")

    def test_commutator_consistency(self, rng):
        """dra_comm must agree with dra under w=q, x=p*, y=-p, z=q*."""
        p = rand_matrix(rng, 3)
        q = rand_matrix(rng, 3)
        w = Weight.identity(3)
        phi = OrliczFn.power(2)
        comm = Instance(matrices={"p": p, "q": q}, weight=w, phi=phi,
                        r_exp=1.5, s_exp=2.5)
        subst = Instance(
            matrices={"w": q, "x": p.conj().T, "y": -p, "z": q.conj().T},
            weight=w, phi=phi, r_exp=1.5, s_exp=2.5,
        )
        r1 = evaluate_bound("dra_comm", comm)
        r2 = evaluate_bound("dra", subst)
        assert abs(r1.lhs - r2.lhs) <= 1e-10 * max(1.0, abs(r2.lhs))
        assert abs(r1.rhs - r2.rhs) <= 1e-10 * max(1.0, abs(r2.rhs))


class TestSum2:
    def test_n_one_contraction(self, rng):
        w = rand_weight(rng, 2)
        x = rand_matrix(rng, 2)
        y = rand_matrix(rng, 2)
        from orlicz_radius.radius import a_seminorm

        y = y * (0.5 / a_seminorm(y, w))
        inst = Instance(matrices={"x": x, "y": y}, weight=w, n_param=1)
        rep = evaluate_bound("sum2", inst)
        assert rep.holds and math.isfinite(rep.rhs)
        assert ("n=1 requires ||y||_a <= 1", True) in rep.preconditions

    def test_n_one_rejected_when_large(self, rng):
        w = rand_weight(rng, 2)
        x = rand_matrix(rng, 2)
        y = np.eye(2, dtype=complex) * 5.0
        inst = Instance(matrices={"x": x, "y": y}, weight=w, n_param=1)
        rep = evaluate_bound("sum2", inst)
        assert rep.rhs == math.inf
        assert ("n=1 requires ||y||_a <= 1", False) in rep.preconditions

    def test_minimizing_n_recorded(self, rng):
        """No claimed direction in n; evaluate a few and report the best."""
        w = rand_weight(rng, 3)
        mats = {"x": rand_matrix(rng, 3), "y": rand_matrix(rng, 3)}
        rhs_by_n = {}
        for n in (2, 3, 4, 8):
            inst = Instance(matrices=mats, weight=w, n_param=n)
            rep = evaluate_bound("sum2", inst)
            assert rep.holds
            rhs_by_n[n] = rep.rhs
        best = min(rhs_by_n, key=rhs_by_n.get)
        assert best in (2, 3, 4, 8)


class TestPreconditionPolicy:
    def test_evaluation_proceeds_when_unmet(self, rng):
        """piet_a with ||y||_a > 1 still evaluates, flagged."""
        w = rand_weight(rng, 2)
        mats = {"x": rand_matrix(rng, 2), "y": 5 * np.eye(2, dtype=complex),
                "z": rand_matrix(rng, 2)}
        rep = evaluate_bound("piet_a", Instance(matrices=mats, weight=w))
        assert not rep.preconditions_met
        assert math.isfinite(rep.rhs)

    def test_scale_covariance_th1a(self, rng):
        """Both sides are degree-2 homogeneous in x."""
        w = rand_weight(rng, 3)
        x = rand_matrix(rng, 3)
        base = evaluate_bound("th1a", Instance(matrices={"x": x}, weight=w,
                                               alpha=0.3))
        c = 2.5
        scaled = evaluate_bound("th1a", Instance(matrices={"x": c * x},
                                                 weight=w, alpha=0.3))
        assert abs(scaled.lhs - c**2 * base.lhs) <= 1e-10 * max(1.0, scaled.lhs)
        assert abs(scaled.rhs - c**2 * base.rhs) <= 1e-10 * max(1.0, scaled.rhs)


class TestDiagonalOracles:
    """Diagonal instances make the heavyweight evaluators elementwise
    computable, giving fully independent expected values."""

    def test_kit28_elementwise(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 5))
            dm = {role: rng.uniform(0.2, 2.0, n)
                  * np.exp(1j * rng.uniform(0, 2 * np.pi, n))
                  for role in "pxqrys"}
            al = float(rng.uniform(0, 1))
            npow = int(rng.integers(2, 7))
            inst = Instance(
                matrices={role: np.diag(v).astype(complex)
                          for role, v in dm.items()},
                weight=Weight.identity(n), alpha=al, n_param=npow,
            )
            rep = evaluate_bound("kit28", inst)
            p, x, q, r, y, s = (dm[role] for role in "pxqrys")
            t1 = (1 / npow) * np.max(
                (np.abs(p) ** 2 * np.abs(x) ** (2 * (1 - al))) ** (npow / 2)
                + (np.abs(r) ** 2 * np.abs(y) ** (2 * (1 - al))) ** (npow / 2)
            )
            expo = npow / (2 * (npow - 1))
            t2 = ((npow - 1) / npow) * (
                np.max(np.abs(q) ** 2 * np.abs(x) ** (2 * al)) ** expo
                + np.max(np.abs(s) ** 2 * np.abs(y) ** (2 * al)) ** expo
            )
            expected_rhs = t1 + t2
            expected_lhs = np.max(np.abs(p * x * q + r * y * s))
            assert abs(rep.rhs - expected_rhs) <= 1e-9 * max(1, expected_rhs)
            assert abs(rep.lhs - expected_lhs) <= 1e-9 * max(1, expected_lhs)
            assert rep.holds

    def test_ra_elementwise(self, rng):
        from orlicz_radius.radius import numerical_radius
        from orlicz_radius.linalg import operator_norm

        for _ in range(25):
            n = int(rng.integers(2, 5))
            xd = rng.uniform(0.1, 2.0, n)
            zd = rng.uniform(0.1, 2.0, n)
            yv = rand_matrix(rng, n)
            al = float(rng.uniform(0, 1))
            r0 = float(rng.uniform(2, 4))
            rpow = float(rng.uniform(1, 2))
            inst = Instance(
                matrices={"x": np.diag(xd).astype(complex), "y": yv,
                          "z": np.diag(zd).astype(complex)},
                weight=Weight.identity(n), alpha=al, r_exp=r0,
                phi=OrliczFn.power(rpow),
            )
            rep = evaluate_bound("ra", inst)
            mid = np.diag(xd**al) @ yv @ np.diag(zd ** (1 - al))
            expected_lhs = (numerical_radius(mid) ** r0) ** rpow
            expected_rhs = (operator_norm(yv) ** r0) ** rpow * np.max(
                al * (xd**r0) ** rpow + (1 - al) * (zd**r0) ** rpow
            )
            assert abs(rep.lhs - expected_lhs) <= 1e-8 * max(1, expected_lhs)
            assert abs(rep.rhs - expected_rhs) <= 1e-8 * max(1, expected_rhs)
            assert rep.holds


class TestDenseGridOracle:
    def test_radius_against_raw_dense_sweep(self, rng):
        """10000 raw grid points, no refinement: under-estimates the true
        radius by at most ~||x|| (dtheta)^2/8, so the production value must
        sit within that band above it."""
        from orlicz_radius.radius import numerical_radius
        from orlicz_radius.linalg import hermitian_part

        for _ in range(8):
            n = int(rng.integers(2, 9))
            x = rand_matrix(rng, n)
            h1 = hermitian_part(x)
            h2 = 1j * (x - x.conj().T) / 2
            th = np.linspace(0, 2 * np.pi, 10_000, endpoint=False)
            stack = (np.cos(th)[:, None, None] * h1
                     + np.sin(th)[:, None, None] * h2)
            dense = float(np.linalg.eigvalsh(stack)[:, -1].max())
            v = numerical_radius(x)
            assert abs(v - dense) <= 1e-7 * max(1.0, dense)


def _state_instance(rng, n=3, geq_one=True, **kwargs):
    w = rand_weight(rng, n, geq_one=geq_one)
    inst = Instance(matrices={}, weight=w, **kwargs)
    return w, inst


class TestLemmaChecks:
    def test_lemma_ids_complete(self):
        assert len(LEMMA_IDS) == 16

    def test_cauchy_many_seeds(self, rng):
        """Positive-functional Cauchy-Schwarz over 1000 random states."""
        for k in range(1000):
            if k % 50 == 0:
                w, inst = _state_instance(rng, geq_one=False)
                inst.matrices = {"x": rand_matrix(rng, 3),
                                 "y": rand_matrix(rng, 3)}
            f = random_state(w, seed=k)
            rep = lemma_check("cauchy", inst, f)
            assert rep.holds, (k, rep.slack)

    def test_gcauchy(self, rng):
        w, inst = _state_instance(rng, geq_one=False)
        inst.matrices = {"x": rand_matrix(rng, 3), "y": rand_matrix(rng, 3)}
        for k in range(50):
            assert lemma_check("gcauchy", inst, random_state(w, seed=k)).holds

    def test_jensen_state_lemma(self, rng):
        """phi(g(x)) <= g(phi(x)) for PSD x, identity weight, phi = t^2."""
        w = Weight.identity(3)
        inst = Instance(matrices={"x": rand_psd(rng, 3)}, weight=w,
                        phi=named_orlicz("t^2"))
        for k in range(100):
            rep = lemma_check("pp01", inst, random_state(w, seed=k))
            assert rep.holds and rep.preconditions_met

    def test_pje_concavity_of_fractional_power(self, rng):
        w = Weight.identity(3)
        inst = Instance(matrices={"x": rand_psd(rng, 3)}, weight=w, r_exp=0.5)
        for k in range(50):
            assert lemma_check("pje", inst, random_state(w, seed=k)).holds

    def test_lj_jensen_weighted(self, rng):
        """a >= 1 weight, ax PSD: f(phi(ax)) >= phi(f(ax))."""
        for k in range(30):
            w, inst = _state_instance(rng, geq_one=True)
            h = rand_psd(rng, 3)
            inst.matrices = {"x": w.inv_a @ h}
            inst.phi = named_orlicz("t^2")
            rep = lemma_check("lj", inst, random_state(w, seed=k))
            assert rep.holds and rep.preconditions_met

    def test_lj_identity_weight(self, rng):
        """The a = 1 instantiation: plain Jensen on a PSD element."""
        w = Weight.identity(3)
        inst = Instance(matrices={"x": rand_psd(rng, 3)}, weight=w,
                        phi=named_orlicz("t^2"))
        for k in range(30):
            rep = lemma_check("lj", inst, random_state(w, seed=k))
            assert rep.holds and rep.preconditions_met

    def test_m02_linear_case_equality(self, rng):
        """r = 1 collapses to equality."""
        w, inst = _state_instance(rng, geq_one=True)
        h = rand_psd(rng, 3)
        inst.matrices = {"x": w.inv_a @ h}
        inst.r_exp = 1.0
        rep = lemma_check("m02", inst, random_state(w, seed=0))
        assert abs(rep.lhs - rep.rhs) <= 1e-12 * max(1.0, rep.rhs)

    def test_m02_power(self, rng):
        for k in range(30):
            w, inst = _state_instance(rng, geq_one=True)
            h = rand_psd(rng, 3)
            inst.matrices = {"x": w.inv_a @ h}
            inst.r_exp = 2.5
            assert lemma_check("m02", inst, random_state(w, seed=k)).holds

    def test_lsplemma02(self, rng):
        for k in range(50):
            w, inst = _state_instance(rng, geq_one=False)
            inst.matrices = {"x": rand_matrix(rng, 3), "y": rand_matrix(rng, 3)}
            assert lemma_check("lsplemma02", inst, random_state(w, seed=k)).holds

    def test_buzano_families(self, rng):
        for k in range(40):
            w, inst = _state_instance(rng, geq_one=False)
            inst.matrices = {
                "x1": rand_matrix(rng, 3), "x2": rand_matrix(rng, 3),
                "y1": rand_matrix(rng, 3), "y2": rand_matrix(rng, 3),
            }
            inst.probs = np.array([0.3, 0.7])
            f = random_state(w, seed=k)
            assert lemma_check("cbuzano", inst, f).holds
            assert lemma_check("lal", inst, f).holds

    def test_lemma1_and_lemma2(self, rng):
        for k in range(30):
            w, inst = _state_instance(rng, geq_one=True)
            inst.matrices = {"x": rand_matrix(rng, 3)}
            inst.phi = named_orlicz("t^2")
            inst.alpha = float(np.random.default_rng(k).uniform(0, 1))
            f = random_state(w, seed=k)
            assert lemma_check("lemma1", inst, f).holds
            assert lemma_check("lemma2_a", inst, f).holds
            assert lemma_check("lemma2_b", inst, f).holds

    def test_l01_with_self_dual_pair(self, rng):
        pair = complementary(OrliczFn.power_scaled(2))
        for k in range(30):
            w, inst = _state_instance(rng, geq_one=False)
            inst.matrices = {"x": rand_matrix(rng, 3), "y": rand_matrix(rng, 3)}
            inst.pair = pair
            assert lemma_check("L01", inst, random_state(w, seed=k)).holds

    def test_l01_requires_pair(self, rng):
        w, inst = _state_instance(rng)
        inst.matrices = {"x": rand_matrix(rng, 3), "y": rand_matrix(rng, 3)}
        with pytest.raises(NoDensityError):
            lemma_check("L01", inst, random_state(w, seed=0))

    def test_pie(self, rng):
        from orlicz_radius.radius import a_seminorm

        for k in range(30):
            w, inst = _state_instance(rng, geq_one=True)
            y = rand_matrix(rng, 3)
            y = y * (0.8 / a_seminorm(y, w))
            inst.matrices = {"x": rand_matrix(rng, 3), "y": y,
                             "z": rand_matrix(rng, 3)}
            inst.phi = named_orlicz("t^2")
            rep = lemma_check("pie", inst, random_state(w, seed=k))
            assert rep.holds and rep.preconditions_met

    def test_l426(self, rng):
        w = Weight.identity(3)
        for k in range(30):
            y = rand_matrix(rng, 3) + 2 * np.eye(3)
            inst = Instance(
                matrices={"x": rand_matrix(rng, 3), "y": y,
                          "z": rand_matrix(rng, 3)},
                weight=w, alpha=float(np.random.default_rng(k).uniform(0, 1)),
            )
            assert lemma_check("l426", inst, random_state(w, seed=k)).holds

    def test_tla_with_two_pairs(self, rng):
        w = Weight.identity(2)
        pair1 = complementary(OrliczFn.power_scaled(2))
        pair2 = complementary(OrliczFn.power_scaled(3))
        for k in range(30):
            inst = Instance(
                matrices={
                    "p": rand_matrix(rng, 2), "q": rand_matrix(rng, 2),
                    "r": rand_matrix(rng, 2), "s": rand_matrix(rng, 2),
                    "x": rand_matrix(rng, 2) + 2 * np.eye(2),
                    "y": rand_matrix(rng, 2) + 2 * np.eye(2),
                },
                weight=w, alpha=0.4, pair=pair1, pair2=pair2,
            )
            assert lemma_check("tla", inst, random_state(w, seed=k)).holds

    def test_unknown_lemma(self, rng):
        w, inst = _state_instance(rng)
        with pytest.raises(KeyError):
            lemma_check("nope", inst, random_state(w, seed=0))

    def test_state_weight_mismatch(self, rng):
        w1, inst = _state_instance(rng)
        w2 = rand_weight(rng, 3)
        from orlicz_radius.errors import DimensionMismatchError

        with pytest.raises(DimensionMismatchError):
            lemma_check("cauchy", inst, random_state(w2, seed=0))
