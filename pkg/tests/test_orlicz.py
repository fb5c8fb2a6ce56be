import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orlicz_radius.errors import NegativeInputError, NoDensityError
from orlicz_radius.orlicz import (
    OrliczFn,
    complementary,
    is_submultiplicative,
    named_orlicz,
    validate_orlicz,
    young_check,
)


def power_density_table(p, t_max, n=20001):
    """Tabulated density t^(p-1) on a grid refined near zero."""
    grid = np.unique(np.concatenate([
        [0.0],
        np.geomspace(1e-8, t_max, n // 2),
        np.linspace(0.0, t_max, n // 2)[1:],
    ]))
    return OrliczFn.from_density_table(grid, grid ** (p - 1.0), name=f"tab(p={p})")


class TestValidation:
    def test_square_passes(self):
        assert validate_orlicz(OrliczFn.power(2)).passed

    def test_degenerate_hinge_fails(self):
        hinge = OrliczFn.custom(lambda t: np.maximum(0.0, t - 1.0), "hinge")
        report = validate_orlicz(hinge)
        assert not report.passed
        assert any(name == "non_degenerate" for name, *_ in report.failures)

    def test_sqrt_fails_convexity(self):
        root = OrliczFn.custom(np.sqrt, "sqrt")
        report = validate_orlicz(root)
        assert not report.passed
        assert any(name == "midpoint_convex" for name, *_ in report.failures)

    def test_named_set_valid(self):
        for name in ("t", "t^2", "t^1.5", "t^2+t", "t^3/3", "exp"):
            assert validate_orlicz(named_orlicz(name)).passed, name

    def test_grid_too_small(self):
        with pytest.raises(ValueError):
            validate_orlicz(OrliczFn.power(2), grid_n=8)


class TestComplementary:
    def test_self_dual_square(self):
        pair = complementary(OrliczFn.power_scaled(2))
        assert pair.construction == "closed_form"
        assert pair.psi.exponent == 2.0
        assert young_check(pair, 1.0, 1.0)
        # equality at x = y = 1: 1 <= 1/2 + 1/2
        assert abs(pair.phi(1.0) + pair.psi(1.0) - 1.0) < 1e-14

    def test_cubic_closed_form(self):
        pair = complementary(OrliczFn.power_scaled(3))
        assert abs(pair.psi.exponent - 1.5) < 1e-14
        # equality case y = p(x) = x^2 at x = 2: 8 = 8/3 + 16/3
        assert abs(pair.phi(2.0) + pair.psi(4.0) - 8.0) < 1e-12

    def test_numeric_matches_closed_form(self):
        """Tabulated t^3/3 vs its closed-form complementary on [0, 10]."""
        tab = power_density_table(3.0, 4.0)
        pair = complementary(tab, v_max=10.0, integration_tol=1e-9)
        assert pair.construction == "numeric"
        u = np.linspace(0.0, 10.0, 101)
        closed = u ** 1.5 / 1.5
        np.testing.assert_allclose(pair.psi(u), closed, atol=1e-6)

    def test_linear_rejected(self):
        with pytest.raises(NoDensityError):
            complementary(OrliczFn.linear())

    def test_custom_rejected(self):
        with pytest.raises(NoDensityError):
            complementary(named_orlicz("t^2+t"))

    def test_duality_on_power_family(self):
        for p in (1.5, 2.0, 3.0, 4.0):
            back = complementary(complementary(OrliczFn.power_scaled(p)).psi).psi
            u = np.linspace(0.0, 10.0, 64)
            np.testing.assert_allclose(
                back(u), OrliczFn.power_scaled(p)(u), atol=1e-6,
            )


class TestYoung:
    def test_zero_argument(self):
        pair = complementary(OrliczFn.power_scaled(3))
        assert young_check(pair, 0.0, 5.0)

    def test_negative_rejected(self):
        pair = complementary(OrliczFn.power_scaled(2))
        with pytest.raises(NegativeInputError):
            young_check(pair, -1.0, 1.0)

    @settings(max_examples=60, deadline=None)
    @given(
        p=st.floats(1.2, 4.0),
        x=st.floats(0.0, 10.0),
        y=st.floats(0.0, 10.0),
    )
    def test_young_property_powers(self, p, x, y):
        assert young_check(complementary(OrliczFn.power_scaled(p)), x, y)

    def test_equality_locus(self):
        """Equality holds at y = p(x), the density evaluated at x."""
        for p in (1.5, 2.0, 3.0):
            pair = complementary(OrliczFn.power_scaled(p))
            for x in (0.5, 1.0, 2.0):
                y = x ** (p - 1.0)
                margin = pair.phi(x) + pair.psi(y) - x * y
                assert abs(margin) < 1e-6


class TestSubmultiplicative:
    def test_square_short_circuits(self):
        report = is_submultiplicative(OrliczFn.power(2))
        assert report.result and report.witness is None

    def test_shifted_square(self):
        # (u^2+u)(v^2+v) - ((uv)^2 + uv) = u^2 v + u v^2 >= 0
        assert is_submultiplicative(named_orlicz("t^2+t")).result

    def test_exp_fails_with_witness(self):
        report = is_submultiplicative(named_orlicz("exp"))
        assert not report.result
        assert report.witness is not None
        # the single evaluation at u = v = 2: e^4 - 1 > (e^2 - 1)^2
        phi = named_orlicz("exp")
        assert phi(4.0) > phi(2.0) * phi(2.0)

    def test_scaled_power_not_submultiplicative(self):
        # (uv)^3/3 > (uv)^3/9 whenever uv > 0
        report = is_submultiplicative(OrliczFn.power_scaled(3))
        assert not report.result

    def test_multiplicative_implies_submultiplicative(self):
        for r in (1.0, 1.5, 2.0):
            phi = OrliczFn.power(r)
            assert phi.multiplicative and phi.submultiplicative
            u = np.linspace(0.0, 10.0, 33)
            uu, vv = np.meshgrid(u, u)
            np.testing.assert_allclose(phi(uu * vv), phi(uu) * phi(vv),
                                       rtol=1e-12, atol=1e-12)


class TestTableForm:
    def test_table_matches_closed_form(self):
        tab = power_density_table(3.0, 5.0)
        u = np.linspace(0.0, 5.0, 64)
        np.testing.assert_allclose(tab(u), u**3 / 3.0, atol=1e-7, rtol=1e-7)

    def test_eval_beyond_table_extrapolates(self):
        tab = OrliczFn.from_density_table([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
        # density t continues with slope 1: phi(3) = 9/2
        assert abs(tab(3.0) - 4.5) < 1e-12

    def test_csv_round_trip(self, tmp_path):
        grid = np.linspace(0.0, 4.0, 1001)
        path = tmp_path / "density.csv"
        with open(path, "w") as fh:
            for t, p in zip(grid, grid**2):
                fh.write(f"{float(t)!r},{float(p)!r}\n")
        phi = OrliczFn.from_density_csv(path)
        np.testing.assert_allclose(phi(2.0), 8.0 / 3.0, atol=1e-5)

    def test_rejects_bad_tables(self):
        with pytest.raises(ValueError):
            OrliczFn.from_density_table([0.0, 1.0], [0.5, 1.0])  # p(0) != 0
        with pytest.raises(ValueError):
            OrliczFn.from_density_table([0.0, 1.0, 2.0], [0.0, 1.0, 0.5])

    def test_named_parametric_forms(self):
        assert named_orlicz("power:2.5").exponent == 2.5
        assert named_orlicz("power_scaled:3").exponent == 3.0
        with pytest.raises(ValueError):
            named_orlicz("nope")
