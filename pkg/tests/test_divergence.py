import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orlicz_bounds import (DivergenceSpec, DomainError, alpha_divergence,
                           conjugate_derivative, conjugate_value,
                           divergence_value, kl, scaled_conjugate_derivative,
                           scaled_conjugate_value)

SPECS = [kl(), alpha_divergence(1.5), alpha_divergence(0.5), alpha_divergence(3.0)]


class TestSpecValidation:
    def test_epsilon_must_be_positive(self):
        with pytest.raises(ValueError):
            kl(0.0)
        with pytest.raises(ValueError):
            kl(-1.0)

    def test_alpha_one_rejected(self):
        with pytest.raises(ValueError):
            alpha_divergence(1.0)

    def test_alpha_must_be_positive(self):
        with pytest.raises(ValueError):
            alpha_divergence(-0.5)
        with pytest.raises(ValueError):
            alpha_divergence(0.0)

    def test_alpha_required_for_alpha_kind(self):
        with pytest.raises(ValueError):
            DivergenceSpec("alpha")

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            DivergenceSpec("hellinger")


class TestDivergenceValue:
    def test_kl_at_one(self):
        assert divergence_value(kl(), 1.0) == 0.0

    def test_kl_at_zero(self):
        # 0 ln 0 = 0 convention gives f(0) = 1
        assert divergence_value(kl(), 0.0) == 1.0

    def test_kl_at_two(self):
        assert divergence_value(kl(), 2.0) == pytest.approx(2 * math.log(2) - 1,
                                                            abs=1e-12)

    @pytest.mark.parametrize("spec", SPECS)
    def test_negative_argument_is_infinite(self, spec):
        assert divergence_value(spec, -0.5) == math.inf

    @pytest.mark.parametrize("spec", SPECS)
    def test_normalized_at_one(self, spec):
        assert divergence_value(spec, 1.0) == 0.0

    @pytest.mark.parametrize("spec", SPECS)
    def test_finite_at_zero(self, spec):
        assert divergence_value(spec, 0.0) == 1.0

    def test_array_input(self):
        vals = divergence_value(kl(), np.array([-1.0, 0.0, 1.0, 2.0]))
        assert vals[0] == math.inf
        assert vals[1] == 1.0 and vals[2] == 0.0


class TestConjugateValue:
    def test_alpha_15_flat_region(self):
        # below the kink at -alpha/(alpha-1) = -3 the plus-part gives -1
        assert conjugate_value(alpha_divergence(1.5), -3.0) == -1.0
        assert conjugate_value(alpha_divergence(1.5), -10.0) == -1.0

    def test_kl_at_zero(self):
        assert conjugate_value(kl(), 0.0) == 0.0

    def test_alpha_05_interior(self):
        # (1 - y)^{-1} - 1 at y = 0.5
        assert conjugate_value(alpha_divergence(0.5), 0.5) == pytest.approx(1.0)

    def test_alpha_05_blows_up_at_domain_edge(self):
        assert conjugate_value(alpha_divergence(0.5), 1.0) == math.inf
        assert conjugate_value(alpha_divergence(0.5), 2.0) == math.inf

    @pytest.mark.parametrize("spec", SPECS)
    def test_monotone_nondecreasing(self, spec):
        ys = np.linspace(-6.0, min(spec.conjugate_domain_sup(), 4.0) - 1e-9, 200)
        vals = conjugate_value(spec, ys)
        assert np.all(np.diff(vals) >= 0.0)

    @pytest.mark.parametrize("spec", SPECS)
    def test_dominates_identity(self, spec):
        # g(y) >= y - f(1) = y on the finite domain
        ys = np.linspace(-6.0, min(spec.conjugate_domain_sup(), 4.0) - 1e-6, 100)
        assert np.all(conjugate_value(spec, ys) >= ys - 1e-12)

    @pytest.mark.parametrize("spec", SPECS)
    def test_nonnegative_for_nonnegative_arguments(self, spec):
        ys = np.linspace(0.0, min(spec.conjugate_domain_sup(), 5.0) - 1e-6, 50)
        assert np.all(conjugate_value(spec, ys) >= 0.0)

    def test_alpha_near_one_approaches_kl(self):
        ys = np.array([-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5])
        for a in (0.999, 1.001):
            diff = np.abs(conjugate_value(alpha_divergence(a), ys)
                          - conjugate_value(kl(), ys))
            assert np.max(diff) < 1e-2

    @given(st.floats(-30.0, 30.0), st.floats(-30.0, 30.0))
    @settings(max_examples=60, deadline=None)
    def test_kl_monotone_property(self, y1, y2):
        lo, hi = sorted((y1, y2))
        assert conjugate_value(kl(), lo) <= conjugate_value(kl(), hi)


class TestConjugacy:
    """g is the Legendre transform of f: g(y) = sup_x {xy - f(x)}."""

    @pytest.mark.parametrize("spec, y_grid, x_max", [
        (kl(), np.linspace(-2.0, 2.0, 9), 12.0),
        (alpha_divergence(1.5), np.linspace(-4.0, 3.0, 9), 10.0),
        (alpha_divergence(0.5), np.linspace(-2.0, 0.8, 9), 30.0),
    ])
    def test_fenchel_inequality_and_attainment(self, spec, y_grid, x_max):
        xs = np.linspace(0.0, x_max, 40001)
        f_vals = divergence_value(spec, xs)
        for y in y_grid:
            g = conjugate_value(spec, y)
            sup = np.max(xs * y - f_vals)
            assert g >= sup - 1e-9
            # equality attained at x = g'(y)
            x_star = conjugate_derivative(spec, y)
            attained = x_star * y - divergence_value(spec, x_star)
            assert g == pytest.approx(attained, abs=1e-6)


class TestConjugateDerivative:
    def test_kl_at_zero(self):
        assert conjugate_derivative(kl(), 0.0) == 1.0

    def test_alpha_15_at_zero(self):
        assert conjugate_derivative(alpha_divergence(1.5), 0.0) == 1.0

    def test_alpha_15_flat_region_is_zero(self):
        assert conjugate_derivative(alpha_divergence(1.5), -3.0) == 0.0
        assert conjugate_derivative(alpha_divergence(1.5), -5.0) == 0.0

    def test_domain_violation_raises(self):
        with pytest.raises(DomainError):
            conjugate_derivative(alpha_divergence(0.5), 1.0)
        with pytest.raises(DomainError):
            conjugate_derivative(alpha_divergence(0.5), 5.0)

    @pytest.mark.parametrize("spec, points", [
        (kl(), (-2.0, -0.3, 0.0, 0.7, 2.5)),
        (alpha_divergence(1.5), (-2.5, -0.3, 0.0, 0.7, 2.5)),
        (alpha_divergence(0.5), (-2.5, -0.3, 0.0, 0.5, 0.9)),
    ])
    def test_matches_finite_differences(self, spec, points):
        for y0 in points:
            h = 1e-6 * max(1.0, abs(y0))
            fd = (conjugate_value(spec, y0 + h)
                  - conjugate_value(spec, y0 - h)) / (2 * h)
            analytic = conjugate_derivative(spec, y0)
            assert analytic == pytest.approx(fd, rel=1e-6)


class TestScaledConjugate:
    def test_reduces_to_unscaled_at_unit_epsilon(self):
        ys = np.linspace(-5.0, 3.0, 50)
        spec = kl(1.0)
        assert np.array_equal(scaled_conjugate_value(spec, ys),
                              conjugate_value(spec, ys))

    def test_kl_zero_under_any_scaling(self):
        assert scaled_conjugate_value(kl(2.0), 0.0) == 0.0

    def test_kl_unit_epsilon_value(self):
        assert scaled_conjugate_value(kl(1.0), 1.0) == pytest.approx(math.e - 1.0)

    def test_alpha_05_domain_bound_scales_with_epsilon(self):
        # finite strictly below alpha/((1-alpha)*eps) = 2, infinite at it
        spec = alpha_divergence(0.5, epsilon=0.5)
        assert scaled_conjugate_value(spec, 1.9) < math.inf
        assert scaled_conjugate_value(spec, 2.0) == math.inf

    def test_derivative_is_inverse_of_scaled_rate(self):
        # h(y) = g'(eps*y): check f_eps'(h(y)) = y wherever h > 0
        for spec in (kl(0.7), alpha_divergence(1.5, 0.7)):
            for y in (-0.5, 0.0, 0.8, 2.0):
                h = scaled_conjugate_derivative(spec, y)
                assert h >= 0.0
                if h > 0.0:
                    step = 1e-7 * max(1.0, h)
                    rate = (divergence_value(spec, h + step)
                            - divergence_value(spec, h - step)) / (2 * step)
                    assert rate / spec.epsilon == pytest.approx(y, abs=1e-5)

    def test_kl_examples(self):
        assert scaled_conjugate_derivative(kl(1.0), 0.0) == 1.0

    def test_alpha_examples(self):
        spec = alpha_divergence(1.5, 1.0)
        assert scaled_conjugate_derivative(spec, 0.0) == 1.0
        assert scaled_conjugate_derivative(spec, 3.0) == pytest.approx(4.0)
