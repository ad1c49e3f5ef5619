import math

import pytest
from hypothesis import given, settings, strategies as st

from ddr.amplitude import (AmplitudeSpec, ImTerm, LambdaKind, Parity, classify_lambda,
                           im_log_derivative, im_log_derivative_xi, im_value,
                           validate_term)
from ddr.errors import DomainError, InvalidLogPower, LambdaOutOfRange


class TestValidateTerm:
    def test_accepts_fractional_power(self):
        t = validate_term(1.0, 0.5, 2)
        assert (t.c, t.lam, t.n) == (1.0, 0.5, 2)

    def test_accepts_odd_negative(self):
        t = validate_term(2.0, -3.0, 1)
        assert t.lam == -3.0

    @pytest.mark.parametrize("lam", [1.0, 1.2, 5.0])
    def test_rejects_lambda_at_or_above_one(self, lam):
        with pytest.raises(LambdaOutOfRange):
            validate_term(1.0, lam, 0)

    @pytest.mark.parametrize("n", [-1, 1.5, "2"])
    def test_rejects_bad_log_power(self, n):
        with pytest.raises((InvalidLogPower, TypeError)):
            validate_term(1.0, 0.0, n)

    def test_integral_float_log_power(self):
        assert validate_term(1, 0, 3.0).n == 3

    def test_frozen(self):
        t = ImTerm(1.0, 0.0, 0)
        with pytest.raises(AttributeError):
            t.lam = 0.5


def test_amplitude_spec_invariants():
    t = ImTerm(1.0, 0.0, 0)
    with pytest.raises(DomainError):
        AmplitudeSpec((), Parity.EVEN, 1.0)
    with pytest.raises(DomainError):
        AmplitudeSpec((t,), Parity.EVEN, 0.0)
    spec = AmplitudeSpec([t], "odd", 0.938)
    assert spec.parity is Parity.ODD and spec.terms == (t,)


class TestClassify:
    def test_examples(self):
        assert classify_lambda(0.5, 1e-6).kind is LambdaKind.GENERIC
        c = classify_lambda(-3.0, 1e-6)
        assert c.kind is LambdaKind.ODD_NEGATIVE and c.N == 1
        c = classify_lambda(-1.0000003, 1e-6)
        assert c.kind is LambdaKind.NEAR_POLE and c.N == 0
        assert c.pole_distance == pytest.approx(3e-7, rel=1e-6)

    def test_even_negative_integers_are_generic(self):
        for lam in (-2.0, -4.0, 0.0):
            assert classify_lambda(lam).kind is LambdaKind.GENERIC

    @pytest.mark.parametrize("N", range(0, 40))
    def test_odd_branch_matches_integer_arithmetic(self, N):
        c = classify_lambda(float(-(2 * N + 1)))
        assert c.kind is LambdaKind.ODD_NEGATIVE
        assert c.N == N and -(2 * c.N + 1) == -(2 * N + 1)

    @given(st.floats(min_value=-60, max_value=0.999999, allow_nan=False))
    def test_total_on_admissible_lambda(self, lam):
        c = classify_lambda(lam, 1e-6)
        is_odd = lam.is_integer() and int(lam) % 2 != 0
        assert (c.kind is LambdaKind.ODD_NEGATIVE) == is_odd
        if c.kind is LambdaKind.NEAR_POLE:
            assert 0 < abs(lam + 2 * c.N + 1) < 1e-6
        if c.kind is LambdaKind.GENERIC:
            assert abs(lam + 2 * c.N + 1) >= 1e-6


class TestImValue:
    def test_examples(self):
        assert im_value(ImTerm(1, 0.5, 2), math.e ** 2) == pytest.approx(4 * math.e, rel=1e-14)
        assert im_value(ImTerm(1, -1, 0), 2) == pytest.approx(0.5, rel=1e-15)
        assert im_value(ImTerm(1, 0, 0), 7) == 1.0

    @pytest.mark.parametrize("x", [1.0, 0.5, -2.0])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            im_value(ImTerm(1, 0, 0), x)


class TestLogDerivative:
    def test_examples(self):
        for x in (1.0, 2.0, 50.0):
            assert im_log_derivative(ImTerm(3.0, 0.0, 1), 1, x) == 3.0
        assert im_log_derivative(ImTerm(1, -1, 0), 3, 2) == pytest.approx(-0.5, rel=1e-15)
        assert im_log_derivative(ImTerm(1, -1, 0), 2, 1) == 1.0

    def test_threshold_keeps_only_leading_power(self):
        # at xi = 0 only the j = n Leibniz term survives: C(k, n) lam^(k-n) n!
        t = ImTerm(1.0, 0.7, 2)
        for k in range(6):
            expected = math.comb(k, 2) * 0.7 ** (k - 2) * 2 if k >= 2 else 0.0
            assert im_log_derivative(t, k, 1.0) == pytest.approx(expected, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            im_log_derivative(ImTerm(1, 0, 0), 1, 0.99)

    @given(st.floats(-3, 0.9), st.integers(0, 3), st.floats(1.0001, 100.0))
    def test_zeroth_derivative_is_value(self, lam, n, x):
        t = ImTerm(1.3, lam, n)
        assert im_log_derivative(t, 0, x) == im_value(t, x)

    @settings(max_examples=200)
    @given(st.floats(-3, 0.9), st.integers(0, 3), st.integers(1, 6), st.floats(1.1, 100.0))
    def test_matches_finite_difference(self, lam, n, k, x):
        t = ImTerm(1.0, lam, n)
        xi = math.log(x)

        def central(h):
            return (im_log_derivative_xi(t, k - 1, xi + h)
                    - im_log_derivative_xi(t, k - 1, xi - h)) / (2 * h)
        h = 1e-3
        fd = (4 * central(h / 2) - central(h)) / 3
        exact = im_log_derivative(t, k, x)
        scale = max(abs(exact), abs(im_log_derivative_xi(t, k - 1, xi)))
        assert abs(fd - exact) <= 1e-6 * scale
