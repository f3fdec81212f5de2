import numpy as np
import pytest
from scipy import integrate

from gsfmkit import specfun


class TestFresnel:
    def test_zero(self):
        c, s = specfun.fresnel(0.0)
        assert c == 0.0 and s == 0.0

    def test_asymptote(self):
        c, s = specfun.fresnel(10.0)
        assert abs(c - 0.5) < 0.04
        assert abs(s - 0.5) < 0.04

    def test_s_at_one_vs_quadrature(self):
        oracle, _ = integrate.quad(lambda u: np.sin(np.pi * u**2 / 2), 0.0, 1.0)
        _, s = specfun.fresnel(1.0)
        assert abs(s - oracle) < 1e-12
        assert abs(s - 0.4383) < 5e-4

    def test_odd_symmetry(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(-5.0, 5.0, size=50)
        cp, sp = specfun.fresnel(x)
        cn, sn = specfun.fresnel(-x)
        assert np.allclose(cp, -cn, atol=1e-14)
        assert np.allclose(sp, -sn, atol=1e-14)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            specfun.fresnel(np.nan)


class TestGenFresnel:
    def test_a_one_is_elementary(self):
        c, s = specfun.gen_fresnel(np.pi, 1.0)
        assert abs(s - 2.0) < 1e-12  # 1 - cos(pi)
        c2, _ = specfun.gen_fresnel(np.pi / 2, 1.0)
        assert abs(c2 - 1.0) < 1e-12  # sin(pi/2)

    def test_a_one_matches_elementary_over_range(self):
        for x in np.linspace(0.0, 10.0, 23):
            c, s = specfun.gen_fresnel(x, 1.0)
            assert abs(c - np.sin(x)) < 1e-10
            assert abs(s - (1.0 - np.cos(x))) < 1e-10

    def test_zero(self):
        assert specfun.gen_fresnel(0.0, 0.5) == (0.0, 0.0)

    def test_half_power_vs_substitution_oracle(self):
        # u = v^2 removes the endpoint singularity exactly
        oracle, _ = integrate.quad(lambda v: 2.0 * np.sin(v**2), 0.0, np.sqrt(2.0))
        _, s = specfun.gen_fresnel(2.0, 0.5)
        assert abs(s - oracle) < 1e-9

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            specfun.gen_fresnel(-1.0, 0.5)
        with pytest.raises(ValueError):
            specfun.gen_fresnel(1.0, 0.0)
        with pytest.raises(ValueError):
            specfun.gen_fresnel(1.0, 1.5)

    def test_phase_derivative_consistency(self):
        # d/dx S{2 pi a x^rho, 1/rho} * K / (2 pi) must equal the sine IF law
        df, a, rho = 200.0, 80.0, 2.0
        kk = np.pi * df / (rho * (2 * np.pi * a) ** (1.0 / rho))

        def phase(x):
            _, s = specfun.gen_fresnel(2 * np.pi * a * x**rho, 1.0 / rho)
            return kk * s

        h = 1e-6
        for x in (0.05, 0.11, 0.2):
            deriv = (phase(x + h) - phase(x - h)) / (2 * h) / (2 * np.pi)
            want = (df / 2.0) * np.sin(2 * np.pi * a * x**rho)
            assert abs(deriv - want) / abs(want) < 1e-5


class TestBessel:
    def test_trivia(self):
        assert specfun.bessel_j(0, 0.0) == 1.0
        assert specfun.bessel_j(1, 0.0) == 0.0
        assert abs(specfun.bessel_j(0, 2.4048)) < 1e-4

    def test_negative_order_symmetry(self):
        for n in (1, 2, 5):
            x = 3.7
            assert np.isclose(
                specfun.bessel_j(-n, x), (-1.0) ** n * specfun.bessel_j(n, x)
            )

    def test_power_series_oracle(self):
        x = 1.8

        import math

        def series(n, x, terms=40):
            out = 0.0
            for k in range(terms):
                out += (-1) ** k / (
                    math.factorial(k) * math.factorial(k + n)
                ) * (x / 2.0) ** (2 * k + n)
            return out

        for n in (0, 1, 3):
            assert abs(specfun.bessel_j(n, x) - series(n, x)) < 1e-12


class TestGbf:
    def test_single_sine_reduces_to_bessel(self):
        for x in (0.5, 3.0, 10.0):
            args = specfun.GbfArgs(a=[x], b=[0.0])
            for n in range(-20, 21):
                want = specfun.bessel_j(n, x)
                assert abs(specfun.gbf_mixed(n, args) - want) < 1e-8

    def test_all_zero_arguments(self):
        args = specfun.GbfArgs(a=[0.0, 0.0], b=[0.0, 0.0])
        assert abs(specfun.gbf_mixed(0, args) - 1.0) < 1e-12
        assert abs(specfun.gbf_mixed(3, args)) < 1e-12

    def test_parseval(self):
        args = specfun.GbfArgs(a=[1.3, 0.4, 0.1], b=[0.7, 0.2, 0.05])
        _, coeffs = specfun.gbf_mixed_all(args)
        assert abs(np.sum(np.abs(coeffs) ** 2) - 1.0) < 1e-10

    def test_mixed_vs_quadrature(self):
        args = specfun.GbfArgs(a=[1.1, 0.3], b=[0.6, 0.2])

        def integrand(th):
            ph = (
                1.1 * np.sin(2 * np.pi * th)
                + 0.3 * np.sin(4 * np.pi * th)
                - 0.6 * np.cos(2 * np.pi * th)
                - 0.2 * np.cos(4 * np.pi * th)
            )
            return np.exp(1j * ph)

        for n in (-2, 0, 1, 4):
            re, _ = integrate.quad(
                lambda t: (integrand(t) * np.exp(-2j * np.pi * n * t)).real, 0, 1
            )
            im, _ = integrate.quad(
                lambda t: (integrand(t) * np.exp(-2j * np.pi * n * t)).imag, 0, 1
            )
            assert abs(specfun.gbf_mixed(n, args) - (re + 1j * im)) < 1e-9

    def test_order_beyond_grid_rejected(self):
        args = specfun.GbfArgs(a=[0.1], b=[0.0])
        with pytest.raises(ValueError):
            specfun.gbf_mixed(10_000, args)

    def test_truncation_helper(self):
        a = np.array([1.0, 1e-3, 1e-12, 1e-13])
        b = np.zeros(4)
        args = specfun.truncate_harmonics(a, b)
        assert args.order == 2
