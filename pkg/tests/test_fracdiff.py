import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammainc

from mixwave import (
    ScalarDiffusiveState,
    build_diffusive_grid,
    caputo_exponential_analytic,
    diffusive_derivative_series,
    diffusive_output,
    step_scalar_modes,
)


class TestAnalyticOracle:
    def test_identity_half_order(self):
        # f(t) = t, alpha = 1/2, eta = 0: value t^{1/2} / Gamma(3/2) = 2 sqrt(t/pi)
        assert caputo_exponential_analytic("identity", 0.5, 0.0, 1.0) == pytest.approx(
            2.0 / math.sqrt(math.pi), rel=1e-12
        )

    def test_identity_vanishes_at_zero(self):
        # value ~ t^(1-alpha): exactly 0 at t = 0 and decreasing to 0 with t
        for alpha in (0.2, 0.5, 0.8):
            assert caputo_exponential_analytic("identity", alpha, 0.0, 0.0) == 0.0
            values = [
                caputo_exponential_analytic("identity", alpha, 0.0, t)
                for t in (1.0, 1e-2, 1e-6, 1e-12)
            ]
            assert all(a > b > 0 for a, b in zip(values, values[1:]))
            assert values[-1] < 1e-2 * values[0]

    def test_quadratic_half_order(self):
        # f(t) = t^2: value 2 t^{3/2} / Gamma(5/2)
        assert caputo_exponential_analytic("quadratic", 0.5, 0.0, 1.0) == pytest.approx(
            2.0 / math.gamma(2.5), rel=1e-12
        )
        assert caputo_exponential_analytic("quadratic", 0.5, 0.0, 1.0) == pytest.approx(
            1.5045055561273500, rel=1e-10
        )

    @pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
    @pytest.mark.parametrize("eta", [0.5, 2.0])
    def test_quadratic_weighted_quadrature_against_incomplete_gamma(self, alpha, eta):
        # independent closed form via lower incomplete gamma:
        #   2 t P(1-a, eta t) eta^(a-1) - 2 (1-a) P(2-a, eta t) eta^(a-2)
        t = 1.3
        expected = 2 * t * gammainc(1 - alpha, eta * t) * eta ** (alpha - 1) - 2 * (
            1 - alpha
        ) * gammainc(2 - alpha, eta * t) * eta ** (alpha - 2)
        got = caputo_exponential_analytic("quadratic", alpha, eta, t)
        assert got == pytest.approx(expected, abs=1e-11)

    @pytest.mark.parametrize("alpha,eta,t", [(0.5, 0.0, 1.0), (0.3, 1.5, 0.8), (0.7, 0.2, 2.0)])
    def test_exponential_against_high_precision_quadrature(self, alpha, eta, t):
        import mpmath as mp

        mp.mp.dps = 30
        ref = mp.quad(
            lambda tau: tau ** (-alpha) * mp.e ** (-eta * tau) * (-mp.e ** (-(t - tau))),
            [0, t],
        ) / mp.gamma(1 - alpha)
        got = caputo_exponential_analytic("exponential", alpha, eta, t)
        assert got == pytest.approx(float(ref), abs=1e-10)

    def test_identity_weighted_matches_quadrature_route(self):
        # closed incomplete-gamma form vs the generic QAWS integral
        from scipy.integrate import quad

        alpha, eta, t = 0.6, 0.7, 1.9
        raw, _ = quad(
            lambda tau: np.exp(-eta * tau), 0, t, weight="alg", wvar=(-alpha, 0.0),
            epsabs=1e-13, epsrel=1e-13,
        )
        assert caputo_exponential_analytic("identity", alpha, eta, t) == pytest.approx(
            raw / math.gamma(1 - alpha), abs=1e-12
        )

    def test_unsupported_tag_rejected(self):
        with pytest.raises(ValueError, match="unsupported"):
            caputo_exponential_analytic("cubic", 0.5, 0.0, 1.0)

    def test_domain_violations(self):
        with pytest.raises(ValueError):
            caputo_exponential_analytic("identity", 1.5, 0.0, 1.0)
        with pytest.raises(ValueError):
            caputo_exponential_analytic("identity", 0.5, -1.0, 1.0)
        with pytest.raises(ValueError):
            caputo_exponential_analytic("identity", 0.5, 0.0, -1.0)


class TestModeStepping:
    def test_rest_state_stays_at_rest(self):
        d = build_diffusive_grid(0.5, 4, 0.5)
        s = ScalarDiffusiveState.at_rest(d)
        s = step_scalar_modes(s, 0.0, 0.1)
        assert np.all(s.phi == 0.0)
        assert s.t == pytest.approx(0.1)

    def test_hand_evaluated_update(self):
        # 1 mode, xi=1, eta=0, mu=1, dt=2, phi=0, drive 1: (0 + 2*2*1*1)/(2+2) = 1
        d = build_diffusive_grid(0.5, 1, 1.0)
        s = ScalarDiffusiveState.at_rest(d, eta=0.0)
        s = step_scalar_modes(s, 1.0, 2.0)
        assert s.phi == pytest.approx([1.0])

    @settings(max_examples=50, deadline=None)
    @given(
        alpha=st.floats(0.05, 0.95),
        eta=st.floats(0.0, 5.0),
        dt=st.floats(1e-4, 10.0),
        drive0=st.floats(-3.0, 3.0),
    )
    def test_unforced_modes_never_grow(self, alpha, eta, dt, drive0):
        d = build_diffusive_grid(alpha, 6, 0.7)
        s = ScalarDiffusiveState.at_rest(d, eta=eta)
        s = step_scalar_modes(s, drive0, dt)
        prev = np.abs(s.phi)
        for _ in range(4):
            s = step_scalar_modes(s, 0.0, dt)
            cur = np.abs(s.phi)
            assert np.all(cur <= prev + 1e-15)
            prev = cur

    def test_unforced_decay_is_geometric(self):
        d = build_diffusive_grid(0.3, 3, 1.0)
        eta, dt = 0.5, 0.05
        s = ScalarDiffusiveState.at_rest(d, eta=eta)
        s = step_scalar_modes(s, 1.0, dt)
        ratios = (2 - dt * (d.xi**2 + eta)) / (2 + dt * (d.xi**2 + eta))
        phi0 = s.phi.copy()
        for n in range(1, 4):
            s = step_scalar_modes(s, 0.0, dt)
            assert s.phi == pytest.approx(phi0 * ratios**n, rel=1e-13)


class TestDiffusiveOutput:
    def test_zero_modes_zero_output(self):
        d = build_diffusive_grid(0.5, 5, 0.2)
        assert diffusive_output(ScalarDiffusiveState.at_rest(d)) == 0.0

    def test_single_mode_arithmetic(self):
        d = build_diffusive_grid(0.5, 1, 1.0)  # prefactor 1/pi, mu=1
        s = ScalarDiffusiveState(grid=d, phi=np.array([np.pi]), t=0.0, eta=0.0)
        assert diffusive_output(s) == pytest.approx(2.0)

    def test_driven_identity_converges_to_analytic(self):
        d = build_diffusive_grid(0.5, 4000, 0.05)
        times, outs = diffusive_derivative_series("identity", d, 0.0, 1e-3, 1.0, sample_every=1000)
        exact = caputo_exponential_analytic("identity", 0.5, 0.0, 1.0)
        assert abs(outs[-1] - exact) / exact < 0.05

    def test_refinement_reduces_error_monotonically(self):
        exact = caputo_exponential_analytic("identity", 0.5, 0.0, 1.0)
        errors = []
        for n_modes, dxi in [(1000, 0.1), (4000, 0.05), (16000, 0.025)]:
            d = build_diffusive_grid(0.5, n_modes, dxi)
            _, outs = diffusive_derivative_series("identity", d, 0.0, 1e-3, 1.0, sample_every=1000)
            errors.append(abs(outs[-1] - exact) / exact)
        # monotone within a 10% noise margin
        assert errors[1] <= errors[0] * 1.1
        assert errors[2] <= errors[1] * 1.1

    def test_constant_input_is_annihilated(self):
        # the operator depends on f' only: constant f drives nothing
        d = build_diffusive_grid(0.4, 100, 0.1)
        s = ScalarDiffusiveState.at_rest(d, eta=0.3)
        for _ in range(50):
            s = step_scalar_modes(s, 0.0, 0.01)
            assert diffusive_output(s) == 0.0
