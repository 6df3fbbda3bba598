import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize, special

from pelastica import moduli
from pelastica.errors import DomainError, NoSolutionError
from pelastica.pelliptic import complete_K1

RESIDUAL_TOL = 1e-9
CLASSICAL_TOL = 1e-10
LAYER_PS = [1.2, 1.5728, 2.0, 3.0, 8.0]


def classical_Q(q: float) -> float:
    m = q * q
    return 2 * special.ellipe(m) / special.ellipk(m) - 1


class TestQ:
    @pytest.mark.parametrize("p", [1.3, 2.0, 6.0])
    def test_one_at_zero(self, p):
        assert moduli.Q(p, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_limit_at_q1(self):
        # exact limit value at q = 1 for p > 2
        assert moduli.Q(4.0, 1.0) == pytest.approx(-1.0 / 3.0, rel=1e-13)
        assert moduli.Q(4.0, moduli.Q_CAP) == pytest.approx(-1.0 / 3.0, abs=1e-3)

    def test_near_q1_matches_mpmath(self):
        # 40-digit mpmath quadrature; the approach to -1/3 is a fourth-root law
        assert moduli.Q(4.0, 1 - 1e-8) == pytest.approx(-0.32817038461769976, rel=1e-9)

    def test_pole_below_two(self):
        with pytest.raises(DomainError):
            moduli.Q(2.0, 1.0)
        with pytest.raises(DomainError):
            moduli.Q_tilde(1.5, 1.0)

    def test_classical_root(self):
        assert abs(moduli.Q(2.0, 0.9089)) < 1e-3
        q = optimize.brentq(classical_Q, 0.8, 0.95, xtol=1e-15)
        assert moduli.Q(2.0, q) == pytest.approx(0.0, abs=1e-12)

    def test_classical_values(self):
        for q in (0.1, 0.5, 0.9, 0.999):
            assert moduli.Q(2.0, q) == pytest.approx(classical_Q(q), abs=CLASSICAL_TOL)

    @pytest.mark.parametrize("p", [1.5, 2.0, 5.0])
    def test_strictly_decreasing(self, p):
        q = np.linspace(0.0, 0.999, 80)
        vals = np.array([moduli.Q(p, v) for v in q])
        assert np.all(np.diff(vals) < 0)

    def test_layering(self):
        for p1, p2 in zip(LAYER_PS, LAYER_PS[1:]):
            for q in np.arange(1, 10) / 10:
                assert moduli.Q(p1, q) < moduli.Q(p2, q)


class TestQTilde:
    def test_equals_k_at_zero(self):
        for p in (1.4, 3.0):
            assert moduli.Q_tilde(p, 0.0) == pytest.approx(complete_K1(p, 0.0), rel=1e-14)

    def test_value_at_q1(self):
        assert moduli.Q_tilde(5.0, 1.0) == pytest.approx(-complete_K1(5.0, 1.0) / 4.0, rel=1e-13)

    def test_decreasing_and_concave(self):
        q = np.linspace(0.02, 0.98, 49)
        vals = np.array([moduli.Q_tilde(3.0, v) for v in q])
        assert np.all(np.diff(vals) < 0)
        assert np.all(np.diff(vals, 2) < 0)


class TestQStar:
    def test_classical(self):
        q = optimize.brentq(lambda v: 2 * special.ellipe(v * v) - special.ellipk(v * v), 0.8, 0.95, xtol=1e-15)
        assert moduli.q_star(2.0) == pytest.approx(q, abs=1e-12)
        assert moduli.q_star(2.0) == pytest.approx(0.908909, abs=1e-6)

    @pytest.mark.parametrize("p", [1.1, 1.5728, 2.0, 4.0, 20.0])
    def test_bracket_and_residual(self, p):
        qs = moduli.q_star(p)
        assert 1 / math.sqrt(2) < qs < 1
        assert abs(moduli.Q_tilde(p, qs)) < 1e-10

    def test_increasing_in_p(self):
        ps = np.geomspace(1.05, 40, 25)
        vals = [moduli.q_star(p) for p in ps]
        assert np.all(np.diff(vals) > 0)


class TestPhiStar:
    def test_range_and_monotone(self):
        ps = np.geomspace(1.05, 50, 50)
        vals = np.array([moduli.phi_star(p) for p in ps])
        assert np.all((vals > 0) & (vals < math.pi / 2))
        assert np.all(np.diff(vals) < 0)

    def test_limits(self):
        assert abs(moduli.phi_star(1.01) - math.pi / 2) < 0.15
        assert moduli.phi_star(100.0) < 0.2


class TestArcLoopModuli:
    def test_r_zero_gives_q_star(self):
        assert moduli.solve_arc_modulus(3.0, 0.0) == moduli.q_star(3.0)
        assert moduli.solve_loop_modulus(1.5, 0.0) == moduli.q_star(1.5)

    def test_classical_arc(self):
        q = optimize.brentq(lambda v: classical_Q(v) - 0.5, 0.05, 0.9, xtol=1e-15)
        assert moduli.solve_arc_modulus(2.0, 0.5) == pytest.approx(q, abs=1e-11)

    def test_classical_loop(self):
        q = optimize.brentq(lambda v: classical_Q(v) + 0.3, 0.9, 1 - 1e-9, xtol=1e-15)
        assert moduli.solve_loop_modulus(2.0, 0.3) == pytest.approx(q, abs=1e-11)

    def test_arc_monotone_in_r(self):
        r = np.linspace(0.0, 0.95, 12)
        q = [moduli.solve_arc_modulus(4.0, v) for v in r]
        assert np.all(np.diff(q) < 0)

    def test_loop_window(self):
        with pytest.raises(NoSolutionError):
            moduli.solve_loop_modulus(4.0, 0.4)
        assert moduli.loop_window(4.0) == pytest.approx(1 / 3)
        assert moduli.loop_window(1.5) == 1.0

    def test_loop_beyond_cap(self):
        # for p <= 2 the loop modulus approaches 1 very fast as r -> 1
        with pytest.raises(NoSolutionError):
            moduli.solve_loop_modulus(1.5, 0.999999)

    @given(p=st.floats(1.1, 8.0), frac=st.floats(0.0, 0.95))
    def test_residuals_and_ordering(self, p, frac):
        r = frac * min(1.0, 1.0 / (p - 1.0))
        qa = moduli.solve_arc_modulus(p, r)
        assert abs(moduli.Q(p, qa) - r) < RESIDUAL_TOL
        try:
            ql = moduli.solve_loop_modulus(p, r)
        except NoSolutionError:
            return
        assert abs(moduli.Q(p, ql) + r) < RESIDUAL_TOL
        assert qa <= moduli.q_star(p) <= ql

    @pytest.mark.parametrize("r", [-0.1, 1.0, 1.5])
    def test_bad_ratio(self, r):
        with pytest.raises(DomainError):
            moduli.solve_arc_modulus(3.0, r)


class TestSpecialExponents:
    def test_p3(self, p3):
        assert p3.p_value == pytest.approx(1.5728, abs=5e-4)
        assert moduli.phi_star(p3.p_value) == pytest.approx(math.pi / 3, abs=1e-9)
        assert p3.angle_fraction == Fraction(1, 3)
        assert float(p3) == p3.p_value

    def test_p5_values(self, p5):
        p52 = moduli.p_mn(5, 2)
        assert p52.p_value < p5.p_value
        assert moduli.phi_star(p52.p_value) == pytest.approx(2 * math.pi / 5, abs=1e-9)

    def test_p7_residual(self):
        assert moduli.phi_star(moduli.p_mn(7, 1).p_value) == pytest.approx(math.pi / 7, abs=1e-9)

    @pytest.mark.parametrize("m,n", [(4, 1), (3, 2), (5, 0), (1, 1), (5, 3)])
    def test_invalid_indices(self, m, n):
        with pytest.raises(DomainError):
            moduli.p_mn(m, n)

    def test_angle_fraction(self, p3):
        assert moduli.angle_fraction(p3) == Fraction(1, 3)
        assert moduli.angle_fraction(p3.p_value) == Fraction(1, 3)


class TestSecondDerivativeAtZero:
    def test_formula(self):
        assert moduli.qpp_at_zero(2.0) == -2.0
        assert moduli.qpp_at_zero(1.5) < moduli.qpp_at_zero(4.0)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_five_point_stencil(self, p):
        # Q is even in q, so the stencil uses values at |q|
        h = 1e-3
        f = [moduli.Q(p, abs(k * h)) for k in (-2, -1, 0, 1, 2)]
        fd = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        assert fd == pytest.approx(moduli.qpp_at_zero(p), abs=1e-3)
