import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize, special

from pelastica import curves, moduli, network
from pelastica.errors import DomainError
from pelastica.network import MinimizerOptions, ThetaNetwork
from pelastica.pelliptic import complete_E1, complete_K1

CLOSED_FORM_REL = 1e-6
SCALE_REL = 1e-10
FD_REL = 1e-6


@pytest.fixture(scope="module")
def net3() -> ThetaNetwork:
    return network.build_test_network(3.0, 2 * math.pi / 3)


@pytest.fixture(scope="module")
def minimized(net3):
    return network.minimize_network(3.0, 2 * math.pi / 3, net3)


def half_eight(p: float, length: float) -> curves.SampledCurve:
    c = curves.build_figure_eight(p, 1)
    return c.scaled(length / c.length)


class TestTestNetwork:
    def test_invariants(self, net3):
        np.testing.assert_allclose(net3.junction_cosines(), -0.5, atol=network.ANGLE_TOL)
        assert net3.junction_gap() <= network.JUNCTION_TOL * net3.total_length
        assert net3.alpha == 2 * math.pi / 3

    def test_closed_form(self, net3):
        q = math.sin(math.pi / 3)
        rep = network.network_energy(net3, 3.0)
        assert rep.normalized == pytest.approx(network.competitor_energy(3.0, q), rel=CLOSED_FORM_REL)
        assert rep.normalized < network.degenerate_bound(3.0)

    def test_angle_at_p4(self):
        net = network.build_test_network(4.0, 1.0)
        assert net.junction_cosines()[0, 0] == pytest.approx(math.cos(1.0), abs=network.ANGLE_TOL)
        assert net.angle_deviation() < network.ANGLE_TOL

    def test_segment_length(self):
        p, alpha = 4.0, 1.0
        q = math.sin(alpha / 2)
        seg = network.build_test_network(p, alpha).curves[1]
        expected = 2 * (2 * complete_E1(p, q) - complete_K1(p, q))
        assert seg.length == pytest.approx(expected, rel=1e-13)
        assert expected > 0

    def test_reflection_across_x_axis(self, net3):
        first, _, third = net3.curves
        np.testing.assert_allclose(third.xy[:, 1], -first.xy[:, 1], atol=1e-15)

    @pytest.mark.parametrize("alpha", [0.0, math.pi, 2.6])
    def test_window(self, alpha):
        # pi - phi_star(3) is about 2.519
        with pytest.raises(DomainError):
            network.build_test_network(3.0, alpha)

    def test_window_edge_is_excluded(self):
        with pytest.raises(DomainError):
            network.build_test_network(3.0, network.alpha_window(3.0))

    @given(scale=st.floats(1e-3, 1e3))
    def test_scale_invariance(self, net3, scale):
        a = network.network_energy(net3, 3.0).normalized
        b = network.network_energy(net3.scaled(scale), 3.0).normalized
        assert b == pytest.approx(a, rel=SCALE_REL)

    def test_json(self, net3):
        d = json.loads(json.dumps(net3.to_dict(3.0)))
        assert set(d) == {"alpha", "p", "curves", "energy"} and len(d["curves"]) == 3


class TestNetworkValidation:
    def test_degenerate_third_component(self):
        h = half_eight(3.0, 1.0)
        stub = curves.segment(1e-14)
        with pytest.raises(DomainError):
            ThetaNetwork((h, stub, h.reflected()), 2 * math.pi / 3)

    def test_broken_junction(self, net3):
        a, b, c = net3.curves
        with pytest.raises(DomainError):
            ThetaNetwork((a, b.translated((0.1, 0.0)), c), net3.alpha)

    def test_wrong_angle(self, net3):
        with pytest.raises(DomainError):
            ThetaNetwork(net3.curves, net3.alpha + 0.01)

    def test_component_count(self, net3):
        with pytest.raises(DomainError):
            ThetaNetwork(net3.curves[:2], net3.alpha)


class TestCompetitorEnergy:
    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 6.0])
    def test_increasing(self, p):
        for q in np.linspace(0.05, 0.95, 19):
            assert network.competitor_energy_slope(p, q) > 0

    def test_slope_matches_central_difference(self):
        h = 1e-5
        fd = (network.competitor_energy(3.0, 0.6 + h) - network.competitor_energy(3.0, 0.6 - h)) / (2 * h)
        assert network.competitor_energy_slope(3.0, 0.6) == pytest.approx(fd, rel=FD_REL)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 6.0])
    def test_below_bound_iff_q_below_q_star(self, p):
        qs = moduli.q_star(p)
        bound = network.degenerate_bound(p)
        assert network.competitor_energy(p, qs) == pytest.approx(bound, rel=1e-10)
        for q in np.linspace(0.05, 0.99, 40):
            if abs(q - qs) > 1e-6:
                assert (network.competitor_energy(p, q) < bound) == (q < qs)


class TestDegenerateBound:
    def test_classical(self):
        q = optimize.brentq(lambda v: 2 * special.ellipe(v * v) - special.ellipk(v * v), 0.8, 0.95, xtol=1e-15)
        m = q * q
        K, E = special.ellipk(m), special.ellipe(m)
        assert network.degenerate_bound(2.0) == pytest.approx(4 * 2 * K * 8 * (E - (1 - m) * K), rel=1e-10)

    def test_equal_half_eights(self):
        h = half_eight(3.0, 1.0)
        assert network.two_component_energy(h, h.reflected(), 3.0) == pytest.approx(
            network.degenerate_bound(3.0), rel=CLOSED_FORM_REL)

    @pytest.mark.parametrize("ratio", [1.1, 2.0, 5.0])
    def test_unequal_half_eights(self, ratio):
        e = network.two_component_energy(half_eight(3.0, 1.0), half_eight(3.0, ratio), 3.0)
        assert e > network.degenerate_bound(3.0) * (1 + 10 * CLOSED_FORM_REL)


class TestFenchel:
    def test_test_network(self, net3):
        pairs = network.fenchel_check(net3)
        assert len(pairs) == 3
        assert all(pair.satisfied for pair in pairs)

    def test_equality_pairs(self, net3):
        # the half-eights meet the segment at equal external angles and turn monotonically
        by_pair = {pair.pair: pair for pair in network.fenchel_check(net3)}
        for key in ((0, 1), (1, 2)):
            assert by_pair[key].total_curvature == pytest.approx(by_pair[key].bound, abs=1e-9)

    def test_minimized_network(self, minimized):
        assert all(pair.satisfied for pair in network.fenchel_check(minimized.network))


@pytest.fixture(scope="module")
def model_and_x(net3):
    M = 8
    th, L, (delta, eps), _ = network._discretize(net3, M)
    model = network._DiscreteNetwork(3.0, M, delta, eps)
    x = np.concatenate([th[:, 1:M].ravel(), [th[1, M]], np.log(L)])
    return model, x


class TestDiscreteModel:
    def test_gradient(self, model_and_x, rng):
        model, x = model_and_x
        _, g = model.energy_grad(x)
        h = 1e-6
        for i in rng.choice(model.size(), 10, replace=False):
            e = np.zeros(model.size())
            e[i] = h
            fd = (model.energy(x + e) - model.energy(x - e)) / (2 * h)
            assert g[i] == pytest.approx(fd, rel=FD_REL, abs=FD_REL * np.abs(g).max())

    def test_constraint_jacobian(self, model_and_x):
        model, x = model_and_x
        _, J = model.constraints(x)
        h = 1e-6
        fd = np.empty_like(J)
        for i in range(model.size()):
            e = np.zeros(model.size())
            e[i] = h
            fd[:, i] = (model.constraints(x + e)[0] - model.constraints(x - e)[0]) / (2 * h)
        np.testing.assert_allclose(J, fd, atol=1e-8)

    def test_restore_closes_chords(self, model_and_x, rng):
        model, x = model_and_x
        y = model.restore(x + 1e-3 * rng.standard_normal(model.size()), 1e-13)
        assert y is not None
        assert np.linalg.norm(model.constraints(y)[0]) < 1e-12


class TestMinimizer:
    def test_descent(self, minimized):
        hist = np.asarray(minimized.history)
        assert np.all(np.diff(hist) <= 0)
        assert minimized.energy <= minimized.initial_energy

    def test_stays_below_bound(self, minimized):
        assert minimized.energy < network.degenerate_bound(3.0)
        assert not minimized.collapsed
        assert minimized.min_length_fraction > MinimizerOptions().length_floor

    def test_output_network_is_valid(self, minimized):
        net = minimized.network
        assert net.angle_deviation() < network.ANGLE_TOL
        rep = network.network_energy(net, 3.0)
        # piecewise constant curvature: trapezoid error only at the cell joints
        assert rep.normalized == pytest.approx(minimized.energy, rel=1e-3)

    def test_result_json(self, minimized):
        d = json.loads(json.dumps(minimized.to_dict(3.0)))
        assert d["converged"] == minimized.converged
        assert len(d["history"]) == len(minimized.history)

    def test_deterministic(self, net3, minimized):
        again = network.minimize_network(3.0, 2 * math.pi / 3, net3)
        assert again.history == minimized.history

    def test_bad_inputs(self, net3):
        with pytest.raises(DomainError):
            network.minimize_network(3.0, 1.0, net3)
        with pytest.raises(DomainError):
            network.minimize_network(3.0, 2.6, net3)
        with pytest.raises(DomainError):
            MinimizerOptions(cells=2)
