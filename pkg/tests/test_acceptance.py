"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The lines are collected and printed in a dedicated section of the pytest
terminal summary (see ``conftest.py``).
"""
import math
import time

import numpy as np
from scipy import special

from pelastica import curves, energy, liyau, moduli, network
from pelastica import pelliptic as pe
from pelastica.classify import PinnedProblem, classify
from perturb import bump

P3_RANGE = (1.5723, 1.5733)
CLASSICAL_TOL = 1e-9
FD_REL = 1e-6
FD_STEP = 1e-5
QPP_TOL = 1e-3
ENERGY_REL = 1e-6
NATURAL_BC = 1e-8
EQUALITY_REL = 1e-6
JUNCTION_TOL = 1e-8
RESIDUAL_RATIO = 10.0
SEED = 20240611


def test_01_p3_constant(verdict):
    t0 = time.perf_counter()
    p = moduli.p_mn(3, 1).p_value
    elapsed = time.perf_counter() - t0
    ok = P3_RANGE[0] <= p <= P3_RANGE[1] and elapsed < 5.0
    assert verdict(1, "p3 constant", ok, f"p3 = {p:.13f}, {elapsed:.2f} s")


def test_02_classical_reduction(verdict):
    # 5 moduli x 25 arguments = 125 grid points, every function checked at each
    t0 = time.perf_counter()
    qs = np.array([0.0, 0.3, 0.6, 0.9, 0.99])
    xs = np.linspace(-7.0, 7.0, 25)
    worst = 0.0
    for q in qs:
        m = q * q
        sn, cn, dn, ph = special.ellipj(xs, m)
        F, E = special.ellipkinc(xs, m), special.ellipeinc(xs, m)
        pairs = [
            (pe.incomplete_F1(2, q, xs), F), (pe.incomplete_F2(2, q, xs), F),
            (pe.incomplete_E1(2, q, xs), E), (pe.incomplete_E2(2, q, xs), E),
            (pe.am1(2, q, xs), ph), (pe.am2(2, q, xs), ph),
            (pe.sn_p(2, q, xs), sn), (pe.cn_p(2, q, xs), cn), (pe.dn_p(2, q, xs), dn),
            (pe.complete_K1(2, q), special.ellipk(m)), (pe.complete_K2(2, q), special.ellipk(m)),
            (pe.complete_E1(2, q), special.ellipe(m)), (pe.complete_E2(2, q), special.ellipe(m)),
        ]
        worst = max(worst, max(float(np.max(np.abs(np.asarray(a) - b))) for a, b in pairs))
    worst = max(worst, float(np.max(np.abs(pe.sech_p(2, xs) - 1 / np.cosh(xs)))),
                float(np.max(np.abs(pe.tanh_p(2, xs) - np.tanh(xs)))))
    elapsed = time.perf_counter() - t0
    ok = worst < CLASSICAL_TOL and elapsed < 30.0
    assert verdict(2, "classical reduction at p = 2", ok, f"max error {worst:.2e}, {elapsed:.2f} s")


def test_03_derivative_identities(verdict):
    worst = 0.0
    for p in (1.3, 2.0, 3.0, 8.0):
        for q in np.linspace(0.05, 0.95, 19):
            for f, df in ((pe.complete_K1, pe.dK1_dq), (pe.complete_E1, pe.dE1_dq), (energy.b_of_q, energy.db_dq)):
                fd = (f(p, q + FD_STEP) - f(p, q - FD_STEP)) / (2 * FD_STEP)
                worst = max(worst, abs(df(p, q) / fd - 1.0))
    assert verdict(3, "derivative identities", worst < FD_REL, f"max relative deviation {worst:.2e}")


def test_04_second_derivative_at_zero(verdict):
    h = 1e-3
    worst = 0.0
    for p in (1.5, 2.0, 3.0):
        # Q is even in q; the five-point stencil uses |q|
        f = [moduli.Q(p, abs(k * h)) for k in (-2, -1, 0, 1, 2)]
        fd = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        worst = max(worst, abs(fd - 4 * p / (2 - 3 * p)))
    assert verdict(4, "second difference of Q at q = 0", worst < QPP_TOL, f"max error {worst:.2e}")


def test_05_energy_closed_forms(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for p in (1.5, 3.0, 5.0):
        for r in (0.0, 0.15, 0.5):
            for n in (1, 2):
                c = curves.build_arc(p, r, n)
                worst = max(worst, abs(energy.bending_quadrature(c, p).normalized / energy.normalized_energy_wave(p, r, n) - 1))
                if r < moduli.loop_window(p):
                    lp = curves.build_loop(p, r, n)
                    cf = energy.normalized_energy_wave(p, r, n, "loop")
                    worst = max(worst, abs(energy.bending_quadrature(lp, p).normalized / cf - 1))
    p, r = 4.0, 0.4
    total = curves.flatcore_segment_total(p, r, 2)
    spec = curves.FlatCoreSpec(p, r, 2, (1, -1), (0.2 * total, 0.5 * total, 0.3 * total))
    flat = curves.build_flatcore(spec)
    worst = max(worst, abs(energy.bending_quadrature(flat, p).normalized / energy.normalized_energy_flat(p, r, 2) - 1))
    elapsed = time.perf_counter() - t0
    ok = worst < ENERGY_REL and elapsed < 60.0
    assert verdict(5, "energy closed forms vs quadrature", ok, f"max relative error {worst:.2e}, {elapsed:.2f} s")


def test_06_minimizer_ordering(verdict):
    rng = np.random.default_rng(SEED)
    failures = []
    for p, r in zip(rng.uniform(1.2, 6.0, 20), rng.uniform(0.0, 0.9, 20)):
        rep = classify(PinnedProblem.from_ratio(float(p), float(r)), n_max=3)
        arc1 = next(f for f in rep.families if f.kind == "arc" and f.n == 1)
        if not all(arc1.energy < f.energy for f in rep.families if f is not arc1):
            failures.append((p, r))
    assert verdict(6, "arc n = 1 is the strict minimizer", not failures, f"{20 - len(failures)}/20 problems")


def test_07_natural_boundary_condition(verdict):
    made = [curves.build_arc(p, r, n) for p in (1.5, 2.0, 4.0) for r in (0.1, 0.6) for n in (1, 3)]
    made += [curves.build_loop(p, 0.1, n) for p in (1.5, 3.0) for n in (1, 2)]
    made += [curves.build_figure_eight(p, n) for p in (1.2, 2.0, 10.0) for n in (1, 2)]
    total = curves.flatcore_segment_total(5.0, 0.5, 2)
    made.append(curves.build_flatcore(curves.FlatCoreSpec(5.0, 0.5, 2, (1, 1), (0.1 * total, 0.6 * total, 0.3 * total))))
    worst = max(max(abs(c.k[0]), abs(c.k[-1])) / np.abs(c.k).max() for c in made)
    assert verdict(7, "natural boundary condition", worst < NATURAL_BC, f"{len(made)} curves, max ratio {worst:.2e}")


def test_08_liyau_equality_and_rigidity(verdict):
    p3, p5 = moduli.p_mn(3, 1), moduli.p_mn(5, 1)
    witnesses = [(3.0, 2), (3.0, 4), (p3, 3), (p3, 5), (p5, 5)]
    worst_eq = 0.0
    for p, m in witnesses:
        c = curves.build_leafed(p, curves.leaf_tuple(p, m))
        chk = liyau.check_curve(c, float(p))
        worst_eq = max(worst_eq, abs(chk.gap) if chk.multiplicity == m else math.inf)
    rng = np.random.default_rng(SEED)
    strict = 0
    for k in range(50):
        p, m = witnesses[k % len(witnesses)]
        tup = curves.leaf_tuple(p, m)
        if k % 2 == 0:
            lengths = rng.uniform(0.6, 1.6, m)
            c = curves.build_leafed(p, tup, lengths, 1025)
        else:
            pieces = curves.leaf_pieces(p, tup, 1.0, 1025)
            i = int(rng.integers(m))
            pieces[i] = bump(pieces[i], float(rng.uniform(0.005, 0.03)), int(rng.integers(2, 5)))
            c = curves.concat(pieces)
        chk = liyau.check_curve(c, float(p))
        strict += chk.multiplicity == m and chk.gap > 0
    ok = worst_eq < EQUALITY_REL and strict == 50
    assert verdict(8, "Li-Yau equality and rigidity", ok, f"max equality gap {worst_eq:.2e}, {strict}/50 strict")


def test_09_thresholding(verdict):
    table = liyau.thresholding_table(5, 11)
    got = {row["m"] for row in table.rows if row["attainable"]}
    expected = {m for m in range(2, 12) if m % 2 == 0 or m >= 5}
    assert verdict(9, "thresholding at p5", got == expected, f"attainable m = {sorted(got)}")


def test_10_angle_monotonicity(verdict):
    ps = np.linspace(1.05, 50.0, 50)
    vals = np.array([moduli.phi_star(p) for p in ps])
    ok = bool(np.all(np.diff(vals) < 0)) and abs(moduli.phi_star(1.01) - math.pi / 2) < 0.15 and moduli.phi_star(100.0) < 0.2
    assert verdict(10, "phi_star decreasing with limits", ok,
                   f"phi*(1.01) = {moduli.phi_star(1.01):.4f}, phi*(100) = {moduli.phi_star(100.0):.4f}")


def test_11_network_competitor(verdict):
    net = network.build_test_network(3.0, 2 * math.pi / 3)
    e = network.network_energy(net, 3.0).normalized
    cf = network.competitor_energy(3.0, math.sin(math.pi / 3))
    bound = network.degenerate_bound(3.0)
    ok = (net.angle_deviation() < JUNCTION_TOL and net.junction_gap() <= JUNCTION_TOL * net.total_length
          and abs(e / cf - 1) < ENERGY_REL and e < bound)
    assert verdict(11, "network competitor", ok, f"energy {e:.6f}, closed form {cf:.6f}, bound {bound:.6f}")


def test_12_first_variation(verdict):
    arc = curves.build_arc(3.0, 0.2, 1)
    base = energy.first_variation_residual(arc, 3.0)[1]
    bent = energy.first_variation_residual(bump(arc, 0.01, 3), 3.0)[1]
    assert verdict(12, "first-variation residual", bent > RESIDUAL_RATIO * base, f"{base:.2e} vs {bent:.2e}")


def test_13_q_layering(verdict):
    ps = [1.2, 1.5728, 2.0, 3.0, 8.0]
    grid = np.linspace(0.05, 0.99, 20)
    ok = all(moduli.Q(a, q) < moduli.Q(b, q) for i, a in enumerate(ps) for b in ps[i + 1:] for q in grid)
    assert verdict(13, "Q layering in p", ok, f"{len(ps) * (len(ps) - 1) // 2} pairs x {len(grid)} moduli")
