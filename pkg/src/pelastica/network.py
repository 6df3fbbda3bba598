"""Theta-networks: three curves joined at two triple junctions.

The junction angles are (alpha, alpha, 2 pi - 2 alpha). The module builds the
explicit wavelike competitor, evaluates network energies, compares them with
the energy of degenerate two-component limits, and runs a discrete
constrained descent.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import moduli
from ._quadrature import Tolerance
from .curves import SampledCurve, segment, wavelike
from .energy import EnergyReport, b_of_q, bending_quadrature, db_dq, varpi_star
from .errors import DomainError
from .pelliptic import complete_E1, complete_K1, dE1_dq, dK1_dq

JUNCTION_TOL = 1e-8
ANGLE_TOL = 1e-8
_DEGENERATE = 1e-12


def _end_tangents(c: SampledCurve) -> tuple[np.ndarray, np.ndarray]:
    t = c.tangent
    return t[0], t[-1]


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < math.pi:
        raise DomainError(f"alpha must lie in (0, pi), got {alpha}")


@dataclass(frozen=True, eq=False)
class ThetaNetwork:
    """Three curves sharing both endpoints with junction angles (alpha, alpha, 2 pi - 2 alpha)."""

    curves: tuple
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        if len(self.curves) != 3 or not all(isinstance(c, SampledCurve) for c in self.curves):
            raise DomainError("a Theta-network has exactly three SampledCurve components")
        _check_alpha(self.alpha)
        scale = self.total_length
        if min(c.length for c in self.curves) <= _DEGENERATE * scale:
            raise DomainError("degenerate component: zero length")
        gap = self.junction_gap()
        if gap > JUNCTION_TOL * scale:
            raise DomainError(f"components do not share both endpoints (gap {gap:.3e})")
        dev = self.angle_deviation()
        if dev > ANGLE_TOL:
            raise DomainError(f"junction angle condition violated by {dev:.3e}")

    @property
    def total_length(self) -> float:
        return float(sum(c.length for c in self.curves))

    def junction_gap(self) -> float:
        """Largest distance between corresponding endpoints of different components."""
        starts = np.array([c.start for c in self.curves])
        ends = np.array([c.end for c in self.curves])
        return float(max(np.ptp(starts, axis=0).max(), np.ptp(ends, axis=0).max()))

    def junction_cosines(self) -> np.ndarray:
        """Rows (start, end) of <t_j, t_{j+1}> for j = 1, 2, 3 (cyclic)."""
        out = np.empty((2, 3))
        tans = [_end_tangents(c) for c in self.curves]
        for end in (0, 1):
            for j in range(3):
                out[end, j] = float(tans[j][end] @ tans[(j + 1) % 3][end])
        return out

    def angle_deviation(self) -> float:
        a = self.alpha
        target = np.array([math.cos(a), math.cos(a), math.cos(2 * math.pi - 2 * a)])
        return float(np.abs(self.junction_cosines() - target).max())

    def scaled(self, factor: float) -> "ThetaNetwork":
        return ThetaNetwork(tuple(c.scaled(factor) for c in self.curves), self.alpha)

    def to_dict(self, p: float) -> dict:
        return {
            "alpha": self.alpha,
            "p": p,
            "curves": [c.to_dict() for c in self.curves],
            "energy": network_energy(self, p).to_dict(),
        }


def network_energy(net: ThetaNetwork, p: float) -> EnergyReport:
    """(sum of lengths)^(p-1) * (sum of bending energies), by sample quadrature."""
    reports = [bending_quadrature(c, p) for c in net.curves]
    length = sum(r.length for r in reports)
    bending = sum(r.bending for r in reports)
    return EnergyReport(length, bending, length ** (p - 1.0) * bending, "quadrature", p)


def two_component_energy(first: SampledCurve, second: SampledCurve, p: float) -> float:
    """Normalized energy of a degenerate network made of two closed components."""
    a, b = bending_quadrature(first, p), bending_quadrature(second, p)
    return (a.length + b.length) ** (p - 1.0) * (a.bending + b.bending)


def degenerate_bound(p: float, tol: Tolerance | None = None) -> float:
    """2^p varpi_star(p): the least energy of a network whose third component has collapsed."""
    return 2.0 ** p * varpi_star(p, tol)


def alpha_window(p: float, tol: Tolerance | None = None) -> float:
    """Supremum pi - phi_star(p) of admissible angles for the wavelike competitor."""
    return math.pi - moduli.phi_star(p, tol)


def competitor_energy(p: float, q: float, tol: Tolerance | None = None) -> float:
    """Closed-form normalized energy 2^(2p+1) (2E + K)^(p-1) b(q) of the competitor."""
    if not 0.0 < q < 1.0:
        raise DomainError("modulus must lie in (0, 1)")
    E, K = complete_E1(p, q, tol), complete_K1(p, q, tol)
    return 2.0 ** (2 * p + 1) * (2 * E + K) ** (p - 1.0) * b_of_q(p, q, tol)


def competitor_energy_slope(p: float, q: float, tol: Tolerance | None = None) -> float:
    """q-derivative of ``competitor_energy`` from the closed-form E, K and b derivatives."""
    E, K = complete_E1(p, q, tol), complete_K1(p, q, tol)
    S = 2 * E + K
    dS = 2 * dE1_dq(p, q, tol) + dK1_dq(p, q, tol)
    b = b_of_q(p, q, tol)
    return 2.0 ** (2 * p + 1) * S ** (p - 2.0) * ((p - 1.0) * dS * b + S * db_dq(p, q, tol))


def build_test_network(p: float, alpha: float, n_samples: int = 4097, tol: Tolerance | None = None) -> ThetaNetwork:
    """Wavelike half-period, straight segment and mirrored half-period.

    The modulus is q = sin(alpha / 2). The half-periods run over [-K, K] so
    both share the endpoints (-(2E - K), 0) and (2E - K, 0) with the segment.
    """
    _check_alpha(alpha)
    if not alpha < alpha_window(p, tol):
        raise DomainError(
            f"alpha = {alpha} is outside the window (0, pi - phi_star(p)) = (0, {alpha_window(p, tol):.12g})",
        )
    q = math.sin(alpha / 2.0)
    K, E = complete_K1(p, q, tol), complete_E1(p, q, tol)
    half = wavelike(p, q, (-K, K), n_samples, tol)
    half_len = 2.0 * E - K
    seg = segment(2.0 * half_len, 0.0, n_samples).translated((-half_len, 0.0))
    return ThetaNetwork((half, seg, half.reflected()), alpha)


@dataclass(frozen=True)
class FenchelPair:
    pair: tuple
    total_curvature: float
    bound: float
    external_angles: tuple

    @property
    def satisfied(self) -> bool:
        return self.total_curvature >= self.bound - 1e-9 * max(1.0, self.bound)


def _angle_variation(c: SampledCurve) -> float:
    return float(np.abs(np.diff(np.unwrap(c.theta))).sum())


def fenchel_check(net: ThetaNetwork) -> list[FenchelPair]:
    """Total curvature of each closed two-component loop against 2 pi minus its external angles.

    The loop runs along component i and back along component j, so the
    external angle at each junction is the angle between the arriving
    tangent and the reversed tangent of the other component. Total
    curvature is the sampled variation of the tangent angle, which never
    exceeds the exact value and equals it on monotone pieces.
    """
    out = []
    for i, j in itertools.combinations(range(3), 2):
        ci, cj = net.curves[i], net.curves[j]
        ti0, ti1 = _end_tangents(ci)
        tj0, tj1 = _end_tangents(cj)
        ext_end = math.acos(float(np.clip(ti1 @ -tj1, -1.0, 1.0)))
        ext_start = math.acos(float(np.clip(-tj0 @ ti0, -1.0, 1.0)))
        tc = _angle_variation(ci) + _angle_variation(cj)
        out.append(FenchelPair((i, j), tc, 2 * math.pi - ext_end - ext_start, (ext_start, ext_end)))
    return out


# ------------------------------------------------------------- minimizer


@dataclass(frozen=True)
class MinimizerOptions:
    """Settings for the discrete descent.

    Each component is approximated by ``cells`` circular arcs of equal
    length, so its tangent angle is piecewise linear in arclength.
    """

    cells: int = 32
    max_iter: int = 3000
    gtol: float = 1e-9
    length_floor: float = 1e-3
    armijo: float = 1e-4
    constraint_tol: float = 1e-13
    samples_per_cell: int = 8

    def __post_init__(self):
        if self.cells < 4 or self.max_iter < 1 or self.samples_per_cell < 1:
            raise DomainError("cells >= 4, max_iter >= 1 and samples_per_cell >= 1 are required")
        if not (0.0 < self.length_floor < 1.0 / 3.0) or not (0.0 < self.armijo < 0.5):
            raise DomainError("length_floor must lie in (0, 1/3) and armijo in (0, 1/2)")


@dataclass(frozen=True, eq=False)
class MinimizationResult:
    network: ThetaNetwork
    energy: float  # exact energy of the piecewise-circular network
    initial_energy: float
    history: list = field(default_factory=list)
    converged: bool = False
    collapsed: bool = False
    min_length_fraction: float = 1.0
    iterations: int = 0
    message: str = ""

    def to_dict(self, p: float) -> dict:
        return {
            "network": self.network.to_dict(p),
            "energy": self.energy,
            "initial_energy": self.initial_energy,
            "history": list(self.history),
            "converged": self.converged,
            "collapsed": self.collapsed,
            "min_length_fraction": self.min_length_fraction,
            "iterations": self.iterations,
            "message": self.message,
        }


def _sinc_half(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """S(d) = sin(d/2)/(d/2) and its derivative."""
    S = np.sinc(d / (2.0 * np.pi))
    small = np.abs(d) < 1e-4
    safe = np.where(small, 1.0, d)
    dS = np.where(small, -d / 12.0, (np.cos(d / 2.0) - S) / safe)
    return S, dS


class _DiscreteNetwork:
    """Piecewise-circular Theta-network in a fixed gauge.

    Variables: interior node angles of the three components, the common
    end angle gamma of the middle component, and the log-lengths. The first
    junction sits at the origin with the middle component leaving along +x,
    so start angles are the fixed offsets ``delta``; end angles are
    ``gamma + eps``.
    """

    def __init__(self, p: float, cells: int, delta: np.ndarray, eps: np.ndarray):
        self.p, self.M = p, cells
        self.delta, self.eps = delta, eps
        self.n_int = cells - 1

    def size(self) -> int:
        return 3 * self.n_int + 4

    def nodes(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        M = self.M
        th = np.empty((3, M + 1))
        th[:, 0] = self.delta
        th[:, 1:M] = x[: 3 * self.n_int].reshape(3, self.n_int)
        th[:, M] = x[3 * self.n_int] + self.eps
        return th, np.exp(x[3 * self.n_int + 1:])

    def energy_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        p, M = self.p, self.M
        th, L = self.nodes(x)
        d = np.diff(th, axis=1)
        h = L / M
        ad = np.abs(d)
        Bi = h ** (1.0 - p) * (ad ** p).sum(axis=1)
        lam, B = L.sum(), Bi.sum()
        e = lam ** (p - 1.0) * B
        phi = p * np.sign(d) * ad ** (p - 1.0) * (lam ** (p - 1.0) * h ** (1.0 - p))[:, None]
        g_nodes = np.zeros_like(th)
        g_nodes[:, :-1] -= phi
        g_nodes[:, 1:] += phi
        g_u = (p - 1.0) * lam ** (p - 2.0) * B * L + lam ** (p - 1.0) * (1.0 - p) * Bi
        g = np.concatenate([g_nodes[:, 1:M].ravel(), [g_nodes[:, M].sum()], g_u])
        return float(e), g

    def energy(self, x: np.ndarray) -> float:
        return self.energy_grad(x)[0]

    def displacements(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Chord vectors D_i (complex) and their Jacobians w.r.t. the nodes."""
        th, L = self.nodes(x)
        h = (L / self.M)[:, None]
        d = np.diff(th, axis=1)
        mid = np.exp(1j * 0.5 * (th[:, 1:] + th[:, :-1]))
        S, dS = _sinc_half(d)
        D = (h * mid * S).sum(axis=1)
        left = h * mid * (0.5j * S - dS)
        right = h * mid * (0.5j * S + dS)
        dnodes = np.zeros(th.shape, dtype=complex)
        dnodes[:, :-1] += left
        dnodes[:, 1:] += right
        return D, dnodes, L

    def constraints(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        D, dnodes, _ = self.displacements(x)
        M, ni = self.M, self.n_int
        n = self.size()
        jac_c = np.zeros((3, n), dtype=complex)
        for i in range(3):
            jac_c[i, i * ni:(i + 1) * ni] = dnodes[i, 1:M]
            jac_c[i, 3 * ni] = dnodes[i, M]
            jac_c[i, 3 * ni + 1 + i] = D[i]
        rows_c = [D[0] - D[1], D[0] - D[2]]
        jrows = [jac_c[0] - jac_c[1], jac_c[0] - jac_c[2]]
        c = np.array([v for z in rows_c for v in (z.real, z.imag)])
        J = np.array([v for z in jrows for v in (z.real, z.imag)])
        return c, J

    def restore(self, x: np.ndarray, tol: float, max_iter: int = 30) -> np.ndarray | None:
        """Gauss-Newton projection onto the closure constraints; None on failure."""
        for _ in range(max_iter):
            c, J = self.constraints(x)
            if np.linalg.norm(c) <= tol * np.exp(x[3 * self.n_int + 1:]).sum():
                return x
            try:
                x = x - J.T @ np.linalg.solve(J @ J.T, c)
            except np.linalg.LinAlgError:
                return None
        c, _ = self.constraints(x)
        return x if np.linalg.norm(c) <= tol * np.exp(x[3 * self.n_int + 1:]).sum() else None

    def tangent_project(self, x: np.ndarray, g: np.ndarray) -> np.ndarray:
        _, J = self.constraints(x)
        return g - J.T @ np.linalg.solve(J @ J.T, J @ g)

    def curves(self, x: np.ndarray, per_cell: int) -> list[SampledCurve]:
        th, L = self.nodes(x)
        M = self.M
        out = []
        t = np.arange(per_cell) / per_cell
        for i in range(3):
            h = L[i] / M
            d = np.diff(th[i])
            kappa = d / h
            # sub-samples lie exactly on the circular arc of each cell
            ang = th[i, :-1, None] + t[None, :] * d[:, None]
            S, _ = _sinc_half(t[None, :] * d[:, None])
            chord = h * t[None, :] * np.exp(1j * 0.5 * (th[i, :-1, None] + ang)) * S
            cell_start = np.concatenate([[0.0], np.cumsum(h * np.exp(1j * 0.5 * (th[i, 1:] + th[i, :-1])) * _sinc_half(d)[0])])
            pts = (cell_start[:-1, None] + chord).ravel()
            pts = np.append(pts, cell_start[-1])
            s = np.append(((np.arange(M)[:, None] + t[None, :]) * h).ravel(), L[i])
            theta = np.append(ang.ravel(), th[i, -1])
            k = np.repeat(kappa, per_cell)
            node_k = np.concatenate([[kappa[0]], 0.5 * (kappa[1:] + kappa[:-1]), [kappa[-1]]])
            k[::per_cell] = node_k[:-1]
            k = np.append(k, node_k[-1])
            out.append(SampledCurve(s, np.column_stack([pts.real, pts.imag]), theta, k, "composite",
                                    {"cells": M, "curvature": kappa.tolist()}))
        return out


def _discretize(net: ThetaNetwork, M: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, dict]:
    """Node angles, lengths and gauge data of ``net`` sampled at M + 1 nodes per component."""
    c1 = net.curves[1]
    origin = c1.start.copy()
    base = float(c1.theta[0])
    scale = net.total_length
    th = np.empty((3, M + 1))
    L = np.empty(3)
    for i, c in enumerate(net.curves):
        nodes = np.linspace(0.0, c.length, M + 1)
        th[i] = np.interp(nodes, c.s, np.unwrap(c.theta)) - base
        L[i] = c.length / scale
    # bring every start angle to within pi of the middle component's start
    th -= 2 * np.pi * np.round((th[:, :1] - th[1, 0]) / (2 * np.pi))
    th -= th[1, 0]
    delta = th[:, 0].copy()
    eps = th[:, -1] - th[1, -1]
    gauge = {"origin": origin, "rotation": base, "scale": scale}
    return th, L, np.stack([delta, eps]), gauge


def minimize_network(p: float, alpha: float, init: ThetaNetwork, options: MinimizerOptions | None = None,
                     tol: Tolerance | None = None) -> MinimizationResult:
    """Projected-gradient descent of the normalized energy over discrete networks.

    Junction angles are exact in the parameterization; the closure of the
    three chords is restored by Gauss-Newton after every trial step. Steps
    use a Barzilai-Borwein length with Armijo backtracking, so the recorded
    energies never increase. The best iterate is returned with flags for
    convergence and for a component shrinking below ``length_floor`` of the
    total length.
    """
    opts = options or MinimizerOptions()
    if not 1.0 < p < math.inf:
        raise DomainError("p must lie in (1, inf)")
    _check_alpha(alpha)
    if not alpha < alpha_window(p, tol):
        raise DomainError("alpha is outside the window (0, pi - phi_star(p))")
    if abs(init.alpha - alpha) > 1e-12:
        raise DomainError("initial network has a different junction angle")
    M = opts.cells
    th, L, (delta, eps), gauge = _discretize(init, M)
    model = _DiscreteNetwork(p, M, delta, eps)
    x = np.concatenate([th[:, 1:M].ravel(), [th[1, M]], np.log(L)])
    x = model.restore(x, opts.constraint_tol)
    if x is None:
        raise DomainError("initial network cannot be projected onto the closure constraints")

    def rescale(y):
        # the energy is dilation invariant; keep the total length at 1
        y = y.copy()
        y[3 * model.n_int + 1:] -= math.log(np.exp(y[3 * model.n_int + 1:]).sum())
        return y

    x = rescale(x)
    e, g = model.energy_grad(x)
    gt = model.tangent_project(x, g)
    history = [e]
    step = 1e-2 / max(np.linalg.norm(gt), 1e-300)
    prev = None
    converged = collapsed = False
    min_frac = float(np.exp(x[3 * model.n_int + 1:]).min())
    message = "maximum iterations reached"
    it = 0
    for it in range(1, opts.max_iter + 1):
        gnorm = float(np.linalg.norm(gt))
        if gnorm <= opts.gtol * e:
            converged, message = True, "projected gradient below tolerance"
            it -= 1
            break
        if prev is not None:
            sx, sg = x - prev[0], gt - prev[1]
            denom = float(sx @ sg)
            if denom > 0:
                step = float(sx @ sx) / denom
        step = min(step, 0.25 / gnorm)
        accepted = False
        for _ in range(60):
            trial = model.restore(x - step * gt, opts.constraint_tol)
            if trial is not None:
                trial = rescale(trial)
                et = model.energy(trial)
                if et <= e - opts.armijo * step * gnorm * gnorm:
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            converged = gnorm <= 1e3 * opts.gtol * e
            message = "line search stalled"
            it -= 1
            break
        prev = (x, gt)
        x = trial
        e, g = model.energy_grad(x)
        gt = model.tangent_project(x, g)
        history.append(e)
        frac = float(np.exp(x[3 * model.n_int + 1:]).min())
        min_frac = min(min_frac, frac)
        if frac < opts.length_floor:
            collapsed, message = True, "a component fell below the length floor"
            break
    curves = model.curves(x, opts.samples_per_cell)
    s = gauge["scale"]
    placed = tuple(c.rotated(gauge["rotation"]).scaled(s).translated(gauge["origin"]) for c in curves)
    net = ThetaNetwork(placed, alpha)
    return MinimizationResult(net, e, history[0], history, converged, collapsed, min_frac, it, message)
