"""Bending energies: closed forms for the pinned families and sampled quadrature."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import moduli
from ._quadrature import Tolerance
from .curves import SampledCurve
from .errors import ConstraintError, DomainError
from .pelliptic import complete_E1, complete_K1


@dataclass(frozen=True)
class EnergyReport:
    length: float
    bending: float
    normalized: float
    method: str
    p: float

    def to_dict(self) -> dict:
        return asdict(self)


def _report(length: float, bending: float, p: float, method: str) -> EnergyReport:
    if not length > 0:
        raise DomainError("degenerate curve: zero length")
    return EnergyReport(length, bending, length ** (p - 1.0) * bending, method, p)


def bending_quadrature(curve: SampledCurve, p: float) -> EnergyReport:
    """Trapezoidal integral of |k|^p over the samples."""
    bending = float(np.trapezoid(np.abs(curve.k) ** p, curve.s))
    return _report(curve.length, bending, p, "quadrature")


def total_curvature(curve: SampledCurve) -> float:
    if not curve.length > 0:
        raise DomainError("degenerate curve: zero length")
    return float(np.trapezoid(np.abs(curve.k), curve.s))


def int_cnp_pow_p(p: float, q: float, tol: Tolerance | None = None) -> float:
    """Integral of |cn_p|^p over a quarter period, E1/q^2 + (1 - 1/q^2) K1."""
    if not 0.0 < q <= 1.0 or (q == 1.0 and p <= 2.0):
        raise DomainError("int_cnp_pow_p needs 0 < q < 1, or q = 1 with p > 2")
    E = complete_E1(p, q, tol)
    if q == 1.0:
        return E
    return E / (q * q) + (1.0 - 1.0 / (q * q)) * complete_K1(p, q, tol)


def b_of_q(p: float, q: float, tol: Tolerance | None = None) -> float:
    """q^p times the quarter-period integral of |cn_p|^p."""
    if q == 1.0:
        if p <= 2.0:
            raise DomainError("b(1) is defined only for p > 2")
        return complete_E1(p, 1.0, tol)
    if not 0.0 < q < 1.0:
        raise DomainError("b_of_q needs 0 < q <= 1")
    E, K = complete_E1(p, q, tol), complete_K1(p, q, tol)
    return q ** (p - 2.0) * (E - (1.0 - q * q) * K)


def db_dq(p: float, q: float, tol: Tolerance | None = None) -> float:
    if not 0.0 < q < 1.0:
        raise DomainError("db_dq needs 0 < q < 1")
    E, K = complete_E1(p, q, tol), complete_K1(p, q, tol)
    return (p - 1.0) * q ** (p - 1.0) * K + (p - 1.0) * (1.0 - 2.0 / p) * q ** (p - 3.0) * (E - K)


def wave_energy_at(p: float, q: float, n: int, tol: Tolerance | None = None) -> float:
    """Normalized energy of n half-periods of the wavelike elastica of modulus q."""
    return 2.0 ** (2 * p) * n ** p * complete_K1(p, q, tol) ** (p - 1.0) * b_of_q(p, q, tol)


def normalized_energy_wave(p: float, r: float, n: int, kind: str = "arc", tol: Tolerance | None = None) -> float:
    """Closed-form normalized energy of the (p, r, n)-arc or loop."""
    if kind == "arc":
        q = moduli.solve_arc_modulus(p, r, tol)
    elif kind == "loop":
        q = moduli.solve_loop_modulus(p, r, tol)
    else:
        raise DomainError(f"kind must be 'arc' or 'loop', got {kind!r}")
    return wave_energy_at(p, q, n, tol)


def normalized_energy_flat(p: float, r: float, n: int, tol: Tolerance | None = None) -> float:
    """Closed-form normalized energy of any (p, r, n)-flat-core."""
    if not p > 2.0 or not (1.0 / (p - 1.0) <= r < 1.0):
        raise ConstraintError("flat-cores need p > 2 and 1/(p-1) <= r < 1")
    K, E = complete_K1(p, 1.0, tol), complete_E1(p, 1.0, tol)
    factor = ((1.0 - 1.0 / (p - 1.0)) / (1.0 - r)) ** (p - 1.0)
    return 2.0 ** (2 * p) * n ** p * K ** (p - 1.0) * E * factor


def varpi_star(p: float, tol: Tolerance | None = None) -> float:
    """Normalized energy of the half-fold figure-eight."""
    qs = moduli.q_star(p, tol)
    E = complete_E1(p, qs, tol)
    return 2.0 ** (3 * p - 1) * qs ** (p - 2.0) * (2 * qs * qs - 1.0) * E ** p


def first_variation_residual(curve: SampledCurve, p: float, n_test: int = 8) -> tuple[float, float]:
    """Least-squares multiplier and relative residual of the weak Euler-Lagrange form.

    The test fields are sin(j pi s / L) e_x and sin(j pi s / L) e_y for
    j = 1..n_test. The residual is the norm of the form over the basis
    divided by the sum of the norms of its three terms, so it is
    dimensionless and zero for an exact critical point.
    """
    s, th = curve.s, curve.theta
    L = curve.length
    if len(s) < 16 * n_test:
        raise DomainError("too few samples to resolve the test-field basis")
    k = np.gradient(th, s)
    t = np.column_stack([np.cos(th), np.sin(th)])
    nrm = np.column_stack([-np.sin(th), np.cos(th)])
    ak = np.abs(k)
    w1 = (1.0 - 2.0 * p) * ak ** p
    w2 = p * np.sign(k) * ak ** (p - 1.0)
    a1, a2, b = [], [], []
    for j in range(1, n_test + 1):
        om = j * math.pi / L
        d1 = om * np.cos(om * s)
        d2 = -om * om * np.sin(om * s)
        for axis in (0, 1):
            a1.append(np.trapezoid(w1 * t[:, axis] * d1, s))
            a2.append(np.trapezoid(w2 * nrm[:, axis] * d2, s))
            b.append(np.trapezoid(t[:, axis] * d1, s))
    a1, a2, b = map(np.asarray, (a1, a2, b))
    a = a1 + a2
    bb = float(b @ b)
    lam = -float(a @ b) / bb if bb > 0 else 0.0
    res = a + lam * b
    scale = np.linalg.norm(a1) + np.linalg.norm(a2) + abs(lam) * math.sqrt(bb)
    if scale == 0.0:
        return lam, 0.0
    return lam, float(np.linalg.norm(res) / scale)
