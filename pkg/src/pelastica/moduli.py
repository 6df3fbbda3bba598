"""Moduli and exponents selected by transcendental equations.

``Q(p, q) = 2 E1/K1 - 1`` is the endpoint ratio of a wavelike half-period.
Its root ``q_star`` gives the figure-eight, ``phi_star`` the corresponding
crossing half-angle, and inverting ``phi_star`` at rational multiples of
``pi`` gives the special exponents ``p_mn``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from scipy.optimize import brentq

from ._quadrature import Tolerance, resolve_tol
from ._roots import newton_bisect
from .errors import ConvergenceError, DomainError, NoSolutionError
from .pelliptic import complete_E1, complete_K1, dE1_dq, dK1_dq

Q_CAP = 1.0 - 1e-12
_RESIDUAL = 1e-12


def _check_p(p: float) -> None:
    if not (1.0 < p < math.inf):
        raise DomainError(f"exponent p must lie in (1, inf), got {p}")


def _check_r(r: float) -> None:
    if not (0.0 <= r < 1.0):
        raise DomainError(f"endpoint ratio r must lie in [0, 1), got {r}")


def Q(p: float, q: float, tol: Tolerance | None = None) -> float:
    """Endpoint ratio 2 E1(q) / K1(q) - 1; equals -1/(p-1) at q = 1 for p > 2."""
    _check_p(p)
    if q == 1.0 and p <= 2.0:
        raise DomainError("Q has no value at q = 1 for p <= 2 (K1 diverges)")
    return 2.0 * complete_E1(p, q, tol) / complete_K1(p, q, tol) - 1.0


def Q_tilde(p: float, q: float, tol: Tolerance | None = None) -> float:
    """2 E1(q) - K1(q); decreasing and concave in q."""
    _check_p(p)
    if q == 1.0 and p <= 2.0:
        raise DomainError("Q_tilde has no value at q = 1 for p <= 2")
    return 2.0 * complete_E1(p, q, tol) - complete_K1(p, q, tol)


def _dQ_tilde(p: float, q: float, tol: Tolerance | None) -> float:
    return 2.0 * dE1_dq(p, q, tol) - dK1_dq(p, q, tol)


def _dQ(p: float, q: float, tol: Tolerance | None) -> float:
    if q <= 0.0 or q >= 1.0:
        return math.nan
    K, E = complete_K1(p, q, tol), complete_E1(p, q, tol)
    return 2.0 * (dE1_dq(p, q, tol) * K - E * dK1_dq(p, q, tol)) / (K * K)


@lru_cache(maxsize=1024)
def _q_star(p: float, tol: Tolerance) -> float:
    lo, hi = 1.0 / math.sqrt(2.0), Q_CAP
    return newton_bisect(
        lambda q: Q_tilde(p, q, tol),
        lambda q: _dQ_tilde(p, q, tol),
        lo, hi, x0=0.9, ftol=_RESIDUAL,
    )


def q_star(p: float, tol: Tolerance | None = None) -> float:
    """Modulus of the figure-eight: the unique root of Q(p, .) in (1/sqrt 2, 1)."""
    _check_p(p)
    return _q_star(float(p), resolve_tol(tol))


def phi_star(p: float, tol: Tolerance | None = None) -> float:
    """Half crossing angle of the figure-eight, pi - 2 arcsin q_star(p)."""
    return math.pi - 2.0 * math.asin(q_star(p, tol))


def solve_arc_modulus(p: float, r: float, tol: Tolerance | None = None) -> float:
    """Modulus q in (0, q_star] with Q(p, q) = r."""
    _check_p(p)
    _check_r(r)
    qs = q_star(p, tol)
    # r within rounding of Q(q_star) ~ 0 leaves the root at the bracket end
    if r == 0.0 or abs(Q(p, qs, tol) - r) <= _RESIDUAL:
        return qs
    return newton_bisect(
        lambda q: Q(p, q, tol) - r,
        lambda q: _dQ(p, q, tol),
        0.0, qs, ftol=_RESIDUAL,
    )


def loop_window(p: float) -> float:
    """Supremum of endpoint ratios reachable by loops: 1/(p-1), capped at 1."""
    return min(1.0, 1.0 / (p - 1.0))


def solve_loop_modulus(p: float, r: float, tol: Tolerance | None = None) -> float:
    """Modulus q in [q_star, 1) with Q(p, q) = -r.

    Raises ``NoSolutionError`` when r >= 1/(p-1), and also when the root lies
    beyond the representable cap ``1 - 1e-12``.
    """
    _check_p(p)
    _check_r(r)
    if r >= 1.0 / (p - 1.0):
        raise NoSolutionError(f"loops need r < 1/(p-1) = {1.0 / (p - 1.0):.6g}; got r = {r}")
    qs = q_star(p, tol)
    if r == 0.0 or abs(Q(p, qs, tol) + r) <= _RESIDUAL:
        return qs
    f_cap = Q(p, Q_CAP, tol) + r
    if f_cap > 0.0:
        raise NoSolutionError(
            f"loop modulus for (p, r) = ({p}, {r}) lies beyond q = 1 - 1e-12",
        )
    return newton_bisect(
        lambda q: Q(p, q, tol) + r,
        lambda q: _dQ(p, q, tol),
        qs, Q_CAP, ftol=_RESIDUAL,
    )


def qpp_at_zero(p: float) -> float:
    """Second q-derivative of Q(p, .) at q = 0: 4p / (2 - 3p)."""
    _check_p(p)
    return 4.0 * p / (2.0 - 3.0 * p)


@dataclass(frozen=True)
class SpecialExponent:
    """Exponent p with phi_star(p) = n pi / m."""

    m: int
    n: int
    p_value: float

    @property
    def angle_fraction(self) -> Fraction:
        """phi_star / pi as an exact fraction."""
        return Fraction(self.n, self.m)

    def __float__(self) -> float:
        return self.p_value


@lru_cache(maxsize=256)
def _p_mn(m: int, n: int, tol: Tolerance) -> float:
    target = n * math.pi / m

    # phi_star is decreasing in p; solve in t = log(p - 1) for even scaling
    def f(t: float) -> float:
        return phi_star(1.0 + math.exp(t), tol) - target

    lo, hi = math.log(1e-6), math.log(1e3 - 1.0)
    t = brentq(f, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    p = 1.0 + math.exp(t)
    if abs(phi_star(p, tol) - target) > 1e-9:
        raise ConvergenceError(f"p_mn({m}, {n}) residual above 1e-9")
    return p


def p_mn(m: int, n: int, tol: Tolerance | None = None) -> SpecialExponent:
    """Exponent at which phi_star equals n pi / m (m odd >= 3, 1 <= n < m/2)."""
    if int(m) != m or int(n) != n or m < 3 or m % 2 == 0 or not (1 <= n < m / 2):
        raise DomainError(f"p_mn needs odd m >= 3 and 1 <= n < m/2; got ({m}, {n})")
    m, n = int(m), int(n)
    return SpecialExponent(m, n, _p_mn(m, n, resolve_tol(tol)))


def p3(tol: Tolerance | None = None) -> SpecialExponent:
    """The exponent with phi_star = pi/3 (about 1.5728)."""
    return p_mn(3, 1, tol)


def phi_over_pi(p) -> float | Fraction:
    """phi_star(p) / pi; exact when ``p`` is a SpecialExponent."""
    if isinstance(p, SpecialExponent):
        return p.angle_fraction
    return phi_star(float(p)) / math.pi


def angle_fraction(p, max_denominator: int = 10**6, atol: float = 1e-9) -> Fraction | None:
    """Rational value of phi_star(p)/pi, or None when no fraction matches.

    Uses the best rational approximation with denominator at most
    ``max_denominator`` and accepts it when within ``atol``.
    """
    x = phi_over_pi(p)
    if isinstance(x, Fraction):
        return x
    f = Fraction(x).limit_denominator(max_denominator)
    return f if abs(float(f) - x) < atol else None
