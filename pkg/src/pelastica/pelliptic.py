"""p-elliptic integrals, amplitudes and the p-elliptic / p-hyperbolic functions.

Every integrand handled here has the form

    f(theta) = |cos theta|**alpha * (1 - q**2 sin(theta)**2)**beta

on ``[0, pi/2]``. The integral is split at ``pi/4``. The head ``[0, x]``,
``x <= pi/4``, is smooth and uses Gauss-Legendre. The tail is written in the
complementary angle ``u = pi/2 - theta`` where the integrand behaves like
``u**c`` near ``u = 0``; substituting ``v = u**(1 + c)`` removes that
algebraic singularity before a tanh-sinh rule is applied. Keeping ``u``
explicit also gives ``cos(am)`` to full relative precision near ``pi/2``.

At ``q = 1`` and ``1 + c <= 0`` the complete integral diverges; the tail is
then integrated in ``log u`` instead.

All functions accept scalar or array ``x`` and return the same shape.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._quadrature import Tolerance, gauss_legendre, resolve_tol, tanh_sinh_batch
from ._roots import newton_bisect_vec
from .errors import DomainError

QUARTER = 0.25 * np.pi
HALF = 0.5 * np.pi
_LOG_QUARTER = np.log(QUARTER)
_Z_MAX = 740.0  # exp(-740) underflows; beyond this the amplitude is pi/2


@dataclass(frozen=True)
class PQPair:
    """Exponent ``p`` in (1, inf) and modulus ``q`` in [0, 1]."""

    p: float
    q: float

    def __post_init__(self):
        if not (1.0 < self.p < np.inf):
            raise DomainError(f"exponent p must lie in (1, inf), got {self.p}")
        if not (0.0 <= self.q <= 1.0):
            raise DomainError(f"modulus q must lie in [0, 1], got {self.q}")


@dataclass(frozen=True)
class _Weight:
    """Integrand |cos|**alpha (1 - q^2 sin^2)**beta and its tail data."""

    alpha: float
    beta: float
    q: float

    @property
    def c(self) -> float:
        # leading exponent of the integrand in u = pi/2 - theta
        return self.alpha + 2 * self.beta if self.q == 1.0 else self.alpha

    @property
    def finite(self) -> bool:
        return 1.0 + self.c > 0.0

    def head(self, theta):
        s = np.sin(theta)
        return np.cos(theta) ** self.alpha * (1.0 - (self.q * s) ** 2) ** self.beta

    def regular(self, u):
        """Integrand divided by u**c; bounded near u = 0."""
        sinc = np.sinc(u / np.pi)
        if self.q == 1.0:
            return sinc ** self.c
        eps = (1.0 - self.q) * (1.0 + self.q)
        s = np.sin(u)
        return sinc ** self.alpha * (eps + (self.q * s) ** 2) ** self.beta

    def tail_integrand(self, u):
        return u ** self.c * self.regular(u)


def _weight(kind: str, p: float, q: float) -> _Weight:
    if kind == "F1":
        return _Weight(1.0 - 2.0 / p, -0.5, q)
    if kind == "E1":
        return _Weight(1.0 - 2.0 / p, 0.5, q)
    if kind == "F2":
        return _Weight(0.0, -1.0 / p, q)
    raise ValueError(kind)


def _weight_e2(exponent: float, q: float) -> _Weight:
    return _Weight(0.0, 1.0 / exponent, q)


# ---------------------------------------------------------------- integrals


def _head(w: _Weight, x: np.ndarray) -> np.ndarray:
    return gauss_legendre(w.head, x)


def _tail_v(w: _Weight, v: np.ndarray, tol: Tolerance, level: int | None = None):
    """Tail integral from 0 to u = v**(1/(1+c)), as a function of v."""
    e = 1.0 / (1.0 + w.c)
    f = lambda nodes: w.regular(nodes ** e)
    val, lev = tanh_sinh_batch(f, v, tol, start_level=level or 3, fixed_level=None if level is None else level)
    return e * val, lev


def _tail(w: _Weight, u: np.ndarray, tol: Tolerance) -> np.ndarray:
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return _tail_v(w, u ** (1.0 + w.c), tol)[0]


def _mid_z(w: _Weight, z: np.ndarray, tol: Tolerance, level: int | None = None):
    """Integral over u in [pi/4 e^{-z}, pi/4] written in z = log(pi/4) - log u."""
    k = 1.0 + w.c

    def f(zz):
        u = QUARTER * np.exp(-zz)
        return u ** k * w.regular(u)

    return tanh_sinh_batch(f, z, tol, start_level=level or 3, fixed_level=None if level is None else level)


@lru_cache(maxsize=4096)
def _complete_parts(w: _Weight, tol: Tolerance) -> tuple[float, float, float, int]:
    """Head value H = I(pi/4), tail value T = I(pi/2) - I(pi/4), total, level."""
    head = float(_head(w, np.array([QUARTER]))[0])
    if not w.finite:
        return head, np.inf, np.inf, 4
    v = np.array([QUARTER ** (1.0 + w.c)])
    _, level = _tail_v(w, v, tol)
    # one level past the accepted one: the error check is conservative by a level
    level += 1
    tail = float(_tail_v(w, v, tol, level)[0][0])
    return head, tail, head + tail, level


def _reduced_integral(w: _Weight, phi: np.ndarray, comp: np.ndarray, tol: Tolerance) -> np.ndarray:
    """Integral of w over [0, phi] for phi in [0, pi/2]; ``comp`` = pi/2 - phi."""
    out = np.empty_like(phi)
    low = phi <= QUARTER
    if np.any(low):
        out[low] = _head(w, phi[low])
    hi = ~low
    if np.any(hi):
        head, tail, total, level = _complete_parts(w, tol)
        u = comp[hi]
        if w.finite:
            out[hi] = total - _tail_v(w, u ** (1.0 + w.c), tol, level)[0]
        else:
            with np.errstate(divide="ignore"):
                z = _LOG_QUARTER - np.log(u)
            out[hi] = head + _mid_z(w, z, tol)[0]
    return out


def _integral(w: _Weight, x, tol: Tolerance | None):
    tol = resolve_tol(tol)
    x = np.asarray(x, dtype=float)
    xs = np.atleast_1d(x)
    if not w.finite:
        if np.any(np.abs(xs) >= HALF):
            raise DomainError("integral diverges at |x| >= pi/2 for q = 1 and p <= 2")
        n = np.zeros_like(xs)
    else:
        n = np.round(xs / np.pi)
    r = xs - n * np.pi
    a = np.abs(r)
    comp = HALF - a
    val = _reduced_integral(w, a, comp, tol)
    total = _complete_parts(w, tol)[2] if w.finite else 0.0
    res = 2.0 * n * total + np.sign(r) * val
    return res.reshape(x.shape) if x.ndim else float(res[0])


def incomplete_F1(p: float, q: float, x, tol: Tolerance | None = None):
    """First-kind integral with weight |cos|^(1-2/p) / sqrt(1 - q^2 sin^2)."""
    PQPair(p, q)
    return _integral(_weight("F1", p, q), x, tol)


def incomplete_F2(p: float, q: float, x, tol: Tolerance | None = None):
    """First-kind integral with weight (1 - q^2 sin^2)^(-1/p)."""
    PQPair(p, q)
    return _integral(_weight("F2", p, q), x, tol)


def incomplete_E1(p: float, q: float, x, tol: Tolerance | None = None):
    """Second-kind integral with weight sqrt(1 - q^2 sin^2) |cos|^(1-2/p)."""
    PQPair(p, q)
    return _integral(_weight("E1", p, q), x, tol)


def incomplete_E2(exponent: float, q: float, x, tol: Tolerance | None = None):
    """Integral of (1 - q^2 sin^2)^(1/exponent) from 0 to x."""
    PQPair(exponent, q)
    return _integral(_weight_e2(exponent, q), x, tol)


def _complete(w: _Weight, tol: Tolerance | None) -> float:
    if not w.finite:
        raise DomainError("complete integral is infinite at q = 1 for p <= 2")
    return _complete_parts(w, resolve_tol(tol))[2]


def complete_K1(p: float, q: float, tol: Tolerance | None = None) -> float:
    PQPair(p, q)
    return _complete(_weight("F1", p, q), tol)


def complete_K2(p: float, q: float, tol: Tolerance | None = None) -> float:
    PQPair(p, q)
    return _complete(_weight("F2", p, q), tol)


def complete_E1(p: float, q: float, tol: Tolerance | None = None) -> float:
    PQPair(p, q)
    return _complete(_weight("E1", p, q), tol)


def complete_E2(exponent: float, q: float, tol: Tolerance | None = None) -> float:
    PQPair(exponent, q)
    return _complete(_weight_e2(exponent, q), tol)


def dK1_dq(p: float, q: float, tol: Tolerance | None = None) -> float:
    """Closed-form q-derivative of the complete first-kind integral K1."""
    if not (0.0 < q < 1.0):
        raise DomainError("dK1_dq requires 0 < q < 1")
    K, E = complete_K1(p, q, tol), complete_E1(p, q, tol)
    a = 2.0 - 2.0 / p
    return (a * E - (a - q * q) * K) / (q * (1.0 - q * q))


def dE1_dq(p: float, q: float, tol: Tolerance | None = None) -> float:
    """Closed-form q-derivative of the complete second-kind integral E1."""
    if not (0.0 < q < 1.0):
        raise DomainError("dE1_dq requires 0 < q < 1")
    return (complete_E1(p, q, tol) - complete_K1(p, q, tol)) / q


# ---------------------------------------------------------------- amplitudes


@dataclass
class _Amplitude:
    """am = n*pi + sign*phi with phi in [0, pi/2] and comp = pi/2 - phi."""

    n: np.ndarray
    sign: np.ndarray
    phi: np.ndarray
    comp: np.ndarray

    @property
    def value(self):
        return self.n * np.pi + self.sign * self.phi

    @property
    def cos(self):
        # cos(n pi + sign phi) = (-1)^n sin(comp)
        return np.where(self.n % 2 == 0, 1.0, -1.0) * np.sin(self.comp)

    @property
    def sin(self):
        return np.where(self.n % 2 == 0, 1.0, -1.0) * self.sign * np.cos(self.comp)


def _invert_reduced(w: _Weight, a: np.ndarray, tol: Tolerance) -> tuple[np.ndarray, np.ndarray]:
    """Solve I(phi) = a for phi in [0, pi/2]; returns (phi, pi/2 - phi)."""
    head, tail, total, level = _complete_parts(w, tol)
    phi = np.empty_like(a)
    comp = np.empty_like(a)
    ftol = 2e-15 * max(1.0, head)

    low = a <= head
    if np.any(low):
        t = a[low]
        th = newton_bisect_vec(
            lambda y: _head(w, y), w.head, t,
            np.zeros_like(t), np.full_like(t, QUARTER), t, ftol,
        )
        phi[low] = th
        comp[low] = HALF - th

    hi = ~low
    if np.any(hi):
        t = a[hi]
        if w.finite:
            k = 1.0 + w.c
            e = 1.0 / k
            target = np.maximum(total - t, 0.0)
            vmax = QUARTER ** k
            h0 = w.regular(0.0)
            v = newton_bisect_vec(
                lambda vv: _tail_v(w, vv, tol, level)[0],
                lambda vv: e * w.regular(vv ** e),
                target, np.zeros_like(t), np.full_like(t, vmax),
                np.minimum(target * k / h0, vmax), 2e-15 * max(1.0, total),
            )
            u = v ** e
        else:
            target = t - head
            zmax = np.ones_like(t)
            while True:
                short = _mid_z(w, zmax, tol)[0] < target
                if not np.any(short) or np.all(zmax[short] >= _Z_MAX):
                    break
                zmax[short] = np.minimum(2.0 * zmax[short], _Z_MAX)
            _, lev = _mid_z(w, zmax, tol)
            k = 1.0 + w.c

            def dz(zz):
                u = QUARTER * np.exp(-zz)
                return u ** k * w.regular(u)

            z = newton_bisect_vec(
                lambda zz: _mid_z(w, zz, tol, lev)[0], dz, target,
                np.zeros_like(t), zmax, 0.5 * zmax, 2e-15 * np.maximum(1.0, target),
            )
            u = QUARTER * np.exp(-z)
        phi[hi] = HALF - u
        comp[hi] = u
    return phi, comp


def _amplitude(w: _Weight, x, tol: Tolerance | None, saturate: bool = False) -> _Amplitude:
    tol = resolve_tol(tol)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if w.finite:
        total = _complete_parts(w, tol)[2]
        if saturate:
            n = np.zeros_like(xs)
            r = np.clip(xs, -total, total)
        else:
            n = np.round(xs / (2.0 * total))
            r = xs - 2.0 * n * total
    else:
        n = np.zeros_like(xs)
        r = xs
    a = np.abs(r)
    if w.finite:
        # arguments within rounding of the half-period map exactly onto it
        a = np.where(np.abs(a - total) <= 8 * np.finfo(float).eps * total, total, np.minimum(a, total))
    phi, comp = _invert_reduced(w, a, tol)
    return _Amplitude(n, np.sign(r), phi, comp)


def _shape(x, arr):
    x = np.asarray(x)
    return arr.reshape(x.shape) if x.ndim else float(arr[0])


def _amp1(p, q, x, tol):
    PQPair(p, q)
    return _amplitude(_weight("F1", p, q), x, tol, saturate=(q == 1.0 and p > 2.0))


def _amp2(p, q, x, tol):
    PQPair(p, q)
    if q == 1.0:
        return _amp1(p, q, x, tol)
    return _amplitude(_weight("F2", p, q), x, tol)


def am1(p: float, q: float, x, tol: Tolerance | None = None):
    """Inverse of ``incomplete_F1`` in its upper limit.

    At ``q = 1`` with ``p > 2`` the result saturates at +-pi/2 for
    ``|x| >= K1(p, 1)``.
    """
    return _shape(x, _amp1(p, q, x, tol).value)


def am2(p: float, q: float, x, tol: Tolerance | None = None):
    """Inverse of ``incomplete_F2`` in its upper limit."""
    return _shape(x, _amp2(p, q, x, tol).value)


def _cn_from_cos(p: float, c):
    return np.sign(c) * np.abs(c) ** (2.0 / p)


def sn_p(p: float, q: float, x, tol: Tolerance | None = None):
    return _shape(x, _amp1(p, q, x, tol).sin)


def cn_p(p: float, q: float, x, tol: Tolerance | None = None):
    """|cos am1|^(2/p - 1) cos am1, zero where cos am1 vanishes."""
    return _shape(x, _cn_from_cos(p, _amp1(p, q, x, tol).cos))


def dn_p(p: float, q: float, x, tol: Tolerance | None = None):
    """(1 - q^2 sin^2 am2)^(1/p)."""
    c = _amp2(p, q, x, tol).cos
    eps = (1.0 - q) * (1.0 + q)
    return _shape(x, (eps + (q * c) ** 2) ** (1.0 / p))


def sech_p(p: float, x, tol: Tolerance | None = None):
    """p-hyperbolic secant; vanishes outside (-K1(p,1), K1(p,1)) when p > 2."""
    return _shape(x, np.abs(_amp1(p, 1.0, x, tol).cos) ** (2.0 / p))


def tanh_p(p: float, x, tol: Tolerance | None = None):
    """Integral of sech_p**p from 0 to x, evaluated as E1(am1(x, 1), 1)."""
    tol = resolve_tol(tol)
    amp = _amp1(p, 1.0, x, tol)
    val = _reduced_integral(_weight("E1", p, 1.0), amp.phi, amp.comp, tol)
    return _shape(x, amp.sign * val)


# ------------------------------------------------------- helpers for curves


def e1_of_am1(p: float, q: float, x, tol: Tolerance | None = None):
    """Return (E1(am1(x)), am1, cos am1, sin am1) sharing one amplitude solve."""
    tol = resolve_tol(tol)
    amp = _amp1(p, q, x, tol)
    we = _weight("E1", p, q)
    val = _reduced_integral(we, amp.phi, amp.comp, tol)
    total = _complete_parts(we, tol)[2]
    e = 2.0 * amp.n * total + amp.sign * val
    return _shape(x, e), _shape(x, amp.value), _shape(x, amp.cos), _shape(x, amp.sin)


def e2_of_am2(exponent: float, p: float, q: float, x, tol: Tolerance | None = None):
    """Return (E2_exponent(am2(x)), am2, cos am2, sin am2) sharing one amplitude solve."""
    tol = resolve_tol(tol)
    amp = _amp2(p, q, x, tol)
    we = _weight_e2(exponent, q)
    val = _reduced_integral(we, amp.phi, amp.comp, tol)
    total = _complete_parts(we, tol)[2]
    e = 2.0 * amp.n * total + amp.sign * val
    return _shape(x, e), _shape(x, amp.value), _shape(x, amp.cos), _shape(x, amp.sin)
