"""Arclength-sampled elastica families, pinned constructions and leafed curves.

The free families (``wavelike``, ``borderline``, ``orbitlike``, ``circular``,
``linear``) return the closed-form coordinates as written, evaluated at the
requested parameter values; only ``s`` is shifted to start at 0.

Pinned constructions (``build_arc``, ``build_loop``, ``build_figure_eight``,
``build_flatcore``, ``build_leafed``) are normalized: they start at the
origin with initial tangent along +x. The rotation applied is recorded in
``params["rotation"]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from . import moduli
from ._quadrature import Tolerance
from ._roots import newton_bisect
from .errors import ConstraintError, DomainError
from .pelliptic import PQPair, complete_K1, e1_of_am1, e2_of_am2

SAMPLES_PER_PERIOD = 4096
FAMILIES = ("linear", "wavelike", "borderline", "flatcore", "orbitlike", "circular", "composite")


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Planar curve sampled uniformly (or piecewise uniformly) in arclength."""

    s: np.ndarray
    xy: np.ndarray
    theta: np.ndarray
    k: np.ndarray
    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("s", "xy", "theta", "k"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = self.s.shape[0]
        if self.xy.shape != (n, 2) or self.theta.shape != (n,) or self.k.shape != (n,):
            raise DomainError("inconsistent sample array shapes")
        if n < 2 or self.s[0] != 0.0 or np.any(np.diff(self.s) <= 0):
            raise DomainError("s must start at 0 and be strictly increasing")
        if self.family not in FAMILIES:
            raise DomainError(f"unknown family {self.family!r}")

    @property
    def length(self) -> float:
        return float(self.s[-1])

    @property
    def start(self) -> np.ndarray:
        return self.xy[0]

    @property
    def end(self) -> np.ndarray:
        return self.xy[-1]

    @property
    def tangent(self) -> np.ndarray:
        return np.column_stack([np.cos(self.theta), np.sin(self.theta)])

    def closure_gap(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    def diameter(self) -> float:
        span = self.xy.max(axis=0) - self.xy.min(axis=0)
        return float(np.hypot(*span))

    # rigid motions and dilation
    def _replace(self, **kw) -> "SampledCurve":
        data = dict(s=self.s, xy=self.xy, theta=self.theta, k=self.k, family=self.family, params=dict(self.params))
        data.update(kw)
        return SampledCurve(**data)

    def translated(self, offset) -> "SampledCurve":
        return self._replace(xy=self.xy + np.asarray(offset, dtype=float))

    def rotated(self, angle: float) -> "SampledCurve":
        c, s = math.cos(angle), math.sin(angle)
        rot = np.array([[c, -s], [s, c]])
        params = dict(self.params)
        params["rotation"] = params.get("rotation", 0.0) + angle
        return self._replace(xy=self.xy @ rot.T, theta=self.theta + angle, params=params)

    def reflected(self) -> "SampledCurve":
        """Mirror image across the x-axis."""
        return self._replace(xy=self.xy * np.array([1.0, -1.0]), theta=-self.theta, k=-self.k)

    def scaled(self, factor: float) -> "SampledCurve":
        if not factor > 0:
            raise DomainError("scale factor must be positive")
        return self._replace(s=self.s * factor, xy=self.xy * factor, k=self.k / factor)

    def normalized(self) -> "SampledCurve":
        """Translate to the origin and rotate the initial tangent onto +x."""
        return self.translated(-self.xy[0]).rotated(-float(self.theta[0]))

    @classmethod
    def from_xy(cls, xy, n_samples: int | None = None, family: str = "composite", params: dict | None = None):
        """Resample an arbitrary polyline uniformly in arclength.

        A cubic spline through the points (chord-length parameter) supplies
        the tangent angle and curvature.
        """
        xy = np.asarray(xy, dtype=float)
        chord = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(xy, axis=0), axis=1))])
        sp = CubicSpline(chord, xy, axis=0)
        d1 = sp.derivative(1)
        d2 = sp.derivative(2)
        fine = np.linspace(0.0, chord[-1], 8 * len(chord) + 1)
        speed = np.linalg.norm(d1(fine), axis=1)
        arc = np.concatenate([[0.0], np.cumsum(0.5 * (speed[1:] + speed[:-1]) * np.diff(fine))])
        n = n_samples or len(xy)
        s = np.linspace(0.0, arc[-1], n)
        t = np.interp(s, arc, fine)
        v, a = d1(t), d2(t)
        theta = np.unwrap(np.arctan2(v[:, 1], v[:, 0]))
        k = (v[:, 0] * a[:, 1] - v[:, 1] * a[:, 0]) / np.linalg.norm(v, axis=1) ** 3
        return cls(s, sp(t), theta, k, family, dict(params or {}))

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": _jsonable(self.params),
            "s": self.s.tolist(),
            "x": self.xy[:, 0].tolist(),
            "y": self.xy[:, 1].tolist(),
            "theta": self.theta.tolist(),
            "k": self.k.tolist(),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _grid(s_range, n_samples: int) -> np.ndarray:
    a, b = map(float, s_range)
    if not b > a:
        raise DomainError("s_range must be increasing")
    if n_samples < 2:
        raise DomainError("need at least two samples")
    return np.linspace(a, b, int(n_samples))


# ------------------------------------------------------------ free families


def wavelike(p: float, q: float, s_range, n_samples: int = SAMPLES_PER_PERIOD, tol: Tolerance | None = None) -> SampledCurve:
    """Wavelike elastica with modulus q sampled at s in ``s_range``."""
    PQPair(p, q)
    if not 0.0 < q < 1.0:
        raise DomainError("wavelike elastica need 0 < q < 1")
    s = _grid(s_range, n_samples)
    e1, _, c, sn = e1_of_am1(p, q, s, tol)
    x = 2.0 * e1 - s
    y = -q * p / (p - 1.0) * np.sign(c) * np.abs(c) ** (2.0 - 2.0 / p)
    theta = 2.0 * np.arcsin(q * sn)
    k = 2.0 * q * np.sign(c) * np.abs(c) ** (2.0 / p)
    return SampledCurve(s - s[0], np.column_stack([x, y]), theta, k, "wavelike", {"p": p, "q": q, "s_offset": s[0]})


def borderline(p: float, s_range=None, n_samples: int = SAMPLES_PER_PERIOD, sign: int = 1, tol: Tolerance | None = None) -> SampledCurve:
    """Borderline elastica; for p > 2 the default range is the loop [-K(1), K(1)].

    ``sign = -1`` gives the mirror image (curvature -2 sech_p).
    """
    PQPair(p, 1.0)
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if s_range is None:
        if p <= 2.0:
            raise DomainError("s_range is required for p <= 2")
        kk = complete_K1(p, 1.0, tol)
        s_range = (-kk, kk)
    s = _grid(s_range, n_samples)
    th, am, c, _ = e1_of_am1(p, 1.0, s, tol)
    sech = np.abs(c) ** (2.0 / p)
    x = 2.0 * th - s
    y = -sign * p / (p - 1.0) * sech ** (p - 1.0)
    return SampledCurve(
        s - s[0], np.column_stack([x, y]), sign * 2.0 * am, sign * 2.0 * sech,
        "borderline", {"p": p, "sign": sign, "s_offset": s[0]},
    )


def orbitlike(p: float, q: float, s_range, n_samples: int = SAMPLES_PER_PERIOD, tol: Tolerance | None = None) -> SampledCurve:
    """Orbitlike elastica with modulus q."""
    PQPair(p, q)
    if not 0.0 < q < 1.0:
        raise DomainError("orbitlike elastica need 0 < q < 1")
    s = _grid(s_range, n_samples)
    e2, am, c, _ = e2_of_am2(p / (p - 1.0), p, q, s, tol)
    dn = ((1.0 - q) * (1.0 + q) + (q * c) ** 2) ** (1.0 / p)
    x = (2.0 * e2 + (q * q - 2.0) * s) / (q * q)
    y = -p / (p - 1.0) * dn ** (p - 1.0) / (q * q)
    return SampledCurve(s - s[0], np.column_stack([x, y]), 2.0 * am, 2.0 * dn, "orbitlike", {"p": p, "q": q, "s_offset": s[0]})


def circular(s_range=(0.0, 2 * math.pi), n_samples: int = SAMPLES_PER_PERIOD) -> SampledCurve:
    s = _grid(s_range, n_samples)
    return SampledCurve(
        s - s[0], np.column_stack([np.cos(s), np.sin(s)]), s + 0.5 * math.pi, np.ones_like(s),
        "circular", {"s_offset": s[0]},
    )


def linear(s_range=(0.0, 1.0), n_samples: int = 2) -> SampledCurve:
    s = _grid(s_range, n_samples)
    z = np.zeros_like(s)
    return SampledCurve(s - s[0], np.column_stack([s, z]), z, z, "linear", {"s_offset": s[0]})


def segment(length: float, angle: float = 0.0, n_samples: int = 2) -> SampledCurve:
    """Straight segment from the origin in direction ``angle``."""
    if not length > 0:
        raise DomainError("segment length must be positive")
    s = np.linspace(0.0, length, max(int(n_samples), 2))
    d = np.array([math.cos(angle), math.sin(angle)])
    z = np.zeros_like(s)
    return SampledCurve(s, s[:, None] * d, z + angle, z, "linear", {"length": length})


def concat(curves: Sequence[SampledCurve]) -> SampledCurve:
    """Join curves end to start by translation; the first starts at the origin.

    The first sample of every later piece duplicates the previous endpoint
    and is dropped. Tangent angles are shifted by multiples of 2 pi to stay
    continuous across joins.
    """
    curves = list(curves)
    if not curves:
        raise DomainError("concat needs at least one curve")
    first = curves[0].translated(-curves[0].xy[0])
    if len(curves) == 1:
        return first
    s, xy, th, k = [first.s], [first.xy], [first.theta], [first.k]
    end, s_end, th_end = first.xy[-1], first.s[-1], first.theta[-1]
    for c in curves[1:]:
        shift = 2.0 * math.pi * round((th_end - c.theta[0]) / (2.0 * math.pi))
        xy.append((c.xy[1:] - c.xy[0]) + end)
        s.append(c.s[1:] + s_end)
        th.append(c.theta[1:] + shift)
        k.append(c.k[1:])
        end, s_end, th_end = xy[-1][-1], s[-1][-1], th[-1][-1]
    pieces = [{"family": c.family, "length": c.length, **{kk: v for kk, v in c.params.items() if kk != "pieces"}} for c in curves]
    return SampledCurve(np.concatenate(s), np.concatenate(xy), np.concatenate(th), np.concatenate(k), "composite", {"pieces": pieces})


# ----------------------------------------------------- pinned constructions


def _samples(n_halves: int, n_samples: int | None) -> int:
    return n_samples if n_samples else n_halves * (SAMPLES_PER_PERIOD // 2) + 1


def _wave_pinned(p: float, q: float, r: float, n: int, kind: str, n_samples: int | None, tol) -> SampledCurve:
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    n = int(n)
    kk = complete_K1(p, q, tol)
    base = wavelike(p, q, (-kk, (2 * n - 1) * kk), _samples(n, n_samples), tol)
    params = {"p": p, "q": q, "r": r, "n": n, "kind": kind, "K": kk}
    curve = base._replace(params=params).normalized()
    return curve


def build_arc(p: float, r: float, n: int = 1, n_samples: int | None = None, tol: Tolerance | None = None) -> SampledCurve:
    """(p, r, n)-arc: n half-periods of the wavelike elastica with Q = r."""
    q = moduli.solve_arc_modulus(p, r, tol)
    return _wave_pinned(p, q, r, n, "arc", n_samples, tol)


def build_loop(p: float, r: float, n: int = 1, n_samples: int | None = None, tol: Tolerance | None = None) -> SampledCurve:
    """(p, r, n)-loop: n half-periods of the wavelike elastica with Q = -r."""
    q = moduli.solve_loop_modulus(p, r, tol)
    c = _wave_pinned(p, q, r, n, "loop", n_samples, tol)
    params = dict(c.params)
    params["self_intersection"] = loop_self_intersection(p, q, tol)
    return c._replace(params=params)


def build_figure_eight(p: float, n_halves: int = 1, n_samples: int | None = None, tol: Tolerance | None = None) -> SampledCurve:
    """n_halves/2-fold figure-eight; closed when n_halves is even."""
    return build_arc(p, 0.0, n_halves, n_samples, tol)


def loop_self_intersection(p: float, q: float, tol: Tolerance | None = None) -> float:
    """Offset sigma in (0, K1) with gamma_w(sigma) = gamma_w(-sigma).

    In the loop parameter this is gamma(K - sigma) = gamma(K + sigma).
    Requires Q(p, q) < 0, i.e. q > q_star.
    """
    kk = complete_K1(p, q, tol)

    def xw(s: float) -> float:
        e1 = e1_of_am1(p, q, s, tol)[0]
        return 2.0 * e1 - s

    if xw(kk) >= 0:
        raise DomainError("no self-intersection: modulus does not give a loop")
    grid = np.linspace(0.0, kk, 65)[1:]
    vals = np.array([xw(g) for g in grid])
    i = int(np.argmax(vals < 0))
    lo = grid[i - 1] if i > 0 else grid[0] * 1e-3
    return newton_bisect(xw, lambda s: 1.0 - 2.0 * (q * e1_of_am1(p, q, s, tol)[3]) ** 2, lo, grid[i], ftol=1e-14)


@dataclass(frozen=True)
class FlatCoreSpec:
    """Parameters of a flat-core: loop signs and the n+1 segment lengths."""

    p: float
    r: float
    n: int
    sigma: tuple
    L_vec: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(int(x) for x in self.sigma))
        object.__setattr__(self, "L_vec", tuple(float(x) for x in self.L_vec))
        if not self.p > 2.0:
            raise ConstraintError("flat-cores exist only for p > 2")
        if not (1.0 / (self.p - 1.0) <= self.r < 1.0):
            raise ConstraintError(f"flat-cores need 1/(p-1) <= r < 1; got r = {self.r}")
        if len(self.sigma) != self.n or any(x not in (1, -1) for x in self.sigma):
            raise ConstraintError("sigma must hold n signs")
        if len(self.L_vec) != self.n + 1 or any(x < 0 for x in self.L_vec):
            raise ConstraintError("L_vec must hold n + 1 nonnegative lengths")
        target = self.required_total()
        if abs(sum(self.L_vec) - target) > 1e-9 * max(1.0, target):
            raise ConstraintError(
                f"segment lengths must sum to 2n (r - 1/(p-1)) / (1 - r) K_p(1) = {target:.15g}; got {sum(self.L_vec):.15g}"
            )

    def required_total(self) -> float:
        return flatcore_segment_total(self.p, self.r, self.n)

    @classmethod
    def equal(cls, p: float, r: float, n: int, sigma=None) -> "FlatCoreSpec":
        """Instance with all segment lengths equal and all loops positive."""
        total = flatcore_segment_total(p, r, n)
        sigma = (1,) * n if sigma is None else sigma
        return cls(p, r, n, sigma, (total / (n + 1),) * (n + 1))


def flatcore_segment_total(p: float, r: float, n: int) -> float:
    """Sum of straight lengths forced by the endpoint ratio."""
    return 2.0 * n * (r - 1.0 / (p - 1.0)) / (1.0 - r) * complete_K1(p, 1.0)


def flatcore_length(p: float, r: float, n: int) -> float:
    return 2.0 * n * (1.0 - 1.0 / (p - 1.0)) / (1.0 - r) * complete_K1(p, 1.0)


def build_flatcore(spec: FlatCoreSpec, n_samples: int | None = None, tol: Tolerance | None = None) -> SampledCurve:
    """Segments alternating with borderline loops, segment first and last.

    ``n_samples`` counts samples per loop; segments use the same spacing.
    """
    per_loop = n_samples or SAMPLES_PER_PERIOD
    kk = complete_K1(spec.p, 1.0, tol)
    h = 2.0 * kk / (per_loop - 1)
    pieces = []

    def seg(length):
        # lengths below rounding level cannot be sampled with increasing s; their geometric effect is nil
        if length > 1e-12 * kk:
            pieces.append(segment(length, math.pi, max(2, int(round(length / h)) + 1)))

    for sign, length in zip(spec.sigma, spec.L_vec):
        seg(length)
        pieces.append(borderline(spec.p, (-kk, kk), per_loop, sign, tol))
    seg(spec.L_vec[-1])
    c = concat(pieces)
    params = {"p": spec.p, "r": spec.r, "n": spec.n, "sigma": list(spec.sigma), "L_vec": list(spec.L_vec), "kind": "flatcore", "K": kk}
    return c._replace(family="flatcore", params=params).normalized()


def flatcore_curvature(spec: FlatCoreSpec, s, tol: Tolerance | None = None) -> np.ndarray:
    """Curvature sum of shifted sech_p bumps at the loop centres."""
    from .pelliptic import sech_p

    kk = complete_K1(spec.p, 1.0, tol)
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    cum = 0.0
    for i, (sign, length) in enumerate(zip(spec.sigma, spec.L_vec), start=1):
        cum += length
        centre = (2 * i - 1) * kk + cum
        out = out + sign * 2.0 * sech_p(spec.p, s - centre, tol)
    return out


# ------------------------------------------------------------ leafed curves


@dataclass(frozen=True, eq=False)
class LeafTuple:
    """Junction tangents omega_1..omega_m and the rotation sign of each leaf.

    Leaf i starts with tangent omega_{i-1} (omega_0 = +x) and ends with
    omega_i = R(sign_i * 2 phi_star) omega_{i-1}.
    """

    m: int
    omegas: np.ndarray
    signs: tuple
    p: float
    closed: bool

    def __post_init__(self):
        object.__setattr__(self, "omegas", _frozen(self.omegas))


def _odd_denominator(p, m: int) -> int | None:
    """Smallest odd j <= m with j * phi_star / pi an integer (within 1e-9)."""
    x = moduli.phi_over_pi(p)
    for j in range(1, m + 1, 2):
        v = j * x
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return j
        elif abs(v - round(v)) < 1e-9:
            return j
    return None


def leaf_tuple(p, m: int, closed: bool = True, sign_pattern: Sequence[int] | None = None) -> LeafTuple:
    """Tangent data for an m-leafed elastica; ``p`` may be a SpecialExponent."""
    if int(m) != m or m < 2:
        raise DomainError("m must be an integer >= 2")
    m = int(m)
    ratio = moduli.phi_over_pi(p)
    phi = float(ratio) * math.pi
    if sign_pattern is None:
        if m % 2 == 0 or not closed:
            sign_pattern = [(-1) ** (i + 1) for i in range(m)]
        else:
            j = _odd_denominator(p, m)
            if j is None:
                raise ConstraintError(f"no closed {m}-leafed elastica at p = {float(p):.12g}")
            sign_pattern = [-1] * j + [(-1) ** (i + 1) for i in range(m - j)]
    signs = tuple(int(x) for x in sign_pattern)
    if len(signs) != m or any(x not in (1, -1) for x in signs):
        raise DomainError("sign_pattern must hold m entries of +-1")
    if closed:
        total = sum(signs) * ratio
        ok = total.denominator == 1 if isinstance(total, Fraction) else abs(total - round(total)) < 1e-9 * m
        if not ok:
            raise ConstraintError("sign pattern does not close: sum(sign) * 2 phi_star is not a multiple of 2 pi")
    angles = np.cumsum([s * 2.0 * phi for s in signs])
    omegas = np.column_stack([np.cos(angles), np.sin(angles)])
    if closed:
        omegas[-1] = (1.0, 0.0)
    return LeafTuple(m, omegas, signs, float(p), closed)


def leaf_pieces(p, tup: LeafTuple, leaf_length=1.0, n_samples: int | None = None,
                tol: Tolerance | None = None) -> list[SampledCurve]:
    """The m half-fold figure-eight leaves, rotated to follow the tuple's tangents.

    ``leaf_length`` is one length for every leaf or a sequence of m lengths.
    Every leaf starts and ends at the origin.
    """
    lengths = np.broadcast_to(np.asarray(leaf_length, dtype=float), (tup.m,))
    if np.any(lengths <= 0):
        raise DomainError("leaf lengths must be positive")
    leaf = build_figure_eight(float(p), 1, n_samples, tol)
    mirror = leaf.reflected()
    start = np.vstack([[1.0, 0.0], tup.omegas[:-1]])
    pieces = []
    for sign, w, ell in zip(tup.signs, start, lengths):
        base = leaf if sign < 0 else mirror
        pieces.append(base.scaled(ell / leaf.length).rotated(math.atan2(w[1], w[0])))
    return pieces


def build_leafed(p, tup: LeafTuple, leaf_length=1.0, n_samples: int | None = None, tol: Tolerance | None = None) -> SampledCurve:
    """Concatenate m half-fold figure-eights following the tuple's tangents.

    ``n_samples`` counts samples per leaf; ``leaf_length`` is as in ``leaf_pieces``.
    """
    c = concat(leaf_pieces(p, tup, leaf_length, n_samples, tol))
    lengths = np.broadcast_to(np.asarray(leaf_length, dtype=float), (tup.m,))
    ell = float(lengths[0]) if np.all(lengths == lengths[0]) else lengths.tolist()
    params = {"p": float(p), "m": tup.m, "signs": list(tup.signs), "leaf_length": ell, "closed": tup.closed}
    return c._replace(params=params)
