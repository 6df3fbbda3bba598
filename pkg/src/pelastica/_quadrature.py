"""Vectorized quadrature rules used by the special functions.

Two rules are provided:

* a fixed Gauss-Legendre rule for smooth integrands on short intervals;
* a level-doubling tanh-sinh rule on ``[0, V_i]`` for a batch of upper
  limits, suited to integrands with algebraic behaviour at the left end.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

# Hard cap on refinement levels; level k uses about 7 * 2**k nodes.
_MAX_LEVEL = 14
_T_MAX = 3.5


@dataclass(frozen=True)
class Tolerance:
    """Accuracy targets for quadrature and root finding."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_subdivisions: int = 60

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if int(self.max_subdivisions) < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_TOL = Tolerance()


def resolve_tol(tol: Tolerance | None) -> Tolerance:
    return DEFAULT_TOL if tol is None else tol


@lru_cache(maxsize=4)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    # map to [0, 1]
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_legendre(f: Callable[[np.ndarray], np.ndarray], upper: np.ndarray, n: int = 32) -> np.ndarray:
    """Integrate ``f`` over ``[0, upper_i]`` for each entry of ``upper``."""
    upper = np.asarray(upper, dtype=float)
    t, w = _legendre(n)
    nodes = upper[..., None] * t
    return upper * np.sum(f(nodes) * w, axis=-1)


@lru_cache(maxsize=_MAX_LEVEL + 1)
def _ts_level(level: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on (0, 1) added at ``level`` (all nodes for level 0)."""
    h = 2.0 ** -level
    if level == 0:
        j = np.arange(-int(_T_MAX), int(_T_MAX) + 1)
    else:
        j = np.arange(-int(_T_MAX / h) - 1, int(_T_MAX / h) + 2)
        j = j[j % 2 != 0]
    t = j * h
    t = t[np.abs(t) <= _T_MAX]
    s = 0.5 * np.pi * np.sinh(t)
    # x = (1 + tanh s)/2 = 1/(1 + e^{-2s}); accurate close to 0.
    x = 1.0 / (1.0 + np.exp(-2.0 * s))
    e = np.exp(-2.0 * np.abs(s))
    sech2 = 4.0 * e / (1.0 + e) ** 2
    w = h * 0.25 * np.pi * np.cosh(t) * sech2
    return x, w


def tanh_sinh_batch(
    f: Callable[[np.ndarray], np.ndarray],
    upper: np.ndarray,
    tol: Tolerance | None = None,
    start_level: int = 3,
    fixed_level: int | None = None,
) -> tuple[np.ndarray, int]:
    """Integrate ``f`` over ``[0, upper_i]`` for a batch of upper limits.

    ``f`` receives a 2-D array of nodes (batch x nodes) and must return an
    array of the same shape. Returns the integrals and the level reached.
    When ``fixed_level`` is given, that level is used without an error check.
    """
    tol = resolve_tol(tol)
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    max_level = min(_MAX_LEVEL, int(tol.max_subdivisions))
    top = fixed_level if fixed_level is not None else max(start_level, 1)
    top = min(top, max_level)

    total = np.zeros_like(upper)
    for level in range(0, top + 1):
        x, w = _ts_level(level)
        total = 0.5 * total if level > 0 else total
        total = total + np.sum(f(upper[:, None] * x) * w, axis=1)
    result = upper * total
    if fixed_level is not None:
        return result, top

    level = top
    while True:
        if level >= max_level:
            raise ConvergenceError(f"tanh-sinh quadrature did not converge within {max_level} levels")
        level += 1
        x, w = _ts_level(level)
        total = 0.5 * total + np.sum(f(upper[:, None] * x) * w, axis=1)
        new = upper * total
        err = np.abs(new - result)
        ok = err <= np.maximum(tol.abs_tol, tol.rel_tol * np.abs(new))
        result = new
        if np.all(ok | ~np.isfinite(new)):
            if not np.all(np.isfinite(new)):
                raise ConvergenceError("non-finite quadrature value")
            return result, level
