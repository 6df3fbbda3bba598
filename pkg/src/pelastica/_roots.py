"""Bracketed Newton iterations with bisection fallback."""
from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ConvergenceError

_EPS = np.finfo(float).eps


def newton_bisect(
    f: Callable[[float], float],
    df: Callable[[float], float] | None,
    lo: float,
    hi: float,
    x0: float | None = None,
    ftol: float = 1e-12,
    maxiter: int = 200,
) -> float:
    """Find a root of ``f`` in ``[lo, hi]`` where ``f(lo)`` and ``f(hi)`` differ in sign.

    Converges when ``|f(x)| <= ftol`` or the bracket shrinks to a few ulps.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ConvergenceError(f"root not bracketed on [{lo}, {hi}]: f = {flo}, {fhi}")
    increasing = fhi > 0
    x = 0.5 * (lo + hi) if x0 is None or not (lo < x0 < hi) else x0
    for _ in range(maxiter):
        fx = f(x)
        if abs(fx) <= ftol:
            return x
        if (fx > 0) == increasing:
            hi = x
        else:
            lo = x
        if hi - lo <= 4 * _EPS * max(abs(lo), abs(hi), 1e-300):
            return x
        step = None
        if df is not None:
            d = df(x)
            if np.isfinite(d) and d != 0:
                step = x - fx / d
        if step is None or not (lo < step < hi):
            step = 0.5 * (lo + hi)
        x = step
    raise ConvergenceError(f"root finding did not converge; last residual {fx:.3e}")


def newton_bisect_vec(
    g: Callable[[np.ndarray], np.ndarray],
    dg: Callable[[np.ndarray], np.ndarray],
    target: np.ndarray,
    lo: np.ndarray,
    hi: np.ndarray,
    x0: np.ndarray,
    ftol: np.ndarray | float,
    maxiter: int = 200,
) -> np.ndarray:
    """Solve ``g(x) = target`` elementwise for increasing ``g`` on ``[lo, hi]``."""
    target = np.asarray(target, dtype=float)
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    ftol = np.broadcast_to(np.asarray(ftol, dtype=float), target.shape)
    active = np.ones(target.shape, dtype=bool)
    for _ in range(maxiter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return x
        xa = x[idx]
        r = g(xa) - target[idx]
        done = np.abs(r) <= ftol[idx]
        above = r > 0
        hi[idx] = np.where(above, xa, hi[idx])
        lo[idx] = np.where(above, lo[idx], xa)
        width = hi[idx] - lo[idx]
        done |= width <= 4 * _EPS * np.maximum(np.abs(hi[idx]), 1e-300)
        d = dg(xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = xa - r / d
        bad = ~np.isfinite(step) | (step <= lo[idx]) | (step >= hi[idx])
        step = np.where(bad, 0.5 * (lo[idx] + hi[idx]), step)
        # Newton steps smaller than rounding also terminate
        done |= (~bad) & (np.abs(step - xa) <= 2 * _EPS * np.maximum(np.abs(xa), 1e-300))
        x[idx] = np.where(done, xa, step)
        active[idx[done]] = False
    raise ConvergenceError("amplitude inversion did not converge")
