"""Li-Yau type multiplicity bounds and the existence of leafed equality cases."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from . import moduli
from .curves import SampledCurve
from .energy import bending_quadrature, varpi_star
from .errors import DomainError

ANGLE_TOL = 1e-9
# |j x - round(j x)| between ANGLE_TOL and this is reported as indeterminate
_GRAY_TOL = 1e-6


def liyau_bound(p, m: int, closed: bool = True) -> float:
    """varpi_star * m^p for closed curves, varpi_star * (m-1)^p for open ones."""
    if int(m) != m or m < 2:
        raise DomainError("multiplicity m must be an integer >= 2")
    return varpi_star(float(p)) * (m if closed else m - 1) ** float(p)


def combined_energy(lengths, bendings, p: float) -> float:
    """Normalized energy (sum L)^(p-1) * sum B of a curve split into pieces."""
    lengths = np.asarray(lengths, dtype=float)
    bendings = np.asarray(bendings, dtype=float)
    return float(lengths.sum() ** (p - 1.0) * bendings.sum())


@dataclass(frozen=True)
class CurveCheck:
    multiplicity: int
    normalized_energy: float
    bound: float
    satisfies_bound: bool
    gap: float
    closed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def _runs(indices: np.ndarray, n: int, closed: bool) -> list[np.ndarray]:
    """Split sorted sample indices into parameter-contiguous runs."""
    idx = np.sort(indices)
    if closed:
        # the last sample repeats the first parameter value
        idx = np.unique(np.where(idx == n - 1, 0, idx))
    breaks = np.flatnonzero(np.diff(idx) > 1)
    runs = np.split(idx, breaks + 1)
    if closed and len(runs) > 1 and runs[0][0] == 0 and runs[-1][-1] == n - 2:
        runs[0] = np.concatenate([runs[-1], runs[0]])
        runs.pop()
    return runs


def is_closed(curve: SampledCurve, tol_factor: float = 1e-6) -> bool:
    """Endpoints coincide and the tangent directions agree (C1 closure)."""
    if curve.closure_gap() > tol_factor * curve.diameter():
        return False
    turn = curve.theta[-1] - curve.theta[0]
    return bool(abs(turn - 2 * np.pi * round(turn / (2 * np.pi))) < 1e-6)


def multiplicity(curve: SampledCurve, tol_factor: float = 1e-6, closed: bool | None = None) -> int:
    """Largest number of distinct parameters whose samples coincide within tolerance.

    Samples within ``tol_factor * diameter`` of each other are linked
    (single linkage). Within a cluster, consecutive sample indices count as
    one parameter. A cluster holding consecutive samples means the tolerance
    exceeds the sample spacing, which is reported as an error.
    """
    xy = curve.xy
    n = len(xy)
    diam = curve.diameter()
    tol = tol_factor * diam
    if closed is None:
        closed = is_closed(curve, tol_factor)
    pairs = cKDTree(xy).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return 1
    # union-find over linked samples
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    roots = np.array([find(i) for i in np.unique(pairs)])
    members = np.unique(pairs)
    best = 1
    for root in np.unique(roots):
        runs = _runs(members[roots == root], n, closed)
        if any(len(r) > 1 for r in runs):
            raise DomainError("multiplicity tolerance is coarser than the sample spacing")
        best = max(best, len(runs))
    return best


def check_curve(curve: SampledCurve, p: float, multiplicity_point_tolerance: float = 1e-6,
                rel_slack: float = 1e-6) -> CurveCheck:
    """Detect the multiplicity of ``curve`` and compare its energy with the bound.

    ``gap`` is (energy - bound) / bound; ``satisfies_bound`` allows a
    relative quadrature slack of ``rel_slack``.
    """
    closed = is_closed(curve, multiplicity_point_tolerance)
    m = multiplicity(curve, multiplicity_point_tolerance, closed)
    e = bending_quadrature(curve, p).normalized
    if m < 2:
        return CurveCheck(m, e, 0.0, True, float("inf"), closed)
    bound = liyau_bound(p, m, closed)
    gap = (e - bound) / bound
    return CurveCheck(m, e, bound, gap >= -rel_slack, gap, closed)


@dataclass(frozen=True)
class Existence:
    exists: bool | None  # None: indeterminate at the angle tolerance
    witness: str

    def to_dict(self) -> dict:
        return asdict(self)


def leafed_exists(p, m: int) -> Existence:
    """Whether a closed m-leafed elastica exists at exponent ``p``.

    Even m always works (figure-eights). For odd m the angle phi_star/pi must
    equal a fraction with odd denominator j <= m; ``p`` given as a
    SpecialExponent is decided exactly.
    """
    if int(m) != m or m < 2:
        raise DomainError("m must be an integer >= 2")
    m = int(m)
    if m % 2 == 0:
        return Existence(True, "figure_eight")
    x = moduli.phi_over_pi(p)
    if isinstance(x, Fraction):
        j = x.denominator
        if j % 2 == 1 and j <= m:
            return Existence(True, "rotational_leafed" if j == m else "mixed_leafed")
        return Existence(False, "none")
    best_err = float("inf")
    for j in range(1, m + 1, 2):
        err = abs(j * x - round(j * x))
        best_err = min(best_err, err)
        if err < ANGLE_TOL:
            return Existence(True, "rotational_leafed" if j == m else "mixed_leafed")
    if best_err < _GRAY_TOL:
        return Existence(None, "none")
    return Existence(False, "none")


@dataclass(frozen=True)
class OptimalityTable:
    p: float
    m_odd: int
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"p": self.p, "m_odd": self.m_odd, "rows": list(self.rows)}

    def to_text(self) -> str:
        lines = [f"p = {self.p:.12g}", f"{'m':>4}  {'bound':>24}  {'attainable':>10}  witness"]
        for row in self.rows:
            att = {True: "yes", False: "no", None: "?"}[row["attainable"]]
            lines.append(f"{row['m']:>4}  {row['bound']:>24.17g}  {att:>10}  {row['witness']}")
        return "\n".join(lines) + "\n"


def thresholding_table(m_odd: int, m_max: int) -> OptimalityTable:
    """Attainability of the closed bound for m = 2..m_max at p = p_mn(m_odd, 1)."""
    if int(m_odd) != m_odd or m_odd < 3 or m_odd % 2 == 0:
        raise DomainError("m_odd must be an odd integer >= 3")
    if m_max < 2:
        raise DomainError("m_max must be >= 2")
    sp = moduli.p_mn(int(m_odd), 1)
    vs = varpi_star(sp.p_value)
    rows = []
    for m in range(2, int(m_max) + 1):
        ex = leafed_exists(sp, m)
        rows.append({"m": m, "bound": vs * m ** sp.p_value, "attainable": ex.exists, "witness": ex.witness})
    return OptimalityTable(sp.p_value, int(m_odd), rows)
