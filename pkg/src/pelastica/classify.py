"""Enumerate pinned critical points for given endpoints and length."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import curves, energy, moduli
from ._quadrature import Tolerance
from .errors import ConstraintError, DomainError, NoSolutionError

_ADMISSIBLE = 1.0 - 1e-12


@dataclass(frozen=True)
class PinnedProblem:
    """Endpoints P0, P1, total length L and exponent p."""

    P0: tuple
    P1: tuple
    L: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "P0", tuple(float(v) for v in self.P0))
        object.__setattr__(self, "P1", tuple(float(v) for v in self.P1))
        if len(self.P0) != 2 or len(self.P1) != 2:
            raise DomainError("endpoints must be planar points")
        if not (1.0 < self.p < math.inf):
            raise DomainError("p must lie in (1, inf)")
        if not self.L > 0:
            raise DomainError("length must be positive")
        if not self.distance < self.L * _ADMISSIBLE:
            raise DomainError(f"inadmissible: |P0 - P1| = {self.distance} must be < L = {self.L}")

    @property
    def distance(self) -> float:
        return math.hypot(self.P1[0] - self.P0[0], self.P1[1] - self.P0[1])

    @property
    def r(self) -> float:
        return self.distance / self.L

    @classmethod
    def from_ratio(cls, p: float, r: float, L: float = 1.0) -> "PinnedProblem":
        return cls((0.0, 0.0), (r * L, 0.0), L, p)


@dataclass(frozen=True)
class FamilyEntry:
    kind: str  # figure_eight, arc, loop, flatcore_family
    n: int
    q: float | None
    energy: float
    countable: bool
    resolved: bool = True  # False: modulus beyond 1 - 1e-12; energy is a lower bound
    constraint: str | None = None
    degrees_of_freedom: int | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        return {k: v for k, v in d.items() if v is not None or k == "q"}


@dataclass(frozen=True)
class ClassificationReport:
    p: float
    r: float
    regime: str
    families: list = field(default_factory=list)
    minimizer: FamilyEntry | None = None

    def to_dict(self) -> dict:
        m = self.minimizer
        return {
            "p": self.p,
            "r": self.r,
            "regime": self.regime,
            "families": [f.to_dict() for f in self.families],
            "minimizer": {"kind": "arc", "n": 1, "q": m.q, "energy": m.energy},
        }

    def kinds(self) -> set[str]:
        return {f.kind for f in self.families}


def regime(p: float, r: float) -> str:
    if r == 0.0:
        return "r_zero"
    return "r_small" if r < 1.0 / (p - 1.0) else "r_large"


def _loop_entry(p: float, r: float, n: int, tol) -> FamilyEntry:
    try:
        q = moduli.solve_loop_modulus(p, r, tol)
    except NoSolutionError:
        # energy increases with q, so the value at the cap bounds it from below
        return FamilyEntry("loop", n, None, energy.wave_energy_at(p, moduli.Q_CAP, n, tol), True, resolved=False)
    return FamilyEntry("loop", n, q, energy.wave_energy_at(p, q, n, tol), True)


def classify(problem: PinnedProblem, n_max: int = 5, tol: Tolerance | None = None) -> ClassificationReport:
    """All pinned critical-point families with n <= n_max and their energies."""
    if int(n_max) != n_max or n_max < 1:
        raise DomainError("n_max must be a positive integer")
    p, r = problem.p, problem.r
    reg = regime(p, r)
    fams: list[FamilyEntry] = []
    if reg == "r_zero":
        qs = moduli.q_star(p, tol)
        for n in range(1, n_max + 1):
            fams.append(FamilyEntry("figure_eight", n, qs, energy.wave_energy_at(p, qs, n, tol), True))
    else:
        qa = moduli.solve_arc_modulus(p, r, tol)
        for n in range(1, n_max + 1):
            fams.append(FamilyEntry("arc", n, qa, energy.wave_energy_at(p, qa, n, tol), True))
        if reg == "r_small":
            fams.extend(_loop_entry(p, r, n, tol) for n in range(1, n_max + 1))
        elif p > 2.0:
            for n in range(1, n_max + 1):
                fams.append(FamilyEntry(
                    "flatcore_family", n, None, energy.normalized_energy_flat(p, r, n, tol), False,
                    constraint=f"sum(L_j, j=1..{n + 1}) = {curves.flatcore_segment_total(p, r, n):.17g}",
                    degrees_of_freedom=2 * n - 1,
                ))
    return ClassificationReport(p, r, reg, fams, fams[0])


def realize(entry: FamilyEntry, problem: PinnedProblem, n_samples: int | None = None,
            flatcore: curves.FlatCoreSpec | None = None, tol: Tolerance | None = None) -> curves.SampledCurve:
    """Place the canonical curve of ``entry`` so it runs from P0 to P1 with length L."""
    p, r = problem.p, problem.r
    if entry.kind in ("arc", "figure_eight"):
        c = curves.build_arc(p, r, entry.n, n_samples, tol)
    elif entry.kind == "loop":
        c = curves.build_loop(p, r, entry.n, n_samples, tol)
    elif entry.kind == "flatcore_family":
        spec = flatcore or curves.FlatCoreSpec.equal(p, r, entry.n)
        if spec.n != entry.n or abs(spec.r - r) > 1e-12 or spec.p != p:
            raise ConstraintError("flat-core instance does not match the report entry")
        c = curves.build_flatcore(spec, n_samples, tol)
    else:
        raise DomainError(f"unknown family kind {entry.kind!r}")
    c = c.scaled(problem.L / c.length)
    P0, P1 = np.asarray(problem.P0), np.asarray(problem.P1)
    chord = c.end - c.start
    if problem.distance > 0:
        target = P1 - P0
        c = c.rotated(math.atan2(target[1], target[0]) - math.atan2(chord[1], chord[0]))
    return c.translated(P0 - c.start)
