"""Domain types and the effective potential for the planar two-electron dot.

The relative-motion radial equation in Hartree units is

    u''(r) + [eta - v(r) - omega^2 r^2 - (l^2 - 1/4)/r^2] u(r) = 0

with v(r) = 1/r (Coulomb repulsion), ln r (planar Coulomb analogue) or 0
(non-interacting electrons).  Everything downstream (exact polynomial
solutions, Numerov shooting) works on this one equation.

All types are immutable after construction and all functions are pure, so
they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class NumericsError(RuntimeError):
    """A numerical procedure failed to converge or the grid is inadequate."""


class PotentialKind(Enum):
    """Which interaction term enters the effective potential."""

    COULOMB = "coulomb"   # v(r) = 1/r
    LOG = "log"           # v(r) = ln r
    NONE = "none"         # v(r) = 0, non-interacting electrons

    @classmethod
    def from_name(cls, name: str) -> "PotentialKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(
                f"unknown potential {name!r}; expected one of "
                f"{[k.value for k in cls]}"
            ) from None


@dataclass(frozen=True)
class QuantumNumbers:
    """Angular momentum l >= 0 and, in the analytic context, degree n >= 1."""

    l: int
    n: int | None = None

    def __post_init__(self):
        if self.l < 0:
            raise ValueError(f"l must be >= 0, got {self.l}")
        if self.n is not None and self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")


@dataclass(frozen=True)
class RadialProblem:
    """One radial eigenproblem: potential kind, frequency, l and grid.

    omega is the relative-motion frequency (half the trap frequency).
    Grid defaults: r_min 1e-3, r_max 40/sqrt(omega) (scales with the
    harmonic turning point), 20000 uniformly spaced points.
    """

    potential: PotentialKind
    omega: float
    l: int = 0
    r_min: float = 1e-3
    r_max: float | None = None
    steps: int = 20000

    def __post_init__(self):
        if self.omega <= 0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if self.l < 0:
            raise ValueError(f"l must be >= 0, got {self.l}")
        if self.r_max is None:
            object.__setattr__(self, "r_max", 40.0 / np.sqrt(self.omega))
        if not 0 < self.r_min < self.r_max:
            raise ValueError(
                f"need 0 < r_min < r_max, got r_min={self.r_min}, r_max={self.r_max}"
            )
        if self.steps < 1000:
            raise ValueError(f"steps must be >= 1000, got {self.steps}")

    @property
    def h(self) -> float:
        return (self.r_max - self.r_min) / (self.steps - 1)

    def grid(self) -> np.ndarray:
        r = np.linspace(self.r_min, self.r_max, self.steps)
        r.setflags(write=False)
        return r


@dataclass(frozen=True)
class RadialWaveFunction:
    """Samples u(r_i) on a uniform radial grid (Bohr radii)."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.shape != v.shape:
            raise ValueError("grid and values must have the same length")
        g.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class NumericalEigenstate:
    """One shooting eigenvalue: energy, interior node count, normalized u."""

    eta: float
    nodes: int
    wave: RadialWaveFunction


def effective_potential(potential: PotentialKind, omega: float, l: int, r):
    """V_eff(r) = v(r) + omega^2 r^2 + (l^2 - 1/4)/r^2, in Hartree.

    Accepts a scalar radius or an array.  In two dimensions the l = 0
    centrifugal term is -1/(4 r^2): attractive, which is what makes the
    l = 0 sector special for bound states.
    """
    if omega <= 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if l < 0:
        raise ValueError(f"l must be >= 0, got {l}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("r must be > 0")
    out = (omega * omega) * r * r + (l * l - 0.25) / (r * r)
    if potential is PotentialKind.COULOMB:
        out = out + 1.0 / r
    elif potential is PotentialKind.LOG:
        out = out + np.log(r)
    return out if out.ndim else float(out)
