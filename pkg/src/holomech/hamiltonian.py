"""Complex Hamiltonian H = p^2/(2m) + v(z) and its real descriptions.

Phase-space conventions used everywhere in this package:

* complex frame: (z, p) in C^2 with z = x + i y, p = p + i q;
* real frame:    w = (w1, w2, w3, w4) = (x, p, y, q) in R^4;
* Darboux frame: xi = (x1, p1, x2, p2) = sqrt(2) * (x, p, q, y), the
  canonical coordinates of the zero-parameter symplectic structure.

The energy splits as H = H_r + i H_i with

    H_r = (p^2 - q^2)/(2m) + v_r(x, y),      H_i = p q / m + v_i(x, y),

and the real description is generated by h(xi) = 2 H_r with H_i playing the
role of an independent integral of motion.  All functions here are pure and
all containers immutable, so they are safe for concurrent use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .potentials import (
    Expr,
    PotentialOverflowError,
    compile_potential,
    derivative,
    parse_potential,
    to_source,
)

__all__ = [
    "ComplexPhasePoint",
    "RealPhasePoint",
    "DarbouxPoint",
    "SystemSpec",
    "hamiltonian",
    "hamiltonian_split",
    "darboux_hamiltonian",
    "darboux_invariant",
    "w_to_darboux",
    "darboux_to_w",
]

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ComplexPhasePoint:
    """Point (z, p) of the complex phase space C^2."""

    z: complex
    p: complex

    def to_w(self) -> np.ndarray:
        return np.array([self.z.real, self.p.real, self.z.imag, self.p.imag])


@dataclass(frozen=True)
class RealPhasePoint:
    """Real image w = (x, p, y, q) of a complex phase point."""

    x: float
    p: float
    y: float
    q: float

    @classmethod
    def from_array(cls, w) -> "RealPhasePoint":
        x, p, y, q = (float(c) for c in w)
        return cls(x, p, y, q)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p, self.y, self.q])

    def to_complex(self) -> ComplexPhasePoint:
        return ComplexPhasePoint(complex(self.x, self.y), complex(self.p, self.q))


@dataclass(frozen=True)
class DarbouxPoint:
    """Canonical coordinates (x1, p1, x2, p2) of the zero-parameter frame."""

    x1: float
    p1: float
    x2: float
    p2: float

    @classmethod
    def from_array(cls, xi) -> "DarbouxPoint":
        x1, p1, x2, p2 = (float(c) for c in xi)
        return cls(x1, p1, x2, p2)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.p1, self.x2, self.p2])


def w_to_darboux(w: np.ndarray) -> np.ndarray:
    """(x, p, y, q) -> (x1, p1, x2, p2) = sqrt(2) (x, p, q, y)."""
    return np.array([_SQRT2 * w[0], _SQRT2 * w[1], _SQRT2 * w[3], _SQRT2 * w[2]])


def darboux_to_w(xi: np.ndarray) -> np.ndarray:
    """(x1, p1, x2, p2) -> (x, p, y, q); exact inverse of w_to_darboux."""
    return np.array([xi[0] / _SQRT2, xi[1] / _SQRT2, xi[3] / _SQRT2, xi[2] / _SQRT2])


@dataclass(frozen=True)
class SystemSpec:
    """An entire potential plus a particle mass.

    Compiles the potential and its exact symbolic derivative once, so
    integrators can evaluate both at every step without re-walking the AST.
    """

    potential: Expr
    mass: float = 0.5
    dv_expr: Expr = field(init=False, repr=False, compare=False)
    _v: Callable[[complex], complex] = field(init=False, repr=False, compare=False)
    _dv: Callable[[complex], complex] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.mass > 0.0 and math.isfinite(self.mass)):
            raise ValueError(f"mass must be a positive finite real, got {self.mass!r}")
        object.__setattr__(self, "dv_expr", derivative(self.potential))
        object.__setattr__(self, "_v", compile_potential(self.potential))
        object.__setattr__(self, "_dv", compile_potential(self.dv_expr))

    @classmethod
    def from_source(cls, text: str, mass: float = 0.5) -> "SystemSpec":
        return cls(parse_potential(text), mass)

    @property
    def source(self) -> str:
        return to_source(self.potential)

    def v(self, z: complex) -> complex:
        """Checked potential value; raises PotentialOverflowError on overflow."""
        try:
            value = self._v(z)
        except OverflowError as exc:
            raise PotentialOverflowError(f"overflow evaluating v at z={z!r}") from exc
        if not cmath.isfinite(value):
            raise PotentialOverflowError(f"non-finite v at z={z!r}")
        return value

    def dv(self, z: complex) -> complex:
        """Checked derivative value dv/dz."""
        try:
            value = self._dv(z)
        except OverflowError as exc:
            raise PotentialOverflowError(f"overflow evaluating dv at z={z!r}") from exc
        if not cmath.isfinite(value):
            raise PotentialOverflowError(f"non-finite dv at z={z!r}")
        return value


def hamiltonian(spec: SystemSpec, z: complex, p: complex) -> complex:
    """Complex energy H(z, p) = p^2/(2m) + v(z)."""
    return p * p / (2.0 * spec.mass) + spec.v(z)


def hamiltonian_split(spec: SystemSpec, w) -> tuple[float, float]:
    """(H_r, H_i) at the real phase point w = (x, p, y, q).

    Agrees with the real and imaginary parts of ``hamiltonian`` at the
    corresponding complex point.
    """
    x, p, y, q = (float(c) for c in w)
    v = spec.v(complex(x, y))
    m = spec.mass
    return (p * p - q * q) / (2.0 * m) + v.real, p * q / m + v.imag


def darboux_hamiltonian(spec: SystemSpec, xi) -> float:
    """Equivalent real Hamiltonian h(xi) = 2 H_r.

    Spelled out, h = (p1^2 - x2^2)/(2m) + 2 v_r(x1/sqrt2, p2/sqrt2); it is
    computed as twice H_r of the inverse-mapped point so that h = 2 H_r holds
    by construction, floating-point operation for operation.
    """
    xi = np.asarray(xi, dtype=float)
    return 2.0 * hamiltonian_split(spec, darboux_to_w(xi))[0]


def darboux_invariant(spec: SystemSpec, xi) -> float:
    """Integral of motion H_i(xi) = x2 p1/(2m) + v_i(x1/sqrt2, p2/sqrt2)."""
    xi = np.asarray(xi, dtype=float)
    return hamiltonian_split(spec, darboux_to_w(xi))[1]
