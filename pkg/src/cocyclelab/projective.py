"""Exact 2x2 complex linear algebra and the projective / Moebius action.

Matrices are plain numpy arrays of shape (2, 2), dtype complex128.
Points of the complex projective line are stored as normalized homogeneous
pairs (ProjPoint), so the horizontal and vertical directions are regular
points; the affine chart z = z1/z2 exists only for reporting and tests.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrix

__all__ = [
    "mat2",
    "operator_norm",
    "smallest_singular",
    "singular_values",
    "ProjPoint",
    "HORIZONTAL",
    "VERTICAL",
    "proj_apply",
    "angle_between",
    "mobius_apply",
    "chordal_distance",
    "INF",
]

#: Point at infinity of the Riemann sphere (image of the horizontal direction).
INF = complex("inf")

_PHASE_TOL = 1e-12
# scale-relative singularity test: |det M| <= _SING_TOL * ||M||_F^2
_SING_TOL = 1e-14


def mat2(a, b, c, d) -> np.ndarray:
    """Build a 2x2 complex matrix [[a, b], [c, d]]."""
    return np.array([[a, b], [c, d]], dtype=np.complex128)


def singular_values(m: np.ndarray) -> tuple[float, float]:
    """Both singular values of a 2x2 matrix, in decreasing order.

    Closed form: sigma1^2 is the larger root of
    x^2 - ||M||_F^2 x + |det M|^2 = 0, and sigma1 * sigma2 = |det M|.
    """
    frob2 = float(np.sum(np.abs(m) ** 2))
    absdet = abs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    disc = frob2 * frob2 - 4.0 * absdet * absdet
    if disc < 0.0:  # roundoff only
        disc = 0.0
    s1 = math.sqrt(0.5 * (frob2 + math.sqrt(disc)))
    s2 = absdet / s1 if s1 > 0.0 else 0.0
    return s1, s2


def operator_norm(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 complex matrix."""
    return singular_values(m)[0]


def smallest_singular(m: np.ndarray) -> float:
    """Smallest singular value, i.e. ||M^-1||^-1 for invertible M."""
    return singular_values(m)[1]


def _require_invertible(m: np.ndarray) -> complex:
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    frob2 = float(np.sum(np.abs(m) ** 2))
    if abs(det) <= _SING_TOL * frob2:
        raise SingularMatrix(f"matrix is numerically singular (|det| = {abs(det):g})")
    return det


def _canonical_pair(z1: complex, z2: complex) -> tuple[complex, complex]:
    norm = math.sqrt(abs(z1) ** 2 + abs(z2) ** 2)
    if norm == 0.0:
        raise ValueError("zero vector does not define a projective point")
    z1, z2 = z1 / norm, z2 / norm
    # canonical phase: first coordinate of modulus > tol made real nonnegative
    lead = z1 if abs(z1) > _PHASE_TOL else z2
    phase = lead / abs(lead)
    return z1 / phase, z2 / phase


@dataclass(frozen=True)
class ProjPoint:
    """A point of P(C^2): unit homogeneous pair with canonical phase."""

    z1: complex
    z2: complex

    def __post_init__(self):
        if not (cmath.isfinite(self.z1) and cmath.isfinite(self.z2)):
            raise ValueError("projective point needs finite coordinates")
        z1, z2 = _canonical_pair(self.z1, self.z2)
        object.__setattr__(self, "z1", z1)
        object.__setattr__(self, "z2", z2)

    @classmethod
    def from_vector(cls, v) -> "ProjPoint":
        return cls(complex(v[0]), complex(v[1]))

    @classmethod
    def from_chart(cls, z) -> "ProjPoint":
        """Inverse of the affine chart z = z1/z2; z may be INF."""
        if z == INF or (isinstance(z, complex) and cmath.isinf(z)):
            return cls(1.0, 0.0)
        return cls(complex(z), 1.0)

    def as_vector(self) -> np.ndarray:
        return np.array([self.z1, self.z2], dtype=np.complex128)

    def chart(self) -> complex:
        """Affine chart z1/z2, INF at the horizontal direction."""
        if abs(self.z2) <= _PHASE_TOL:
            return INF
        return self.z1 / self.z2


HORIZONTAL = ProjPoint(1.0, 0.0)
VERTICAL = ProjPoint(0.0, 1.0)


def proj_apply(m: np.ndarray, v: ProjPoint) -> ProjPoint:
    """Canonical representative of [M v]."""
    _require_invertible(m)
    w = m @ v.as_vector()
    return ProjPoint.from_vector(w)


def angle_between(u: ProjPoint, v: ProjPoint) -> float:
    """Projective (Fubini-Study) angle arccos |<u, v>|, in [0, pi/2].

    Computed as atan2(|u ^ v|, |<u, v>|), which stays accurate near 0 and
    pi/2 where arccos alone loses 8 digits.
    """
    inner = abs(np.conj(u.z1) * v.z1 + np.conj(u.z2) * v.z2)
    wedge = abs(u.z1 * v.z2 - u.z2 * v.z1)
    return math.atan2(wedge, inner)


def mobius_apply(m: np.ndarray, z) -> complex:
    """Moebius action (a z + b) / (c z + d) on C u {inf}."""
    _require_invertible(m)
    a, b = m[0, 0], m[0, 1]
    c, d = m[1, 0], m[1, 1]
    if z == INF or (isinstance(z, complex) and cmath.isinf(z)):
        return a / c if c != 0 else INF
    z = complex(z)
    den = c * z + d
    if den == 0:
        return INF
    return (a * z + b) / den


def chordal_distance(z, w) -> float:
    """Chordal metric on the Riemann sphere (handles INF); range [0, 2]."""

    def _isinf(x):
        return x == INF or (isinstance(x, complex) and cmath.isinf(x))

    if _isinf(z) and _isinf(w):
        return 0.0
    if _isinf(z):
        return 2.0 / math.sqrt(1.0 + abs(complex(w)) ** 2)
    if _isinf(w):
        return 2.0 / math.sqrt(1.0 + abs(complex(z)) ** 2)
    z, w = complex(z), complex(w)
    return 2.0 * abs(z - w) / math.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))
