"""
Special functions used by the radial inversion.

Bessel functions J_nu of the integer and half-integer orders nu = l + (n-2)/2,
the harmonic dimension count d(n, l), and real orthonormal spherical
harmonics on S^1 and S^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial, pi, sqrt

import numpy as np
from scipy import special


class UnsupportedDimensionError(ValueError):
    """Raised when spherical-harmonic synthesis is requested for n > 3."""


def _check_order(order: float) -> float:
    order = float(order)
    if order < 0 or not float(2 * order).is_integer():
        raise ValueError(f"Bessel order must be a nonnegative (half-)integer, got {order}")
    return order


def bessel_j(order, x):
    """
    Bessel function of the first kind J_order(x) for x >= 0.

    `order` must be an integer or half-integer >= 0. Scalars in, scalar out;
    arrays broadcast.
    """
    order = _check_order(order)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise ValueError("bessel_j is defined here for x >= 0 only")
    out = special.jv(order, xa)
    if np.ndim(out) == 0:
        return float(out)
    return out


def bessel_order(n: int, l: int) -> float:
    """Order nu = l + (n-2)/2 carried by the (n, l) spherical-harmonic channel."""
    return l + (n - 2) / 2


def harmonic_dim(n: int, l: int) -> int:
    """Dimension d(n, l) of the degree-l spherical harmonics on S^{n-1}."""
    if n < 2 or l < 0:
        raise ValueError(f"need n >= 2 and l >= 0, got n={n}, l={l}")
    if l == 0:
        return 1
    return factorial(n + l - 3) * (2 * l + n - 2) // (factorial(l) * factorial(n - 2))


@dataclass(frozen=True)
class ModeIndex:
    """Spherical-harmonic channel (n, l, k) with 0 <= k < d(n, l)."""

    n: int
    l: int
    k: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension n must be >= 2, got {self.n}")
        if self.l < 0:
            raise ValueError(f"degree l must be >= 0, got {self.l}")
        if not 0 <= self.k < harmonic_dim(self.n, self.l):
            raise ValueError(
                f"k={self.k} out of range for d({self.n},{self.l})={harmonic_dim(self.n, self.l)}"
            )

    @property
    def nu(self) -> float:
        return bessel_order(self.n, self.l)


def modes_up_to(n: int, l_max: int) -> list[ModeIndex]:
    """All modes with degree <= l_max, ordered by (l, k)."""
    return [ModeIndex(n, l, k) for l in range(l_max + 1) for k in range(harmonic_dim(n, l))]


def _normalized_legendre(l_max: int, x: np.ndarray) -> np.ndarray:
    # P[l, m] with int_{S^2} (P[l,m](cos th))^2 dOmega == 1 for m == 0
    # and 1/2 for m > 0 after multiplying by cos(m phi); no Condon-Shortley phase.
    x = np.asarray(x, dtype=float)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    P = np.zeros((l_max + 1, l_max + 1) + x.shape)
    P[0, 0] = 1.0 / sqrt(4 * pi)
    for m in range(1, l_max + 1):
        P[m, m] = sqrt((2 * m + 1) / (2 * m)) * s * P[m - 1, m - 1]
    for m in range(0, l_max):
        P[m + 1, m] = sqrt(2 * m + 3) * x * P[m, m]
    for m in range(0, l_max + 1):
        for l in range(m + 2, l_max + 1):
            a = sqrt((4 * l * l - 1) / (l * l - m * m))
            b = sqrt(((l - 1) ** 2 - m * m) / (4 * (l - 1) ** 2 - 1))
            P[l, m] = a * (x * P[l - 1, m] - b * P[l - 2, m])
    return P


def _as_directions(direction, n: int) -> np.ndarray:
    d = np.asarray(direction, dtype=float)
    if d.shape[-1] != n:
        raise ValueError(f"directions must have trailing dimension {n}, got shape {d.shape}")
    norms = np.linalg.norm(d, axis=-1)
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise ValueError("directions must be unit vectors (tolerance 1e-12)")
    return d


def sph_harmonic_matrix(n: int, l_max: int, directions) -> tuple[np.ndarray, list[ModeIndex]]:
    """
    Evaluate every real orthonormal harmonic of degree <= l_max.

    Returns (Y, modes) where Y has shape (len(directions), len(modes)).

    Ordering of k within a degree: for n=2, k=0 is cos(l theta) and k=1 is
    sin(l theta). For n=3, k=0 is the zonal harmonic, k=2m-1 the cos(m phi)
    and k=2m the sin(m phi) member.
    """
    if n not in (2, 3):
        raise UnsupportedDimensionError(
            f"spherical harmonics are implemented for n in (2, 3), got n={n}"
        )
    d = _as_directions(directions, n).reshape(-1, n)
    modes = modes_up_to(n, l_max)
    Y = np.empty((d.shape[0], len(modes)))
    if n == 2:
        theta = np.arctan2(d[:, 1], d[:, 0])
        col = 0
        for l in range(l_max + 1):
            if l == 0:
                Y[:, col] = 1.0 / sqrt(2 * pi)
                col += 1
            else:
                Y[:, col] = np.cos(l * theta) / sqrt(pi)
                Y[:, col + 1] = np.sin(l * theta) / sqrt(pi)
                col += 2
        return Y, modes

    z = np.clip(d[:, 2], -1.0, 1.0)
    phi = np.arctan2(d[:, 1], d[:, 0])
    P = _normalized_legendre(l_max, z)
    col = 0
    for l in range(l_max + 1):
        Y[:, col] = P[l, 0]
        for m in range(1, l + 1):
            Y[:, col + 2 * m - 1] = sqrt(2) * P[l, m] * np.cos(m * phi)
            Y[:, col + 2 * m] = sqrt(2) * P[l, m] * np.sin(m * phi)
        col += 2 * l + 1
    return Y, modes


def sph_harmonic(mode: ModeIndex, direction):
    """Real orthonormal harmonic Y_lk evaluated at unit vector(s) `direction`."""
    Y, modes = sph_harmonic_matrix(mode.n, mode.l, direction)
    vals = Y[:, modes.index(mode)]
    if np.ndim(direction) == 1:
        return float(vals[0])
    return vals.reshape(np.shape(direction)[:-1])
