"""
Damping models and their Fourier multipliers.

Both equations reduce, after a spatial Fourier transform, to the scalar ODE

    x'' + a(rho) x' + b(rho) x = 0,   x(0) = 0,  x'(0) = 1,

whose solution is the multiplier m(t, rho). For the weak model a = gamma,
for the strong model a = delta * rho**2; in both cases b = rho**2. Writing
p = a/2 and q = p**2 - b,

    m(t, rho) = t * exp(-p t) * S(q t**2),   S(z) = sinh(sqrt z) / sqrt z,

which is entire in z, so the branch point q = 0 is handled without a
special case beyond switching to the Taylor series of S for small |z|.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

# |q t^2| below this uses the Taylor series of S and C
_SERIES_CUTOFF = 0.1
_SERIES_TERMS = 10


class DampingKind(str, enum.Enum):
    WEAK = "weak"
    STRONG = "strong"


@dataclass(frozen=True)
class DampingModel:
    """Which damped wave equation, and its damping parameter (gamma or delta)."""

    kind: DampingKind
    parameter: float

    def __post_init__(self):
        object.__setattr__(self, "kind", DampingKind(self.kind))
        if not (np.isfinite(self.parameter) and self.parameter > 0):
            raise ValueError(f"damping parameter must be positive, got {self.parameter}")

    @classmethod
    def weak(cls, gamma: float = 1.0) -> "DampingModel":
        return cls(DampingKind.WEAK, float(gamma))

    @classmethod
    def strong(cls, delta: float = 1.0) -> "DampingModel":
        return cls(DampingKind.STRONG, float(delta))

    @property
    def branch_point(self) -> float:
        """Frequency b* where the characteristic roots coincide."""
        if self.kind is DampingKind.WEAK:
            return self.parameter / 2
        return 2.0 / self.parameter

    def branch_rate(self) -> float:
        """Decay rate p = a/2 at the branch point."""
        if self.kind is DampingKind.WEAK:
            return self.parameter / 2
        return 2.0 / self.parameter

    def admissible_alpha(self, n: int) -> tuple[float, float]:
        """Open interval of exponents alpha for which the kernel is square integrable."""
        if self.kind is DampingKind.WEAK:
            return (-(n - 3) / 2, 1.0)
        return (-(n - 5) / 2, 2.0)

    def coefficients(self, rho):
        """ODE coefficients (a, b) at frequency rho."""
        rho = np.asarray(rho, dtype=float)
        b = rho * rho
        if self.kind is DampingKind.WEAK:
            a = np.full_like(rho, self.parameter)
        else:
            a = self.parameter * b
        return a, b

    def discriminant(self, rho):
        """q = p^2 - b, written in factored form to avoid cancellation near b*."""
        rho = np.asarray(rho, dtype=float)
        c = self.parameter
        if self.kind is DampingKind.WEAK:
            return (c - 2 * rho) * (c + 2 * rho) / 4
        return rho * rho * (c * rho - 2) * (c * rho + 2) / 4


@dataclass(frozen=True)
class CharacteristicRoots:
    """Roots of mu^2 + a mu + b = 0."""

    mu1: complex
    mu2: complex

    @property
    def total(self) -> complex:
        return self.mu1 + self.mu2

    @property
    def product(self) -> complex:
        return self.mu1 * self.mu2


def characteristic_roots(model: DampingModel, rho: float) -> CharacteristicRoots:
    if rho <= 0:
        raise ValueError("rho must be positive")
    a, _ = model.coefficients(rho)
    p = float(a) / 2
    q = float(model.discriminant(rho))
    root = np.sqrt(complex(q))
    return CharacteristicRoots(complex(-p + root), complex(-p - root))


def _check_args(t, rho):
    t = np.asarray(t, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("frequency rho must be positive")
    if np.any(t < 0):
        raise ValueError("time t must be nonnegative")
    return t, rho


def _series_s(z):
    # sinh(sqrt z)/sqrt z = sum z^k / (2k+1)!
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(1, _SERIES_TERMS):
        term = term * z / ((2 * k) * (2 * k + 1))
        total = total + term
    return total


def _series_c(z):
    # cosh(sqrt z) = sum z^k / (2k)!
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(1, _SERIES_TERMS):
        term = term * z / ((2 * k - 1) * (2 * k))
        total = total + term
    return total


def _evaluate(model: DampingModel, t, rho, derivative: bool):
    t, rho = _check_args(t, rho)
    t, rho = np.broadcast_arrays(t, rho)
    a, b = model.coefficients(rho)
    p = a / 2
    q = model.discriminant(rho)
    z = q * t * t

    m = np.empty(t.shape)
    dm = np.empty(t.shape) if derivative else None

    small = np.abs(z) < _SERIES_CUTOFF
    over = ~small & (q > 0)
    osc = ~small & (q < 0)

    if np.any(small):
        ts, ps, zs = t[small], p[small], z[small]
        decay = np.exp(-ps * ts)
        m[small] = ts * decay * _series_s(zs)
        if derivative:
            dm[small] = decay * _series_c(zs) - ps * m[small]

    if np.any(over):
        to, po, bo = t[over], p[over], b[over]
        kappa = np.sqrt(q[over])
        slow = np.exp(-bo / (po + kappa) * to)  # exp((kappa - p) t) without cancellation
        fast = np.exp(-(po + kappa) * to)
        m[over] = (slow - fast) / (2 * kappa)
        if derivative:
            dm[over] = (slow + fast) / 2 - po * m[over]

    if np.any(osc):
        tc, pc = t[osc], p[osc]
        omega = np.sqrt(-q[osc])
        decay = np.exp(-pc * tc)
        m[osc] = decay * np.sin(omega * tc) / omega
        if derivative:
            dm[osc] = decay * np.cos(omega * tc) - pc * m[osc]

    if derivative:
        return m, dm
    return m


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def multiplier(model: DampingModel, t, rho):
    """
    Fourier multiplier m(t, rho) = (exp(mu1 t) - exp(mu2 t)) / (mu1 - mu2).

    Vectorized over broadcastable `t` and `rho`. Continuous across the branch
    point, where it equals t * exp(-p t).
    """
    return _unwrap(_evaluate(model, t, rho, derivative=False))


def multiplier_dt(model: DampingModel, t, rho):
    """Time derivative of the multiplier, d/dt m(t, rho)."""
    return _unwrap(_evaluate(model, t, rho, derivative=True)[1])


def multiplier_time_l2(model: DampingModel, rho, t_max: float | None = None):
    """
    Integral of m(t, rho)**2 over [0, t_max] (default [0, inf)).

    The infinite-time value is 1/(2ab): 1/(2 delta rho^4) for the strong
    model and 1/(2 gamma rho^2) for the weak one, on both sides of b*.
    A finite horizon subtracts the tail x(T)' P x(T), where P solves the
    Lyapunov equation of the companion system.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("frequency rho must be positive")
    a, b = model.coefficients(rho)
    full = 1.0 / (2 * a * b)
    if t_max is None or np.isinf(t_max):
        return _unwrap(full)
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    x, dx = _evaluate(model, t_max, rho, derivative=True)
    p11 = 1 / (2 * a) + a / (2 * b)
    p12 = 1 / (2 * b)
    tail = p11 * x * x + 2 * p12 * x * dx + full * dx * dx
    return _unwrap(full - tail)


def product_time_integral(model: DampingModel, s, rho):
    """
    Integral over t in [0, inf) of m(t, s) * m(t, rho).

    For two impulse responses of x'' + a x' + b x = 0 this evaluates to

        (a1 + a2) / ((b1 - b2)^2 + (a1 + a2)(a1 b2 + b1 a2)),

    which is the partial-fraction sum over the four root pairs collapsed by
    the Vieta relations; it is regular at the branch point and exactly
    symmetric in (s, rho).
    """
    s = np.asarray(s, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(s <= 0) or np.any(rho <= 0):
        raise ValueError("frequencies must be positive")
    a1, b1 = model.coefficients(s)
    a2, b2 = model.coefficients(rho)
    asum = a1 + a2
    diff = b1 - b2
    return _unwrap(asum / (diff * diff + asum * (a1 * b2 + b1 * a2)))


def strong_sine_square_integral(delta: float, rho):
    """
    Closed form of int_0^inf exp(-delta rho^2 t) sin^2(t rho sqrt(4 - delta^2 rho^2) / 2) dt
    for rho < 2/delta: (4 - delta^2 rho^2) / (8 delta rho^2).
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0) or np.any(delta * rho >= 2):
        raise ValueError("closed form holds for 0 < rho < 2/delta")
    return _unwrap((4 - delta**2 * rho**2) / (8 * delta * rho**2))


def decay_rates(model: DampingModel, rho):
    """
    Slowest and fastest exponential decay rates of m(., rho), and its
    oscillation frequency (0 when overdamped).
    """
    rho = np.asarray(rho, dtype=float)
    a, b = model.coefficients(rho)
    p = a / 2
    q = model.discriminant(rho)
    kappa = np.sqrt(np.clip(q, 0, None))
    slow = np.where(q > 0, b / (p + kappa), p)
    fast = p + kappa
    omega = np.sqrt(np.clip(-q, 0, None))
    return slow, fast, omega
