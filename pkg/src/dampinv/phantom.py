"""Analytic test coefficients in the reduced (coefficient-space) representation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .forward import ReducedCoefficient
from .grids import RadialGrid, gauss_legendre_panels
from .specfun import ModeIndex


class PhantomKind(str, enum.Enum):
    GAUSS_MONOMIAL = "gauss"
    BUMP = "bump"
    EXPRESSION = "expr"


_EXPR_NAMES = {
    name: getattr(np, name)
    for name in ("exp", "sin", "cos", "tanh", "sqrt", "log", "abs", "where", "pi", "maximum", "minimum")
}


@dataclass(frozen=True)
class PhantomSpec:
    """
    gauss: A rho^(l+1) exp(-rho^2 / (2 width^2))
    bump:  A exp(1 - 1/(1 - x^2)) with x = (rho - center)/width, zero for |x| >= 1
    expr:  a numpy expression in `rho` and `l`, e.g. "rho**2*exp(-rho)"
    """

    kind: PhantomKind = PhantomKind.GAUSS_MONOMIAL
    amplitude: float = 1.0
    width: float = 1.0
    center: float = 0.0
    expression: str | None = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "kind", PhantomKind(self.kind))
        if not self.width > 0:
            raise ValueError("phantom width must be positive")
        if self.kind is PhantomKind.EXPRESSION and not self.expression:
            raise ValueError("expression phantom needs an expression")

    def evaluate(self, rho, l: int) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        A = self.amplitude
        if self.kind is PhantomKind.GAUSS_MONOMIAL:
            return A * rho ** (l + 1) * np.exp(-(rho**2) / (2 * self.width**2))
        if self.kind is PhantomKind.BUMP:
            x = (rho - self.center) / self.width
            inside = np.abs(x) < 1
            out = np.zeros_like(rho)
            out[inside] = A * np.exp(1 - 1 / (1 - x[inside] ** 2))
            return out
        if self.kind is PhantomKind.EXPRESSION:
            names = dict(_EXPR_NAMES, rho=rho, l=l)
            out = eval(self.expression, {"__builtins__": {}}, names)  # noqa: S307
            return np.broadcast_to(np.asarray(out, dtype=float), rho.shape).copy()
        raise ValueError(f"unsupported phantom kind {self.kind}")


def phantom_coeff(spec: PhantomSpec, mode: ModeIndex, alpha: float, grid: RadialGrid) -> ReducedCoefficient:
    return ReducedCoefficient(mode, alpha, spec.evaluate(grid.nodes, mode.l), grid)


def tail_fraction(spec: PhantomSpec, l: int, R: float, upper: float | None = None) -> float:
    """Fraction of the squared L2 mass of the phantom lying beyond R."""
    upper = upper or max(4 * R, 60.0)
    edges = np.linspace(0.0, upper, 4 * int(np.ceil(upper)) + 1)
    x, w = gauss_legendre_panels(edges, 16)
    v = spec.evaluate(x, l) ** 2
    total = np.dot(w, v)
    return float(np.dot(w[x > R], v[x > R]) / total)
