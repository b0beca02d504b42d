"""
Quadrature grids for the truncated radial and time half-lines.

Everything is composite Gauss-Legendre. The radial grid uses equal panels on
[0, R]. The time grid is built panel by panel from the decay rates and
oscillation frequencies of the multipliers that are still alive at the
current time, so that long-lived low-frequency channels are integrated to
the end of their life without paying for fine panels everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import DampingModel, decay_rates


def gauss_legendre_panels(edges, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of an `order`-point Gauss rule on each [edges[i], edges[i+1]]."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("panel edges must be a strictly increasing sequence")
    if order < 1:
        raise ValueError("order must be >= 1")
    x, w = np.polynomial.legendre.leggauss(order)
    half = np.diff(edges)[:, None] / 2
    mid = (edges[:-1] + edges[1:])[:, None] / 2
    return (mid + half * x).ravel(), (half * w).ravel()


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    nodes: np.ndarray
    weights: np.ndarray
    upper: float
    edges: np.ndarray = field(default=None, repr=False)
    order: int = 0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape or nodes.size == 0:
            raise ValueError("nodes and weights must be nonempty 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.nodes.size

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


class RadialGrid(QuadratureGrid):
    """Quadrature on (0, R] for the frequency variable."""

    def __post_init__(self):
        super().__post_init__()
        if self.nodes[0] <= 0 or self.nodes[-1] > self.upper:
            raise ValueError("radial nodes must lie in (0, R]")

    def check_avoids(self, point: float, rtol: float = 1e-9):
        """Raise if any node sits on `point` (the model's branch point)."""
        if np.any(np.abs(self.nodes - point) <= rtol * point):
            raise ValueError(f"radial grid has a node at the branch point {point}")


class TimeGrid(QuadratureGrid):
    """Quadrature on [0, T] for the time variable."""

    def __post_init__(self):
        super().__post_init__()
        if self.nodes[0] < 0 or self.nodes[-1] > self.upper:
            raise ValueError("time nodes must lie in [0, T]")


def radial_grid(R: float = 12.0, panels: int = 16, order: int = 16, grading: float = 1.15) -> RadialGrid:
    """
    Composite Gauss-Legendre grid on [0, R] with panel edges R (k / panels)^grading.

    Grading above 1 narrows the panels near rho = 0, where late-time data
    oscillates like sin(rho t) under a slowly decaying envelope.
    """
    if grading < 1:
        raise ValueError("grading must be >= 1")
    edges = R * (np.arange(panels + 1) / panels) ** grading
    nodes, weights = gauss_legendre_panels(edges, order)
    return RadialGrid(nodes, weights, float(R), edges, order)


def uniform_time_grid(T: float, panels: int = 16, order: int = 16) -> TimeGrid:
    edges = np.linspace(0.0, T, panels + 1)
    nodes, weights = gauss_legendre_panels(edges, order)
    return TimeGrid(nodes, weights, float(T), edges, order)


def _components(model: DampingModel, rho, amplitude):
    # (rate, frequency, log-amplitude) of each exponential channel of m(., rho)
    slow, fast, omega = decay_rates(model, rho)
    over = fast > slow * (1 + 1e-12)
    q_scale = np.where(omega > 0, 1 / np.maximum(omega, 1e-300), 1 / (np.e * slow))
    kappa = (fast - slow) / 2
    amp_over = amplitude / np.maximum(2 * kappa, 1e-300)
    rates = np.concatenate([slow, fast[over]])
    freqs = np.concatenate([omega, np.zeros(np.count_nonzero(over))])
    amps = np.concatenate([amplitude * np.where(over, np.minimum(amp_over, q_scale), q_scale), amp_over[over]])
    return rates, freqs, amps


def adaptive_time_grid(
    model: DampingModel,
    rgrid: RadialGrid,
    order: int = 16,
    tol: float = 1e-15,
    t_max: float | None = None,
    amplitude=None,
    rate_step: float = 2.0,
    phase_step: float = 3.0,
) -> TimeGrid:
    """
    Time grid resolving m(t, rho_j) for every radial node.

    A channel with rate r, frequency w and amplitude A is alive at time t
    while A exp(-r t) > tol * max(A). Each panel is no longer than
    rate_step / r and phase_step / w over the channels alive at its start;
    with 16 nodes this keeps products of two channels exact to roughly
    machine precision. The grid ends when every channel has died, or at
    `t_max` if given.
    """
    if amplitude is None:
        amplitude = np.ones(len(rgrid))
    amplitude = np.abs(np.asarray(amplitude, dtype=float))
    rates, freqs, amps = _components(model, rgrid.nodes, amplitude)
    keep = amps > 0
    rates, freqs, amps = rates[keep], freqs[keep], amps[keep]
    life = np.log(amps / amps.max()) - np.log(tol)
    death = np.where(life > 0, life / rates, 0.0)
    limit = np.minimum(rate_step / rates, np.where(freqs > 0, phase_step / np.maximum(freqs, 1e-300), np.inf))

    # alive channels shrink monotonically; walk them in order of death time
    by_death = np.argsort(death)
    death_sorted = death[by_death]
    # suffix minimum of panel limits over channels still alive
    suffix_min = np.minimum.accumulate(limit[by_death][::-1])[::-1]

    end = float(death.max()) if t_max is None else float(t_max)
    if end <= 0:
        raise ValueError("time horizon must be positive")
    edges = [0.0]
    t = 0.0
    idx = 0
    while t < end:
        while idx < death_sorted.size and death_sorted[idx] <= t:
            idx += 1
        h = suffix_min[idx] if idx < suffix_min.size else end - t
        t = min(t + h, end)
        if end - t < 1e-9 * h:
            t = end
        edges.append(t)
    edges = np.asarray(edges)
    nodes, weights = gauss_legendre_panels(edges, order)
    return TimeGrid(nodes, weights, end, edges, order)
