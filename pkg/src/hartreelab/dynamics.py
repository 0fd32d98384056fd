"""
Hartree dynamics on the grid: the nonlocal right-hand side (K * |u|^2) u,
a Duhamel/Picard fixed-point solver, a Strang split-step reference
integrator, and conservation monitors.

The Picard solver iterates the integral-form map

    Phi(u)(t) = exp(it*Lap) u0 - i * int_0^t exp(i(t-s)*Lap) (K*|u|^2)u(s) ds

on a fixed set of time nodes with lower-triangular composite-trapezoid
weights, starting from the free evolution, and measures convergence in
the sup-over-nodes max(L^2, Wiener) metric.  Iterates are confined to
the ball of radius ball_factor * ||u0||; leaving it flags the interval
as too long and triggers halving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError
from .grid import Field, Grid, stable_sum
from .grid import _forward_values as _fft
from .grid import _inverse_values as _ifft
from .kernels import Kernel
from .norms import Trajectory

__all__ = [
    "PicardConfig",
    "SolveReport",
    "hartree_rhs",
    "picard_solve",
    "splitstep_solve",
    "conservation_monitor",
    "ConservationRecord",
]

_TWO_PI = 2.0 * math.pi


def _l2(grid: Grid, values: np.ndarray) -> float:
    return math.sqrt(grid.cell_volume * stable_sum(np.abs(values) ** 2))


def _wiener(grid: Grid, values: np.ndarray) -> float:
    return grid.spectral_cell_volume * stable_sum(np.abs(_fft(grid, values)))


def _l2_cap_w(grid: Grid, values: np.ndarray) -> float:
    return max(_l2(grid, values), _wiener(grid, values))


def _potential_values(u_values: np.ndarray, k: Kernel) -> np.ndarray:
    """K * |u|^2 via the convolution theorem, dealiased at the 2/3 cutoff."""
    g = k.grid
    w_hat = _fft(g, np.abs(u_values) ** 2)
    w_hat *= g.dealias_mask
    v_hat = (_TWO_PI ** (g.dim / 2.0)) * k.multiplier * w_hat
    return _ifft(g, v_hat)


def _rhs_values(u_values: np.ndarray, k: Kernel) -> np.ndarray:
    """(K * |u|^2) u with the cubic product dealiased as well."""
    g = k.grid
    out = _potential_values(u_values, k) * u_values
    out_hat = _fft(g, out)
    out_hat *= g.dealias_mask
    return _ifft(g, out_hat)


def hartree_rhs(u: Field, k: Kernel) -> Field:
    """The nonlinearity (K * |u|^2) u evaluated pseudo-spectrally.

    The quadratic density |u|^2 and the final cubic product are both
    truncated by the 2/3 rule, so band-limited inputs see the exact
    continuum product.  The (2*pi)^(d/2) factor in the potential makes
    the convolution theorem exact under the symmetric transform.
    """
    if u.grid != k.grid:
        raise GridMismatchError("field and kernel live on different grids")
    return Field(u.grid, _rhs_values(u.values, k))


@dataclass(frozen=True)
class PicardConfig:
    """Fixed-point solve parameters.

    ball_factor is the radius multiplier of the invariant ball
    ||u|| <= ball_factor * ||u0|| in the max(L^2, Wiener) norm.
    """

    T: float
    n_time: int = 33
    tol: float = 1e-10
    max_iter: int = 50
    ball_factor: float = 2.0
    max_halvings: int = 10

    def __post_init__(self) -> None:
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.n_time < 8:
            raise ValueError("n_time must be >= 8")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.ball_factor <= 1:
            raise ValueError("ball_factor must exceed 1")


@dataclass
class SolveReport:
    """Outcome of a Picard solve."""

    converged: bool
    iterations: int
    residual: float
    l2_norms: list[float] = field(default_factory=list)
    w_norms: list[float] = field(default_factory=list)
    ball_violation: bool = False
    halvings: int = 0
    T_final: float = 0.0
    message: str = ""


def _picard_attempt(
    u0_hat: np.ndarray,
    grid: Grid,
    k: Kernel,
    T: float,
    cfg: PicardConfig,
    ball_radius: float,
):
    """One fixed-point run on [0, T]; returns (times, node_values, report-ish)."""
    n = cfg.n_time
    times = np.linspace(0.0, T, n)
    dt = T / (n - 1)
    k2 = grid.xi_squared
    step = np.exp(-1j * dt * k2)  # one-panel propagator for the running trapezoid
    free_hats = [np.exp(-1j * t * k2) * u0_hat for t in times]
    nodes = [_ifft(grid, fh) for fh in free_hats]

    iterations = 0
    residual = math.inf
    for iterations in range(1, cfg.max_iter + 1):
        g_hats = [_fft(grid, _rhs_values(v, k)) for v in nodes]
        new_nodes = [nodes[0]]  # t=0 node is u0 at every iteration
        # running trapezoid: int_0^{t_i} = int_0^{t_{i-1}} propagated one step
        # plus the closing [t_{i-1}, t_i] panel
        acc = np.zeros_like(u0_hat)
        for i in range(1, n):
            acc = step * (acc + 0.5 * dt * g_hats[i - 1]) + 0.5 * dt * g_hats[i]
            new_nodes.append(_ifft(grid, free_hats[i] - 1j * acc))
        residual = max(
            _l2_cap_w(grid, a - b) for a, b in zip(new_nodes[1:], nodes[1:])
        )
        nodes = new_nodes
        norms = [_l2_cap_w(grid, v) for v in nodes]
        if max(norms) > ball_radius:
            return times, nodes, iterations, residual, True
        if residual <= cfg.tol:
            break
    return times, nodes, iterations, residual, False


def picard_solve(u0: Field, k: Kernel, cfg: PicardConfig) -> tuple[Trajectory, SolveReport]:
    """Duhamel fixed-point solve on [0, T], halving T on ball violations.

    Returns the node trajectory together with a report.  Non-convergence
    within max_iter produces converged=False (a shorter interval always
    exists for small enough T); leaving the invariant ball triggers up to
    max_halvings retries on [0, T/2^m] and is recorded in the report.
    """
    if u0.grid != k.grid:
        raise GridMismatchError("field and kernel live on different grids")
    grid = u0.grid
    u0_hat = _fft(grid, u0.values)
    ball_radius = cfg.ball_factor * _l2_cap_w(grid, u0.values)

    T = cfg.T
    violated_once = False
    for halving in range(cfg.max_halvings + 1):
        times, nodes, iterations, residual, violated = _picard_attempt(
            u0_hat, grid, k, T, cfg, ball_radius
        )
        if violated:
            violated_once = True
            T *= 0.5
            continue
        report = SolveReport(
            converged=residual <= cfg.tol,
            iterations=iterations,
            residual=residual,
            l2_norms=[_l2(grid, v) for v in nodes],
            w_norms=[_wiener(grid, v) for v in nodes],
            ball_violation=violated_once,
            halvings=halving,
            T_final=T,
            message=""
            if residual <= cfg.tol
            else f"no convergence in {cfg.max_iter} iterations; try a smaller T "
            f"(the admissible interval shrinks with the size of u0)",
        )
        traj = Trajectory(times, tuple(Field(grid, v) for v in nodes))
        return traj, report

    # every attempt left the ball
    report = SolveReport(
        converged=False,
        iterations=0,
        residual=math.inf,
        ball_violation=True,
        halvings=cfg.max_halvings,
        T_final=T,
        message="iterates left the contraction ball after all interval halvings",
    )
    traj = Trajectory(times, tuple(Field(grid, v) for v in nodes))
    return traj, report


def splitstep_solve(
    u0: Field,
    k: Kernel,
    T: float,
    dt: float,
    store_every: int = 1,
) -> Trajectory:
    """Strang splitting: exact half potential phase, full free step, half phase.

    The potential K * |u|^2 must be real (real, even multiplier); this is
    asserted to 1e-10 each step.  The number of steps is round(T / dt),
    with the step adjusted so the run lands exactly on T.
    """
    if dt <= 0 or T < dt:
        raise ValueError("need dt > 0 and T >= dt")
    if u0.grid != k.grid:
        raise GridMismatchError("field and kernel live on different grids")
    n_steps = max(1, round(T / dt))
    dt = T / n_steps
    if n_steps % store_every != 0:
        raise ValueError("store_every must divide the step count")
    grid = u0.grid
    k2 = grid.xi_squared
    free_phase = np.exp(-1j * dt * k2)

    def half_potential(values: np.ndarray) -> np.ndarray:
        pot = _potential_values(values, k)
        scale = max(1.0, float(np.max(np.abs(pot.real))))
        if float(np.max(np.abs(pot.imag))) > 1e-10 * scale:
            raise AssertionError("potential K*|u|^2 is not real; multiplier must be real and even")
        return values * np.exp(-0.5j * dt * pot.real)

    values = u0.values.copy()
    times = [0.0]
    samples = [Field(grid, values)]
    for step in range(1, n_steps + 1):
        values = half_potential(values)
        values = _ifft(grid, free_phase * _fft(grid, values))
        values = half_potential(values)
        if step % store_every == 0:
            times.append(step * dt)
            samples.append(Field(grid, values))
    return Trajectory(np.array(times), tuple(samples))


@dataclass(frozen=True)
class ConservationRecord:
    """L^2 drift and the running sup of Wiener norms along a trajectory."""

    l2_drift: float
    w_max: float
    w_profile: np.ndarray  # running sup of the Wiener norm
    l2_norms: np.ndarray
    w_norms: np.ndarray


def conservation_monitor(tr: Trajectory) -> ConservationRecord:
    """Relative L^2 drift and the Wiener-norm running sup over a trajectory."""
    grid = tr.grid
    l2 = np.array([_l2(grid, f.values) for f in tr.fields])
    w = np.array([_wiener(grid, f.values) for f in tr.fields])
    drift = float(np.max(np.abs(l2 - l2[0])) / l2[0]) if l2[0] > 0 else 0.0
    profile = np.maximum.accumulate(w)
    return ConservationRecord(
        l2_drift=drift,
        w_max=float(profile[-1]),
        w_profile=profile,
        l2_norms=l2,
        w_norms=w,
    )
