"""
Norms and exponent bookkeeping: quadrature L^p norms, the Fourier-L^1
(Wiener) norm, their maximum, mixed space-time norms over sampled
trajectories, and admissible-pair arithmetic for dispersive estimates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError
from .grid import Field, Grid, forward, stable_sum

__all__ = [
    "AdmissiblePair",
    "Trajectory",
    "norm_lp",
    "norm_wiener",
    "norm_l2_cap_w",
    "spacetime_norm",
    "make_admissible",
    "contraction_exponents",
    "ContractionExponents",
]


@dataclass(frozen=True)
class AdmissiblePair:
    """Exponent pair (p, q) with 2/p = d(1/2 - 1/q), (p, q) != (2, inf)."""

    p: float
    q: float
    dim: int

    def __post_init__(self) -> None:
        if self.p < 2 or self.q < 2:
            raise ValueError(f"admissible pair needs p, q >= 2, got ({self.p}, {self.q})")
        if self.p == 2 and math.isinf(self.q):
            raise ValueError("(2, inf) is excluded")
        lhs = 0.0 if math.isinf(self.p) else 2.0 / self.p
        rhs = self.dim * (0.5 - (0.0 if math.isinf(self.q) else 1.0 / self.q))
        if abs(lhs - rhs) > 1e-12:
            raise ValueError(
                f"({self.p}, {self.q}) violates 2/p = d(1/2 - 1/q) in d={self.dim}"
            )


@dataclass(frozen=True)
class Trajectory:
    """Time samples (t_0 < ... < t_M) of a field on one shared grid."""

    times: np.ndarray
    fields: tuple[Field, ...]

    def __post_init__(self) -> None:
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", times)
        if times.ndim != 1 or times.size != len(self.fields):
            raise ValueError("times and fields must have equal length")
        if times.size < 2:
            raise ValueError("a trajectory needs at least 2 samples")
        if not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        g = self.fields[0].grid
        for f in self.fields[1:]:
            if f.grid != g:
                raise GridMismatchError("trajectory fields live on different grids")

    @property
    def grid(self) -> Grid:
        return self.fields[0].grid


def norm_lp(u: Field, p: float) -> float:
    """dx^d-weighted quadrature l^p norm; grid maximum for p = inf."""
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    mags = np.abs(u.values)
    if math.isinf(p):
        return float(mags.max())
    return (u.grid.cell_volume * stable_sum(mags**p)) ** (1.0 / p)


def norm_wiener(u: Field) -> float:
    """Fourier-L^1 norm: dxi^d-weighted sum of |u_hat|."""
    return u.grid.spectral_cell_volume * stable_sum(np.abs(forward(u).values))


def norm_l2_cap_w(u: Field) -> float:
    """max of the L^2 and Wiener norms (equivalent to their sum)."""
    return max(norm_lp(u, 2), norm_wiener(u))


def spacetime_norm(tr: Trajectory, p_time: float, q_space: float) -> float:
    """Mixed norm: trapezoid in time of norm_lp(., q_space)^p_time, then
    the 1/p_time root; supremum over samples for p_time = inf."""
    if p_time < 1 or q_space < 1:
        raise ValueError("p_time and q_space must be >= 1")
    if tr.times.size < 2:
        raise ValueError("spacetime norm needs at least 2 samples")
    spatial = np.array([norm_lp(f, q_space) for f in tr.fields])
    if math.isinf(p_time):
        return float(spatial.max())
    return float(np.trapezoid(spatial**p_time, tr.times) ** (1.0 / p_time))


def make_admissible(q_space: float, dim: int) -> AdmissiblePair:
    """Pair (p, q_space) solving 2/p = d(1/2 - 1/q_space)."""
    if dim >= 3:
        q_max = 2.0 * dim / (dim - 2)
        if not 2.0 <= q_space < q_max:
            raise ValueError(f"q must lie in [2, {q_max}) for d={dim}, got {q_space}")
    else:
        if not (2.0 <= q_space and math.isfinite(q_space)):
            raise ValueError(f"q must lie in [2, inf) for d={dim}, got {q_space}")
    if q_space == 2.0:
        return AdmissiblePair(math.inf, 2.0, dim)
    p = 4.0 * q_space / (dim * (q_space - 2.0))
    return AdmissiblePair(p, q_space, dim)


@dataclass(frozen=True)
class ContractionExponents:
    """Exponents (q, r, theta) of the fixed-point space for exponent gamma."""

    q: float
    r: float
    theta: float


def contraction_exponents(gamma: float, dim: int) -> ContractionExponents:
    """q = 8/gamma, r = 4d/(2d - gamma), theta = 8/(4 - gamma).

    The three Hoelder/scaling identities tying them together are asserted
    to 1e-12 before the triple is returned.
    """
    if not 0.0 < gamma < min(2.0, float(dim)):
        raise ValueError(f"gamma must lie in (0, min(2, d)), got {gamma} for d={dim}")
    q = 8.0 / gamma
    r = 4.0 * dim / (2.0 * dim - gamma)
    theta = 8.0 / (4.0 - gamma)
    checks = (
        (1.0 - 1.0 / q) - ((4.0 - gamma) / 4.0 + 1.0 / q),
        (1.0 - 1.0 / q) - (0.5 + 1.0 / theta),
        (1.0 - 1.0 / r) - (gamma / (2.0 * dim) + 1.0 / r),
        0.5 - (1.0 / theta + 1.0 / q),
    )
    for i, c in enumerate(checks):
        if abs(c) > 1e-12:
            raise AssertionError(f"exponent identity {i} violated by {c:.3e}")
    pair = AdmissiblePair(q, r, dim)  # (q, r) must itself be admissible
    assert pair.q == r
    return ContractionExponents(q=q, r=r, theta=theta)
