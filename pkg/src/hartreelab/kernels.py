"""
Hartree kernels as spectral multipliers on the grid.

Supported classes: the homogeneous kernel lam/|x|^gamma (multiplier
lam * C(gamma, d) * |xi|^(gamma-d)), its low-frequency truncation
|xi|^(gamma-d) * 1{|xi| <= 1}, the complementary tail
|xi|^(gamma-d) * 1{|xi| > 1/h}, the Dirac kernel (constant multiplier
(2*pi)^(-d/2), reducing the equation to cubic NLS), and multipliers
loaded from HWF1 files.

For singular multipliers the zero mode is set to 0; on the torus this
shifts the potential by a spatial constant and therefore changes the
solution only by a global time-dependent phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import fieldio
from .errors import FieldFormatError, UnsupportedKernelError
from .grid import Grid, stable_sum

__all__ = [
    "Homogeneous",
    "TruncatedLow",
    "Tail",
    "Delta",
    "FromFile",
    "KernelSpec",
    "Kernel",
    "LqNorm",
    "homogeneous_constant",
    "materialize",
    "split_low_high",
    "multiplier_lq_norm",
    "tail_lq_closed_form",
]


def _check_gamma(gamma: float, dim: int) -> None:
    if not 0.0 < gamma < dim:
        raise ValueError(f"gamma must lie in (0, d); got gamma={gamma}, d={dim}")


@dataclass(frozen=True)
class Homogeneous:
    """K(x) = lam / |x|^gamma; multiplier lam * C(gamma,d) * |xi|^(gamma-d)."""

    lam: float
    gamma: float


@dataclass(frozen=True)
class TruncatedLow:
    """Multiplier |xi|^(gamma-d) restricted to |xi| <= radius."""

    gamma: float
    radius: float = 1.0


@dataclass(frozen=True)
class Tail:
    """Multiplier |xi|^(gamma-d) restricted to |xi| > radius/h."""

    gamma: float
    h: float
    radius: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.h <= 1.0:
            raise ValueError(f"h must lie in (0, 1], got {self.h}")


@dataclass(frozen=True)
class Delta:
    """Dirac kernel: constant multiplier (2*pi)^(-d/2), so K * g = g."""


@dataclass(frozen=True)
class FromFile:
    """Real multiplier samples read from an HWF1 file."""

    path: str


KernelSpec = Union[Homogeneous, TruncatedLow, Tail, Delta, FromFile]


@dataclass(frozen=True)
class Kernel:
    """A multiplier sampled on a grid plus the symbolic spec it came from.

    ``band`` records support restrictions applied after materialization:
    "full", or "low"/"high" for the two halves of :func:`split_low_high`.
    """

    grid: Grid
    multiplier: np.ndarray
    spec: KernelSpec
    zero_mode_policy: str = "zero"
    band: str = "full"

    def __post_init__(self) -> None:
        mult = np.ascontiguousarray(self.multiplier, dtype=np.float64)
        if mult.shape != self.grid.shape:
            raise ValueError("multiplier shape does not match grid")
        if not np.all(np.isfinite(mult)):
            raise ValueError("multiplier contains non-finite entries")
        mult.setflags(write=False)
        object.__setattr__(self, "multiplier", mult)


def homogeneous_constant(gamma: float, dim: int) -> float:
    """The constant C(gamma, d) in the multiplier of lam/|x|^gamma.

    Gamma-function ratio 2^(d/2-gamma) * G((d-gamma)/2) / G(gamma/2) under
    the symmetric transform convention.  Validated against a mollified-FFT
    oracle (see the kernel-oracle experiment) before use in reports.
    """
    _check_gamma(gamma, dim)
    return (
        2.0 ** (dim / 2.0 - gamma)
        * math.gamma((dim - gamma) / 2.0)
        / math.gamma(gamma / 2.0)
    )


def materialize(spec: KernelSpec, grid: Grid) -> Kernel:
    """Sample the continuous multiplier of ``spec`` at the grid frequencies."""
    r = grid.xi_radius
    if isinstance(spec, Homogeneous):
        _check_gamma(spec.gamma, grid.dim)
        with np.errstate(divide="ignore"):
            mult = r ** (spec.gamma - grid.dim)
        mult[(0,) * grid.dim] = 0.0
        mult *= spec.lam * homogeneous_constant(spec.gamma, grid.dim)
    elif isinstance(spec, TruncatedLow):
        _check_gamma(spec.gamma, grid.dim)
        with np.errstate(divide="ignore"):
            mult = np.where(r <= spec.radius, r ** (spec.gamma - grid.dim), 0.0)
        mult[(0,) * grid.dim] = 0.0
    elif isinstance(spec, Tail):
        _check_gamma(spec.gamma, grid.dim)
        cutoff = spec.radius / spec.h
        with np.errstate(divide="ignore"):
            mult = np.where(r > cutoff, r ** (spec.gamma - grid.dim), 0.0)
    elif isinstance(spec, Delta):
        mult = np.full(grid.shape, (2.0 * math.pi) ** (-grid.dim / 2.0))
    elif isinstance(spec, FromFile):
        field = fieldio.read_field(spec.path)
        if field.grid != grid:
            raise FieldFormatError(
                f"{spec.path}: multiplier grid {field.grid} does not match {grid}"
            )
        if np.max(np.abs(field.values.imag)) > 0.0:
            raise FieldFormatError(f"{spec.path}: multiplier must be real-valued")
        mult = field.values.real.copy()
    else:
        raise UnsupportedKernelError(f"unknown kernel spec {spec!r}")
    policy = "zero" if isinstance(spec, (Homogeneous, TruncatedLow)) else "value"
    return Kernel(grid, mult, spec, zero_mode_policy=policy)


def split_low_high(k: Kernel) -> tuple[Kernel, Kernel]:
    """Exact partition (kappa_1, kappa_2) of the multiplier at |xi| = 1.

    kappa_1 is supported on |xi| <= 1, kappa_2 on |xi| > 1, and
    kappa_1 + kappa_2 reproduces the multiplier bit for bit.
    """
    low_mask = k.grid.xi_radius <= 1.0
    low = np.where(low_mask, k.multiplier, 0.0)
    high = np.where(low_mask, 0.0, k.multiplier)
    return (
        Kernel(k.grid, low, k.spec, k.zero_mode_policy, band="low"),
        Kernel(k.grid, high, k.spec, k.zero_mode_policy, band="high"),
    )


@dataclass(frozen=True)
class LqNorm:
    """Quadrature L^q norm of a multiplier, or a divergence flag.

    ``value`` is the dxi^d-weighted quadrature norm (max for q = inf)
    when the continuum norm is finite, and inf when the continuum
    integral diverges for the kernel class at hand.
    """

    value: float
    divergent: bool


def _continuum_divergent(k: Kernel, q: float) -> bool:
    """Whether the continuum L^q norm diverges for this kernel class."""
    spec, band, d = k.spec, k.band, k.grid.dim
    if isinstance(spec, FromFile):
        return False
    if isinstance(spec, Delta):
        if math.isinf(q):
            return False
        return band != "low"  # compact support only after a low split
    gamma = spec.gamma
    # profile |xi|^(gamma-d): integrability at 0 needs (d-gamma)q < d,
    # integrability at infinity needs (d-gamma)q > d.
    sing = (d - gamma) * q >= d if not math.isinf(q) else True
    tail = (d - gamma) * q <= d if not math.isinf(q) else False
    if isinstance(spec, Homogeneous):
        touches_zero = band in ("full", "low")
        unbounded_support = band in ("full", "high")
    elif isinstance(spec, TruncatedLow):
        if band == "high" and spec.radius <= 1.0:
            return False  # empty support
        touches_zero = band in ("full", "low")
        unbounded_support = False
    else:  # Tail
        cutoff = spec.radius / spec.h
        touches_zero = False
        unbounded_support = band in ("full", "high") or cutoff < 1.0
        if band == "low" and cutoff >= 1.0:
            return False  # empty support
    return (touches_zero and sing) or (unbounded_support and tail)


def multiplier_lq_norm(k: Kernel, q: float) -> LqNorm:
    """Quadrature L^q norm of the multiplier; flags continuum divergence.

    For Tail kernels with (d - gamma) q > d this matches the closed form
    (omega_{d-1} / ((d-gamma) q - d))^(1/q) * h^(d - gamma - d/q).
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if _continuum_divergent(k, q):
        return LqNorm(value=math.inf, divergent=True)
    mags = np.abs(k.multiplier)
    if math.isinf(q):
        return LqNorm(value=float(mags.max()), divergent=False)
    value = (k.grid.spectral_cell_volume * stable_sum(mags**q)) ** (1.0 / q)
    return LqNorm(value=value, divergent=False)


def tail_lq_closed_form(gamma: float, h: float, dim: int, q: float) -> float:
    """Exact L^q norm of the Tail multiplier (radius 1): converges iff (d-gamma)q > d."""
    _check_gamma(gamma, dim)
    if math.isinf(q):
        return h ** (dim - gamma)
    if (dim - gamma) * q <= dim:
        raise ValueError("tail norm diverges unless (d - gamma) q > d")
    omega = {1: 2.0, 2: 2.0 * math.pi, 3: 4.0 * math.pi}[dim]
    return (omega / ((dim - gamma) * q - dim)) ** (1.0 / q) * h ** (
        dim - gamma - dim / q
    )
