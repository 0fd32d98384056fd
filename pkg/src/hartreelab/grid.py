"""
Periodic-box surrogate of R^d: grids, fields, and the forward/inverse
Fourier transform under the symmetric (2*pi)^(-d/2) convention.

The box is the cube [-L/2, L/2)^d sampled at N points per axis, so
dx = L/N and the frequency lattice is xi_k = (2*pi/L) * k with integer
k in [-N/2, N/2) per axis (stored in FFT order).  All integrals over R^d
become quadrature sums: dx^d-weighted in physical space, dxi^d-weighted
in frequency space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce

import numpy as np

from .errors import GridMismatchError, InvalidFieldError

__all__ = [
    "Grid",
    "Field",
    "SpectralField",
    "forward",
    "inverse",
    "boundary_mass_fraction",
    "ensure_same_grid",
    "stable_sum",
    "gaussian_field",
    "plane_wave",
    "constant_field",
    "random_band_limited",
]


def stable_sum(values: np.ndarray) -> float:
    """Deterministic reduction used for every norm quadrature.

    numpy reduces C-contiguous float64 input with a fixed pairwise tree,
    so the result is bit-identical across runs for identical input.
    """
    return float(np.sum(np.ascontiguousarray(values)))


@dataclass(frozen=True)
class Grid:
    """
    Cubic periodic grid: ``dim`` axes, ``n_per_axis`` points per axis,
    box length ``box_length`` on every axis.

    Derived quantities satisfy dx * dxi * N = 2*pi exactly per axis.
    """

    dim: int
    n_per_axis: int
    box_length: float

    def __post_init__(self) -> None:
        if not 1 <= self.dim <= 3:
            raise ValueError(f"dim must be 1, 2 or 3, got {self.dim}")
        if self.n_per_axis < 4 or self.n_per_axis % 2 != 0:
            raise ValueError(f"n_per_axis must be even and >= 4, got {self.n_per_axis}")
        if not (self.box_length > 0 and math.isfinite(self.box_length)):
            raise ValueError(f"box_length must be positive and finite, got {self.box_length}")

    @property
    def dx(self) -> float:
        return self.box_length / self.n_per_axis

    @property
    def dxi(self) -> float:
        return 2.0 * math.pi / self.box_length

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.n_per_axis**self.dim

    @property
    def cell_volume(self) -> float:
        """dx^d, the physical quadrature weight."""
        return self.dx**self.dim

    @property
    def spectral_cell_volume(self) -> float:
        """dxi^d, the spectral quadrature weight."""
        return self.dxi**self.dim

    @cached_property
    def x_1d(self) -> np.ndarray:
        """Physical sample coordinates per axis: x_j = -L/2 + j*dx."""
        x = -0.5 * self.box_length + self.dx * np.arange(self.n_per_axis)
        x.setflags(write=False)
        return x

    @cached_property
    def mode_numbers_1d(self) -> np.ndarray:
        """Integer mode numbers per axis in FFT order: 0..N/2-1, -N/2..-1."""
        n = self.n_per_axis
        k = np.fft.fftfreq(n, d=1.0 / n).astype(np.int64)
        k.setflags(write=False)
        return k

    @cached_property
    def xi_1d(self) -> np.ndarray:
        """Frequencies per axis in FFT order: xi_k = dxi * k."""
        xi = self.dxi * self.mode_numbers_1d.astype(np.float64)
        xi.setflags(write=False)
        return xi

    @cached_property
    def xi_squared(self) -> np.ndarray:
        """|xi|^2 on the full frequency lattice (FFT order per axis)."""
        axes = np.meshgrid(*([self.xi_1d] * self.dim), indexing="ij", sparse=True)
        k2 = reduce(np.add, (a**2 for a in axes))
        k2 = np.ascontiguousarray(k2)
        k2.setflags(write=False)
        return k2

    @cached_property
    def xi_radius(self) -> np.ndarray:
        """|xi| on the full frequency lattice."""
        r = np.sqrt(self.xi_squared)
        r.setflags(write=False)
        return r

    @cached_property
    def mode_parity(self) -> np.ndarray:
        """(-1)^(k_1+...+k_d): phase relating the FFT to the centered box."""
        p1 = np.where(self.mode_numbers_1d % 2 == 0, 1.0, -1.0)
        axes = np.meshgrid(*([p1] * self.dim), indexing="ij", sparse=True)
        p = reduce(np.multiply, axes) if self.dim > 1 else axes[0]
        p = np.ascontiguousarray(np.broadcast_to(p, self.shape))
        p.setflags(write=False)
        return p

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """2/3-rule mask: keeps modes with |k| <= N//3 on every axis."""
        cutoff = self.n_per_axis // 3
        m1 = np.abs(self.mode_numbers_1d) <= cutoff
        axes = np.meshgrid(*([m1] * self.dim), indexing="ij", sparse=True)
        m = reduce(np.logical_and, axes) if self.dim > 1 else axes[0]
        m = np.ascontiguousarray(np.broadcast_to(m, self.shape))
        m.setflags(write=False)
        return m

    def x_mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays (one per axis) broadcast over the grid."""
        return tuple(np.meshgrid(*([self.x_1d] * self.dim), indexing="ij", sparse=True))


def _checked_values(grid: Grid, values: np.ndarray, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.complex128)
    if arr.shape != grid.shape:
        if arr.size == grid.size:
            arr = arr.reshape(grid.shape)
        else:
            raise InvalidFieldError(
                f"{what} has {arr.size} samples, grid expects {grid.size}"
            )
    if not np.all(np.isfinite(arr.view(np.float64))):
        raise InvalidFieldError(f"{what} contains non-finite samples")
    return arr


@dataclass(frozen=True)
class Field:
    """Complex samples u(x_j) on a grid, row-major over the axes."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _checked_values(self.grid, self.values, "field"))

    def __add__(self, other: "Field") -> "Field":
        ensure_same_grid(self, other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        ensure_same_grid(self, other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: complex) -> "Field":
        return Field(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def conj(self) -> "Field":
        return Field(self.grid, np.conj(self.values))


@dataclass(frozen=True)
class SpectralField:
    """Complex samples u_hat(xi_k) on a grid's frequency lattice (FFT order)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "values", _checked_values(self.grid, self.values, "spectral field")
        )


def ensure_same_grid(a, b) -> None:
    """Raise GridMismatchError unless both objects share one grid."""
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


def _forward_values(grid: Grid, values: np.ndarray) -> np.ndarray:
    scale = (2.0 * math.pi) ** (-grid.dim / 2.0) * grid.cell_volume
    return scale * grid.mode_parity * np.fft.fftn(values)


def _inverse_values(grid: Grid, values: np.ndarray) -> np.ndarray:
    scale = (2.0 * math.pi) ** (-grid.dim / 2.0) * grid.spectral_cell_volume * grid.size
    return scale * np.fft.ifftn(grid.mode_parity * values)


def forward(u: Field) -> SpectralField:
    """Quadrature approximation of the symmetric-convention transform.

    u_hat(xi_k) ~= (2*pi)^(-d/2) * dx^d * sum_j exp(-i x_j . xi_k) u(x_j),
    evaluated exactly on the lattice via the FFT.
    """
    return SpectralField(u.grid, _forward_values(u.grid, u.values))


def inverse(v: SpectralField) -> Field:
    """Inverse of :func:`forward`; forward o inverse is the identity."""
    return Field(v.grid, _inverse_values(v.grid, v.values))


def boundary_mass_fraction(u: Field, margin: float) -> float:
    """Fraction of the L^2 mass in the outer ``margin`` shell of the box.

    The shell is the complement of the centered cube with half-width
    (1/2 - margin) * L per axis.  A value near 1 flags a field that has
    wrapped around the torus; the free-space surrogate is then invalid.
    """
    if not 0.0 < margin < 0.5:
        raise ValueError(f"margin must lie in (0, 1/2), got {margin}")
    g = u.grid
    inner = np.abs(g.x_1d) < (0.5 - margin) * g.box_length
    axes = np.meshgrid(*([inner] * g.dim), indexing="ij", sparse=True)
    inner_nd = reduce(np.logical_and, axes) if g.dim > 1 else axes[0]
    inner_nd = np.broadcast_to(inner_nd, g.shape)
    density = np.abs(u.values) ** 2
    total = stable_sum(density)
    if total == 0.0:
        return 0.0
    shell = stable_sum(np.where(inner_nd, 0.0, density))
    return shell / total


# --- canned field constructors used by experiments and tests -------------


def gaussian_field(grid: Grid, width: float = 1.0, amplitude: complex = 1.0) -> Field:
    """amplitude * exp(-|x|^2 / (2 width^2)) sampled on the grid."""
    if width <= 0:
        raise ValueError("width must be positive")
    r2 = reduce(np.add, (x**2 for x in grid.x_mesh()))
    return Field(grid, amplitude * np.exp(-r2 / (2.0 * width**2)).astype(np.complex128))


def plane_wave(grid: Grid, mode: tuple[int, ...]) -> Field:
    """exp(i x . xi_k) for the lattice frequency with integer index ``mode``."""
    if len(mode) != grid.dim:
        raise ValueError(f"mode needs {grid.dim} components")
    half = grid.n_per_axis // 2
    if any(not -half <= m < half for m in mode):
        raise ValueError(f"mode {mode} outside [-N/2, N/2)")
    phase = reduce(
        np.add, (grid.dxi * m * x for m, x in zip(mode, grid.x_mesh()))
    )
    return Field(grid, np.exp(1j * phase))


def constant_field(grid: Grid, value: complex = 1.0) -> Field:
    return Field(grid, np.full(grid.shape, value, dtype=np.complex128))


def random_band_limited(
    grid: Grid,
    rng: np.random.Generator,
    max_mode: int = 16,
    unit_l2: bool = True,
) -> Field:
    """Random field with iid complex Gaussian modes on |k|_inf <= max_mode.

    The coefficients are drawn in an order independent of n_per_axis, so
    the same rng state and max_mode produce the same continuum function
    on any grid fine enough to hold the band (N > 2*max_mode + 1).
    """
    if max_mode < 1 or 2 * max_mode + 1 >= grid.n_per_axis:
        raise ValueError(f"max_mode {max_mode} does not fit on N={grid.n_per_axis}")
    box = 2 * max_mode + 1
    coeffs = rng.standard_normal((box,) * grid.dim) + 1j * rng.standard_normal(
        (box,) * grid.dim
    )
    spec = np.zeros(grid.shape, dtype=np.complex128)
    idx = np.arange(-max_mode, max_mode + 1) % grid.n_per_axis
    spec[np.ix_(*([idx] * grid.dim))] = coeffs
    u = inverse(SpectralField(grid, spec))
    if unit_l2:
        l2 = math.sqrt(grid.cell_volume * stable_sum(np.abs(u.values) ** 2))
        u = Field(grid, u.values / l2)
    return u
