"""
Norm-inflation laboratory for the second Picard iterate

    D(f)(t) = -i * int_0^t exp(i(t-s)*Lap) (K * |U(s)f|^2) U(s)f ds,

evaluated over scaled data families f_h(x) = f(h x) on co-scaled grids
(box L0/h at fixed N, so physical and spectral resolution track the
family).  For the homogeneous kernel the continuum identity

    ||D(f_h)(t)||_W = h^-(d - gamma + 2) * ||D(f)(t h^2)||_W

is exact; its discrete residual is a sharp self-test of the whole
pipeline.  Sweeps fit the growth exponent of ||D(f_h)(t)||_W in h,
which approaches -(d - gamma) for homogeneous kernels; truncated
kernels must show monotone growth with an extra tail-norm correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import fieldio
from .dynamics import _fft, _ifft, _rhs_values, _wiener, hartree_rhs
from .errors import GridMismatchError, UnsupportedKernelError
from .grid import Field, Grid, gaussian_field
from .kernels import Homogeneous, Kernel, KernelSpec, Tail, materialize, multiplier_lq_norm
from .norms import norm_wiener

__all__ = [
    "GaussianProfile",
    "FileProfile",
    "ScaledFamily",
    "InflationReport",
    "TailDiagnostics",
    "TaylorFit",
    "second_iterate",
    "scaling_identity_residual",
    "inflation_sweep",
    "taylor_fit",
]


@dataclass(frozen=True)
class GaussianProfile:
    """Analytic base profile: amplitude * exp(-|x|^2 / (2 width^2))."""

    width: float = 1.0
    amplitude: float = 1.0

    def sample(self, grid: Grid, h: float) -> Field:
        return gaussian_field(grid, width=self.width / h, amplitude=self.amplitude)


@dataclass(frozen=True)
class FileProfile:
    """Base profile read from an HWF1 file on the base grid.

    Co-scaling leaves the sample values unchanged: f_h(x_j) on the box
    L0/h equals f at the corresponding base-grid point, so only the grid
    metadata changes with h.
    """

    path: str

    def sample(self, grid: Grid, h: float) -> Field:
        base = fieldio.read_field(self.path)
        if base.grid.dim != grid.dim or base.grid.n_per_axis != grid.n_per_axis:
            raise GridMismatchError(f"{self.path}: profile grid does not match family grid")
        return Field(grid, base.values)


Profile = Union[GaussianProfile, FileProfile]


@dataclass(frozen=True)
class ScaledFamily:
    """Scaled data family f_h(x) = f(h x) on co-scaled grids L_h = L0 / h."""

    profile: Profile
    h_values: tuple[float, ...]
    dim: int
    n_per_axis: int
    base_box: float

    def __post_init__(self) -> None:
        hs = tuple(float(h) for h in self.h_values)
        object.__setattr__(self, "h_values", hs)
        if any(not 0.0 < h <= 1.0 for h in hs):
            raise ValueError("all h must lie in (0, 1]")
        if any(b <= a for a, b in zip(hs[1:], hs)):
            raise ValueError("h_values must be strictly decreasing")

    def grid_for(self, h: float) -> Grid:
        return Grid(self.dim, self.n_per_axis, self.base_box / h)

    def field_for(self, h: float) -> Field:
        return self.profile.sample(self.grid_for(h), h)

    @property
    def base_grid(self) -> Grid:
        return self.grid_for(1.0)

    @property
    def base_field(self) -> Field:
        return self.profile.sample(self.base_grid, 1.0)


def second_iterate(f: Field, k: Kernel, t: float, n_quad: int = 64) -> Field:
    """D(f)(t) by composite trapezoid over n_quad nodes on [0, t]."""
    if n_quad < 16:
        raise ValueError("n_quad must be >= 16")
    if t < 0:
        raise ValueError("t must be nonnegative")
    if f.grid != k.grid:
        raise GridMismatchError("field and kernel live on different grids")
    g = f.grid
    if t == 0.0:
        return Field(g, np.zeros(g.shape, dtype=np.complex128))
    k2 = g.xi_squared
    f_hat = _fft(g, f.values)
    taus = np.linspace(0.0, t, n_quad)
    dt = t / (n_quad - 1)
    acc = np.zeros(g.shape, dtype=np.complex128)
    for j, tau in enumerate(taus):
        psi = _ifft(g, np.exp(-1j * tau * k2) * f_hat)
        g_hat = _fft(g, _rhs_values(psi, k))
        w = 0.5 * dt if j in (0, n_quad - 1) else dt
        acc += w * np.exp(-1j * (t - tau) * k2) * g_hat
    return Field(g, _ifft(g, -1j * acc))


def scaling_identity_residual(
    family: ScaledFamily,
    k_spec: KernelSpec,
    t: float,
    h: float,
    n_quad: int = 64,
) -> float:
    """Relative residual of the homogeneous-kernel rescaling identity.

    Left side: ||D(f_h)(t)||_W on the co-scaled grid; right side:
    h^-(d - gamma + 2) ||D(f)(t h^2)||_W on the base grid.  Exact in the
    continuum, so the residual isolates discretization and rounding.
    """
    if not isinstance(k_spec, Homogeneous):
        raise UnsupportedKernelError("the rescaling identity needs a homogeneous kernel")
    if h not in family.h_values:
        raise ValueError(f"h={h} is not part of the family sweep")
    d = family.dim
    grid_h = family.grid_for(h)
    lhs = norm_wiener(
        second_iterate(family.field_for(h), materialize(k_spec, grid_h), t, n_quad)
    )
    base = family.base_grid
    rhs_norm = norm_wiener(
        second_iterate(family.base_field, materialize(k_spec, base), t * h * h, n_quad)
    )
    rhs = h ** -(d - k_spec.gamma + 2.0) * rhs_norm
    return abs(lhs - rhs) / rhs


@dataclass(frozen=True)
class TailDiagnostics:
    """Per-h tail-correction data for truncated-kernel sweeps.

    x_h is the Wiener norm of the Duhamel remainder driven by the tail
    kernel (cutoff 1/h) over [0, t h^2]; bound_factor is t h^2 times the
    tail multiplier's L^q norm, so x_h <= C * bound_factor with a single
    C across the sweep.
    """

    h: float
    x_h: float
    lq_norm: float
    bound_factor: float


@dataclass(frozen=True)
class InflationReport:
    """Results of an inflation sweep over a scaled family."""

    h_values: tuple[float, ...]
    w_norms: tuple[float, ...]
    boxes: tuple[float, ...]
    t: float
    slope: Optional[float] = None
    slope_stderr: Optional[float] = None
    fit_residual: Optional[float] = None
    compensated: Optional[tuple[float, ...]] = None
    reference: Optional[float] = None
    identity_residuals: Optional[tuple[float, ...]] = None
    tail: Optional[tuple[TailDiagnostics, ...]] = None

    @property
    def monotone_growth(self) -> bool:
        """Strictly increasing values as h decreases along the sweep."""
        return all(b > a for a, b in zip(self.w_norms, self.w_norms[1:]))

    @property
    def growth_factor(self) -> float:
        return self.w_norms[-1] / self.w_norms[0]


def _loglog_fit(h_values, values) -> tuple[float, float, float]:
    x = np.log(np.asarray(h_values))
    y = np.log(np.asarray(values))
    (slope, intercept), cov = np.polyfit(x, y, 1, cov=True)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(np.sqrt(cov[0, 0])), resid


def inflation_sweep(
    family: ScaledFamily,
    k_spec: KernelSpec,
    t: float,
    n_quad: int = 64,
    tail_q: float = 4.0,
) -> InflationReport:
    """Evaluate ||D(f_h)(t)||_W across the family and fit its h-exponent.

    Homogeneous kernels: adds the log-log slope (asymptote -(d - gamma)),
    the compensated values ||D(f_h)(t)||_W * h^(d-gamma) with their small-
    time reference t * ||(K*|f|^2) f||_W, and the per-h identity residuals.
    Truncated kernels: adds tail diagnostics built on the complementary
    Tail kernel at each h.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if len(family.h_values) < 3:
        raise ValueError("need at least 3 h-values for a sweep")
    w_norms = []
    for h in family.h_values:
        grid_h = family.grid_for(h)
        k = materialize(k_spec, grid_h)
        w_norms.append(norm_wiener(second_iterate(family.field_for(h), k, t, n_quad)))
    w_norms = tuple(w_norms)
    boxes = tuple(family.base_box / h for h in family.h_values)

    if all(v == 0.0 for v in w_norms):
        raise ValueError("all sweep values vanish (zero kernel?); slope fit rejected")

    report = InflationReport(family.h_values, w_norms, boxes, t)
    slope, stderr, resid = _loglog_fit(family.h_values, w_norms)

    if isinstance(k_spec, Homogeneous):
        d = family.dim
        comp = tuple(
            v * h ** (d - k_spec.gamma) for v, h in zip(w_norms, family.h_values)
        )
        base_kernel = materialize(k_spec, family.base_grid)
        reference = t * norm_wiener(hartree_rhs(family.base_field, base_kernel))
        residuals = tuple(
            scaling_identity_residual(family, k_spec, t, h, n_quad)
            for h in family.h_values
        )
        return InflationReport(
            family.h_values, w_norms, boxes, t,
            slope=slope, slope_stderr=stderr, fit_residual=resid,
            compensated=comp, reference=reference, identity_residuals=residuals,
        )

    tail = None
    if hasattr(k_spec, "gamma"):
        base = family.base_grid
        f = family.base_field
        diags = []
        for h in family.h_values:
            tail_kernel = materialize(Tail(gamma=k_spec.gamma, h=h), base)
            lq = multiplier_lq_norm(tail_kernel, tail_q)
            x_h = _tail_remainder(f, tail_kernel, t, h, n_quad)
            diags.append(
                TailDiagnostics(
                    h=h,
                    x_h=x_h,
                    lq_norm=lq.value,
                    bound_factor=t * h * h * lq.value,
                )
            )
        tail = tuple(diags)
    return InflationReport(
        family.h_values, w_norms, boxes, t,
        slope=slope, slope_stderr=stderr, fit_residual=resid, tail=tail,
    )


def _tail_remainder(f: Field, tail_kernel: Kernel, t: float, h: float, n_quad: int) -> float:
    """|| int_0^{t h^2} U(t - s) (K_h * |U(s) f|^2) U(s) f ds ||_W."""
    g = f.grid
    k2 = g.xi_squared
    f_hat = _fft(g, f.values)
    s_max = t * h * h
    taus = np.linspace(0.0, s_max, n_quad)
    dt = s_max / (n_quad - 1)
    acc = np.zeros(g.shape, dtype=np.complex128)
    for j, tau in enumerate(taus):
        psi = _ifft(g, np.exp(-1j * tau * k2) * f_hat)
        g_hat = _fft(g, _rhs_values(psi, tail_kernel))
        w = 0.5 * dt if j in (0, n_quad - 1) else dt
        acc += w * np.exp(-1j * (t - tau) * k2) * g_hat
    return _wiener(g, _ifft(g, acc))


@dataclass(frozen=True)
class TaylorFit:
    """Small-time behaviour ||D(f)(s)||_W = s * ||(K*|f|^2)f||_W + O(s^2)."""

    linear_coeff: float
    remainder_order: float
    reference: float
    s_values: tuple[float, ...]
    norms: tuple[float, ...]
    remainders: tuple[float, ...]


def taylor_fit(
    f: Field,
    k: Kernel,
    s_values,
    n_quad: int = 33,
) -> TaylorFit:
    """Fit the linear coefficient and remainder order of ||D(f)(s)||_W.

    linear_coeff comes from a least-squares fit of c1*s + c2*s^2 to the
    norms; remainder_order is the log-log slope of
    ||D(f)(s) + i s (K*|f|^2) f||_W against s.
    """
    s = tuple(sorted((float(v) for v in s_values), reverse=True))
    if len(s) < 4:
        raise ValueError("need at least 4 s-values")
    if s[0] < 10.0 * s[-1] * (1.0 - 1e-12):
        raise ValueError("s-values must span at least one decade")
    g0 = hartree_rhs(f, k)
    reference = norm_wiener(g0)
    norms, remainders = [], []
    for sv in s:
        d = second_iterate(f, k, sv, n_quad)
        norms.append(norm_wiener(d))
        remainders.append(norm_wiener(Field(f.grid, d.values + 1j * sv * g0.values)))
    sa = np.asarray(s)
    design = np.stack([sa, sa**2], axis=1)
    coeffs, *_ = np.linalg.lstsq(design, np.asarray(norms), rcond=None)
    if reference == 0.0:
        order = math.nan
    else:
        order, _, _ = _loglog_fit(sa, remainders)
    return TaylorFit(
        linear_coeff=float(coeffs[0]),
        remainder_order=float(order),
        reference=reference,
        s_values=s,
        norms=tuple(norms),
        remainders=tuple(remainders),
    )
