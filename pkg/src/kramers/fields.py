"""Field containers, the hbar-scaled Fourier pair in x, and quadrature.

Containers hold samples on the (x, p) grid in x-major layout, i.e. arrays of
shape (Nx, Np) with axis 0 = x and axis 1 = p.  All operations return new
fields; nothing mutates its input.

The x transform pair uses the kernel exp(+i s x / hbar):

    phi(x, p)    = (2 pi hbar)^(-1/2) * integral  phitilde(s, p) e^{+isx/hbar} ds
    phitilde(s, p) = (2 pi hbar)^(-1/2) * integral  phi(x, p) e^{-isx/hbar} dx

realized discretely with the rectangle rule in x (exact for periodic data),
so that forward . inverse is the identity and Parseval holds exactly:

    sum |phi|^2 hx = sum |phitilde|^2 ds.

Quadrature: rectangle rule in x (periodic), trapezoid in p (truncated).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield

import numpy as np

from .errors import GridMismatchError, ValidationError
from .grid import Grid


@dataclass
class WaveField:
    """Complex field phi(x, p) at time t."""

    values: np.ndarray
    grid: Grid
    t: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise ValidationError(
                f"field shape {self.values.shape} != grid shape {self.grid.shape}")

    def copy(self) -> "WaveField":
        return WaveField(self.values.copy(), self.grid, self.t)


@dataclass
class DensityField:
    """Real nonnegative-by-construction density on the (x, p) grid."""

    values: np.ndarray
    grid: Grid
    t: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValidationError(
                f"field shape {self.values.shape} != grid shape {self.grid.shape}")

    def copy(self) -> "DensityField":
        return DensityField(self.values.copy(), self.grid, self.t)


@dataclass
class SpectralField:
    """Complex field phitilde(s, p); axis 0 runs over ascending s."""

    values: np.ndarray
    grid: Grid
    t: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != self.grid.shape:
            raise ValidationError(
                f"field shape {self.values.shape} != grid shape {self.grid.shape}")


@dataclass
class PsiField:
    """Complex coordinate-space function psi(x); the slow-manifold coordinate."""

    values: np.ndarray
    grid: Grid
    t: float = 0.0

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.grid.spec.Nx,):
            raise ValidationError(
                f"psi shape {self.values.shape} != x-grid ({self.grid.spec.Nx},)")

    def copy(self) -> "PsiField":
        return PsiField(self.values.copy(), self.grid, self.t)


def require_same_grid(a, b):
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("fields live on different grids")


# ---------------------------------------------------------------------------
# Densities and transforms
# ---------------------------------------------------------------------------

def rho_from_phi(phi: WaveField) -> DensityField:
    """|phi|^2, the energy distribution of the internal oscillation."""
    v = phi.values
    return DensityField(v.real * v.real + v.imag * v.imag, phi.grid, phi.t)


def _forward_factor(grid: Grid) -> float:
    return grid.hx / np.sqrt(2.0 * np.pi * grid.hbar)


def x_fourier(phi: WaveField) -> SpectralField:
    """phi(x, p) -> phitilde(s, p) with s ascending."""
    out = np.fft.fftshift(np.fft.fft(phi.values, axis=0), axes=0)
    out *= _forward_factor(phi.grid)
    return SpectralField(out, phi.grid, phi.t)


def x_fourier_inverse(spec_field: SpectralField) -> WaveField:
    """phitilde(s, p) -> phi(x, p); exact inverse of :func:`x_fourier`."""
    out = np.fft.ifft(np.fft.ifftshift(spec_field.values, axes=0), axis=0)
    out /= _forward_factor(spec_field.grid)
    return WaveField(out, spec_field.grid, spec_field.t)


def psi_fourier(psi: PsiField) -> np.ndarray:
    """1-D version of the forward transform: psitilde(s), s ascending."""
    out = np.fft.fftshift(np.fft.fft(psi.values))
    out *= _forward_factor(psi.grid)
    return out


def psi_fourier_inverse(psitilde: np.ndarray, grid: Grid, t: float = 0.0) -> PsiField:
    out = np.fft.ifft(np.fft.ifftshift(psitilde))
    out /= _forward_factor(grid)
    return PsiField(out, grid, t)


# ---------------------------------------------------------------------------
# Quadrature and norms
# ---------------------------------------------------------------------------

def phase_space_integral(field, weight=None):
    """Integral over dx dp (rectangle in x, trapezoid in p).

    ``weight`` may be None, an array broadcastable to the grid shape, or a
    callable w(X, P) evaluated on the coordinate mesh.  For a SpectralField
    the x measure is replaced by the s measure ds.
    """
    grid = field.grid
    v = field.values
    if weight is not None:
        if callable(weight):
            X, P = np.meshgrid(grid.x if isinstance(field, (WaveField, DensityField)) else grid.s,
                               grid.p, indexing="ij")
            weight = weight(X, P)
        v = v * weight
    wp = grid.p_weights()
    col = v @ wp
    dx = grid.ds if isinstance(field, SpectralField) else grid.hx
    return col.sum() * dx


def l2_norm(field) -> float:
    """sqrt of integral |field|^2 over its natural measure."""
    grid = field.grid
    v = field.values
    if isinstance(field, PsiField):
        return float(np.sqrt(np.sum(np.abs(v) ** 2) * grid.hx))
    wp = grid.p_weights()
    dx = grid.ds if isinstance(field, SpectralField) else grid.hx
    mag2 = (v.real * v.real + v.imag * v.imag) if np.iscomplexobj(v) else v * v
    return float(np.sqrt((mag2 @ wp).sum() * dx))


def marginal_x(rho: DensityField) -> np.ndarray:
    """Integrate the density over p, leaving a 1-D profile over x."""
    return rho.values @ rho.grid.p_weights()


def boundary_leak_ratio(field) -> float:
    """max |field| over the two outermost p rows relative to max |field|.

    Fields must stay negligible at the p edges; exceeding the configured
    tolerance is a diagnostic event, not an error.
    """
    v = np.abs(field.values)
    peak = v.max()
    if peak == 0.0:
        return 0.0
    edge = max(v[:, 0].max(), v[:, -1].max())
    return float(edge / peak)
