"""Phase-space discretization.

The coordinate x lives on a periodic interval [0, Lx) sampled at Nx points
(power of two, Fourier-natural).  The momentum p lives on a truncated
interval with Np uniform points

    p_j = -Pmax + j * hp,    hp = 2 Pmax / Np,    j = 0 .. Np-1,

so p = 0 is on the grid for even Np and fields are required (by contract,
monitored elsewhere) to be negligible at the p edges.  The x-Fourier
wavenumber set

    s_n = 2 pi hbar n / Lx,    n = -Nx/2 .. Nx/2 - 1

is derived from (Lx, Nx, hbar); spectral fields are stored with s ascending.

Arrays on a Grid are read-only; grids are freely shareable between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class GridSpec:
    Lx: float
    Nx: int
    Pmax: float
    Np: int
    d: int = 1


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Grid:
    spec: GridSpec
    hbar: float
    x: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    s: np.ndarray = field(repr=False)
    kx: np.ndarray = field(repr=False)
    hx: float = 0.0
    hp: float = 0.0
    ds: float = 0.0

    @property
    def shape(self):
        return (self.spec.Nx, self.spec.Np)

    def p_weights(self) -> np.ndarray:
        """Trapezoid weights for integration over the truncated p interval."""
        w = np.full(self.spec.Np, self.hp)
        w[0] *= 0.5
        w[-1] *= 0.5
        return _readonly(w)

    def same_as(self, other: "Grid") -> bool:
        return self.spec == other.spec and self.hbar == other.hbar


def make_grid(spec: GridSpec, hbar: float) -> Grid:
    """Build the coordinate/wavenumber arrays for a validated spec."""
    Nx, Np = spec.Nx, spec.Np
    if Nx < 8 or (Nx & (Nx - 1)) != 0:
        raise ValidationError(f"Nx must be a power of two >= 8, got {Nx}")
    if Np < 8 or Np % 2 != 0:
        raise ValidationError(f"Np must be an even integer >= 8, got {Np}")
    if spec.Lx <= 0 or spec.Pmax <= 0:
        raise ValidationError("Lx and Pmax must be positive")
    if spec.d != 1:
        raise NotImplementedError("only spatial dimension d = 1 is implemented")
    if hbar <= 0:
        raise ValidationError(f"hbar must be positive, got {hbar}")

    hx = spec.Lx / Nx
    hp = 2.0 * spec.Pmax / Np
    ds = 2.0 * np.pi * hbar / spec.Lx
    x = _readonly(hx * np.arange(Nx))
    p = _readonly(-spec.Pmax + hp * np.arange(Np))
    s = _readonly(ds * (np.arange(Nx) - Nx // 2))
    kx = _readonly(2.0 * np.pi * np.fft.fftfreq(Nx, d=hx))  # fft order, for d/dx
    return Grid(spec=spec, hbar=hbar, x=x, p=p, s=s, kx=kx, hx=hx, hp=hp, ds=ds)


def recommended_pmax(s_occupied: float, kTm: float) -> float:
    """Sizing rule: the p window must hold the occupied drift targets plus
    eight thermal widths, Pmax >= max|s| + 8 sqrt(k_B T m)."""
    return abs(s_occupied) + 8.0 * np.sqrt(kTm)
