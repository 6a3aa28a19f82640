"""Initial-state builders.

All builders are deterministic given their arguments (random fields take an
explicit seed), which is what makes run manifests reproducible.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .fields import PsiField, WaveField, l2_norm
from .grid import Grid
from .params import Params
from .projection import ProjectionContext, embed_psi


def gaussian_psi(grid: Grid, params: Params, center: float, width: float,
                 momentum: float = 0.0) -> PsiField:
    """Normalized Gaussian packet psi ~ exp(-(x-c)^2/(4 w^2) + i p0 x / hbar).

    |psi|^2 then has standard deviation ``width``.
    """
    if width <= 0:
        raise ValidationError(f"width must be positive, got {width}")
    x = grid.x
    v = np.exp(-((x - center) ** 2) / (4.0 * width * width)
               + 1j * momentum * x / params.hbar)
    psi = PsiField(v, grid, 0.0)
    psi.values /= l2_norm(psi)
    return psi


def embedded_gaussian(pctx: ProjectionContext, center: float, width: float,
                      momentum: float = 0.0) -> WaveField:
    """Slow-subspace wave field built from a normalized Gaussian psi."""
    return embed_psi(gaussian_psi(pctx.grid, pctx.params, center, width, momentum), pctx)


def random_smooth_field(grid: Grid, params: Params, seed: int,
                        cutoff_x: int = 8, cutoff_p: int = 6,
                        p_center: float = 0.0, p_width: float | None = None) -> WaveField:
    """Band-limited random field with a Gaussian momentum envelope.

    The x content is a random trigonometric polynomial through wavenumber
    index ``cutoff_x``; the p content is a random trigonometric polynomial
    of ``cutoff_p`` modes under an envelope exp(-(p-pc)^2/(2 w^2)) with
    w = Pmax/7 by default, which keeps the p-edge amplitude below ~1e-10 of
    the peak.  Normalized to unit L2 norm.  Deterministic per seed.
    """
    spec = grid.spec
    if cutoff_x < 1 or cutoff_x > spec.Nx // 2 - 1:
        raise ValidationError(f"cutoff_x must be in [1, Nx/2-1], got {cutoff_x}")
    rng = np.random.default_rng(seed)
    if p_width is None:
        p_width = spec.Pmax / 7.0

    nmodes_x = 2 * cutoff_x + 1
    nmodes_p = 2 * cutoff_p + 1
    a = rng.normal(size=(nmodes_x, nmodes_p)) + 1j * rng.normal(size=(nmodes_x, nmodes_p))

    kx = 2.0 * np.pi / spec.Lx * np.arange(-cutoff_x, cutoff_x + 1)
    kp = np.pi / spec.Pmax * np.arange(-cutoff_p, cutoff_p + 1)
    ex = np.exp(1j * np.outer(grid.x, kx))              # (Nx, nmodes_x)
    ep = np.exp(1j * np.outer(kp, grid.p))              # (nmodes_p, Np)
    v = ex @ a @ ep
    v *= np.exp(-((grid.p - p_center) ** 2) / (2.0 * p_width * p_width))[None, :]

    phi = WaveField(v, grid, 0.0)
    phi.values /= l2_norm(phi)
    return phi
