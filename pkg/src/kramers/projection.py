"""Projector onto the quasi-stationary (slow) subspace.

The dissipation generator has a kernel spanned, column by column in the
x-wavenumber s, by Gaussians in p centered at s with variance D = k_B T m.
The projector P0 replaces each s-column's p-profile by that Gaussian while
preserving the column's p-integral:

    phitilde0(s, p) = [ integral phitilde(s, p') dp' ] * G(p - s) ,
    G(u) = exp(-u^2 / (2 D)) / (2 pi D)^{d/2} .

In position space the image is parameterized by a coordinate-only function

    psi(y) = (1/C) * integral phi(y, p) dp ,

through a Gaussian coherent-state-like kernel of width sigma = hbar/sqrt(D):

    phi0(x, p) = (C / (2 pi hbar)^d) *
                 integral psi(y) e^{-D (x-y)^2 / (2 hbar^2)} e^{i p (x-y)/hbar} dy .

The constant C is fixed by the norm-matching convention

    integral |phi0|^2 dx dp = integral |psi|^2 dy ,

which gives C = (4 pi D)^{d/4}.  P0 itself is independent of C (it cancels
between extraction and embedding); C only sets the relative normalization
of psi.

Production path: the spectral (Fourier) route, O(N log N) and spectrally
accurate.   A direct O(Nx^2 Np) quadrature of the kernel integral is
retained as an independent cross-check oracle and as the "direct" route of
:func:`project_p0`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dfield

import numpy as np

from .errors import AccuracyWarning, DegenerateKernelError, GridMismatchError
from .fields import (PsiField, SpectralField, WaveField, psi_fourier,
                     x_fourier, x_fourier_inverse)
from .grid import Grid
from .params import Params


@dataclass(frozen=True)
class ProjectionContext:
    params: Params
    grid: Grid

    D: float = dfield(init=False)        # k_B T m, thermal momentum variance
    sigma: float = dfield(init=False)    # position-space kernel width hbar/sqrt(D)
    C: float = dfield(init=False)        # psi normalization constant

    def __post_init__(self):
        if self.params.T <= 0 or self.params.m <= 0:
            raise DegenerateKernelError(
                "projection kernel requires T > 0 and m > 0 "
                f"(got T={self.params.T}, m={self.params.m})")
        if abs(self.grid.hbar - self.params.hbar) > 1e-12 * self.params.hbar:
            raise GridMismatchError("grid was built with a different hbar than params")
        D = self.params.kTm
        sigma = self.params.hbar / np.sqrt(D)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "C", (4.0 * np.pi * D) ** (self.params.d / 4.0))
        g = self.grid
        if not (4.0 * g.hx <= sigma):
            warnings.warn(
                f"kernel width sigma={sigma:.3g} under-resolved (needs >= 4*hx={4*g.hx:.3g})",
                AccuracyWarning, stacklevel=2)
        if not (sigma <= g.spec.Lx / 8.0):
            warnings.warn(
                f"kernel width sigma={sigma:.3g} too wide for the periodic box "
                f"(needs <= Lx/8={g.spec.Lx/8:.3g}); wrap-around bias expected",
                AccuracyWarning, stacklevel=2)

    def p_gaussian(self) -> np.ndarray:
        """exp(-(p - s)^2 / (2 D)) on the (s, p) mesh."""
        u = self.grid.p[None, :] - self.grid.s[:, None]
        return np.exp(-u * u / (2.0 * self.D))


def extract_psi(phi: WaveField, ctx: ProjectionContext) -> PsiField:
    """psi(y) = (1/C) * integral phi(y, p) dp (trapezoid in p)."""
    _require_on_grid(phi, ctx)
    vals = (phi.values @ phi.grid.p_weights()) / ctx.C
    return PsiField(vals, phi.grid, phi.t)


def embed_psi(psi: PsiField, ctx: ProjectionContext) -> WaveField:
    """Embed a coordinate function into the slow subspace (spectral route)."""
    _require_on_grid(psi, ctx)
    psitilde = psi_fourier(psi)
    pref = ctx.C / np.sqrt(2.0 * np.pi * ctx.D) ** ctx.params.d
    phitilde = pref * psitilde[:, None] * ctx.p_gaussian()
    return x_fourier_inverse(SpectralField(phitilde, psi.grid, psi.t))


def embed_psi_quadrature(psi: PsiField, ctx: ProjectionContext) -> WaveField:
    """Direct quadrature of the embedding kernel integral.

    O(Nx^2 Np) real-space evaluation, independent of the spectral route;
    kept as a cross-check oracle.  Uses the minimal-image convention for
    x - y on the periodic box.
    """
    _require_on_grid(psi, ctx)
    g = ctx.grid
    Lx = g.spec.Lx
    hbar = ctx.params.hbar
    W = g.x[:, None] - g.x[None, :]
    W = (W + Lx / 2.0) % Lx - Lx / 2.0
    kernel = np.exp(-ctx.D * W * W / (2.0 * hbar * hbar))
    kernel *= ctx.C * g.hx / (2.0 * np.pi * hbar) ** ctx.params.d
    out = np.empty(g.shape, dtype=np.complex128)
    # phase accumulation: exp(i p_j W / hbar) built row-by-row by one multiply
    phase = np.exp(1j * g.p[0] * W / hbar)
    step = np.exp(1j * g.hp * W / hbar)
    for j in range(g.spec.Np):
        out[:, j] = (kernel * phase) @ psi.values
        phase *= step
    return WaveField(out, g, psi.t)


def project_p0(phi: WaveField, ctx: ProjectionContext, route: str = "fourier") -> WaveField:
    """Project onto the slow subspace.

    route="fourier": per-s column surgery in spectral space (production).
    route="direct":  extraction followed by the quadrature embedding
    (independent code path, used for cross-validation).
    """
    _require_on_grid(phi, ctx)
    if route == "fourier":
        spec = x_fourier(phi)
        mass = spec.values @ phi.grid.p_weights()
        gauss = ctx.p_gaussian()
        gauss /= np.sqrt(2.0 * np.pi * ctx.D) ** ctx.params.d
        out = mass[:, None] * gauss
        return x_fourier_inverse(SpectralField(out, phi.grid, phi.t))
    if route == "direct":
        return embed_psi_quadrature(extract_psi(phi, ctx), ctx)
    raise ValueError(f"unknown projection route {route!r}")


def _require_on_grid(field, ctx: ProjectionContext):
    if not field.grid.same_as(ctx.grid):
        raise GridMismatchError("field grid does not match projection context grid")
