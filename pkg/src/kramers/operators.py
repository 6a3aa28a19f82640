"""Right-hand-side operators for the phase-space evolution equations.

Wave-field equation (specific resistance gamma = beta / m):

    d phi / dt = A phi + gamma * B phi

    A phi = dV/dx * dphi/dp - dH/dp * (d/dx - i p / hbar) phi - (i/hbar) H phi
    B phi = d/dp [ (p + i hbar d/dx) phi + k_B T m  dphi/dp ]

Under the rest-energy gauge (``params.remove_rest_energy``) the constant
m c^2 is dropped from the phase term of A: the evolved field is then
phi * exp(+i m c^2 t / hbar), which has the same |phi|^2.

Classical densities evolve by the standard drift-diffusion transport

    d f / dt = {H, f} + gamma * d/dp (p f + k_B T m df/dp)

and, at gamma = 0, by the Liouville bracket alone.

Discretization contract: spectral differentiation in x (periodic);
finite differences in p, centered of order ``p_order`` (6 by default, 2
available) in the interior, reduced symmetric orders approaching the edges,
and one-sided 2nd-order stencils on the two edge rows.  The multiplication
by p uses collocated grid values.  No ghost cells: fields are negligible at
the p edges by contract, monitored via ``BoundaryLeakWarning``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dfield

import numpy as np

from .errors import BoundaryLeakWarning, GridMismatchError, ValidationError
from .fields import DensityField, WaveField, boundary_leak_ratio
from .grid import Grid
from .params import HamiltonianMode, Params, Potential, dH_dp, eval_hamiltonian


def p_derivative(values: np.ndarray, hp: float, order: int = 6) -> np.ndarray:
    """d/dp along the last axis.

    order=2: 3-point central interior.  order=6: 7-point central interior
    with 4th/2nd-order central rows next to the boundary.  Both close the
    two edge rows with one-sided 2nd-order stencils.
    """
    v = values
    out = np.empty_like(v)
    if order == 2:
        out[..., 1:-1] = (v[..., 2:] - v[..., :-2]) / (2.0 * hp)
    elif order == 6:
        out[..., 3:-3] = (
            -v[..., :-6] + 9.0 * v[..., 1:-5] - 45.0 * v[..., 2:-4]
            + 45.0 * v[..., 4:-2] - 9.0 * v[..., 5:-1] + v[..., 6:]
        ) / (60.0 * hp)
        out[..., 2] = (v[..., 0] - 8.0 * v[..., 1] + 8.0 * v[..., 3] - v[..., 4]) / (12.0 * hp)
        out[..., -3] = (v[..., -5] - 8.0 * v[..., -4] + 8.0 * v[..., -2] - v[..., -1]) / (12.0 * hp)
        out[..., 1] = (v[..., 2] - v[..., 0]) / (2.0 * hp)
        out[..., -2] = (v[..., -1] - v[..., -3]) / (2.0 * hp)
    else:
        raise ValidationError(f"p_order must be 2 or 6, got {order}")
    out[..., 0] = (-3.0 * v[..., 0] + 4.0 * v[..., 1] - v[..., 2]) / (2.0 * hp)
    out[..., -1] = (3.0 * v[..., -1] - 4.0 * v[..., -2] + v[..., -3]) / (2.0 * hp)
    return out


def x_derivative(values: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral d/dx along axis 0 (periodic)."""
    return np.fft.ifft(1j * grid.kx[:, None] * np.fft.fft(values, axis=0), axis=0)


@dataclass(frozen=True)
class OperatorContext:
    """Immutable bundle of parameters, potential, grid, and cached coefficients."""

    params: Params
    pot: Potential
    grid: Grid
    mode: HamiltonianMode = HamiltonianMode.QUADRATIC
    p_order: int = 6
    boundary_tol: float = 1e-10
    warn_boundary: bool = True

    # caches filled in __post_init__
    V: np.ndarray = dfield(init=False, repr=False)
    Vx: np.ndarray = dfield(init=False, repr=False)
    dHdp: np.ndarray = dfield(init=False, repr=False)
    H_phase: np.ndarray = dfield(init=False, repr=False)

    def __post_init__(self):
        if self.p_order not in (2, 6):
            raise ValidationError(f"p_order must be 2 or 6, got {self.p_order}")
        if abs(self.grid.hbar - self.params.hbar) > 1e-12 * self.params.hbar:
            raise ValidationError("grid was built with a different hbar than params")
        g = self.grid
        V = np.asarray(self.pot.value(g.x), dtype=float)
        if V.shape == ():
            V = np.full(g.spec.Nx, float(V))
        Vx = np.asarray(self.pot.grad(g.x), dtype=float)
        if Vx.shape == ():
            Vx = np.full(g.spec.Nx, float(Vx))
        H = eval_hamiltonian(self.params, self.pot, g.x[:, None], g.p[None, :], self.mode)
        if self.params.remove_rest_energy:
            H = H - self.params.mc2
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "Vx", Vx)
        object.__setattr__(self, "dHdp", dH_dp(self.params, g.p, self.mode))
        object.__setattr__(self, "H_phase", H)

    @property
    def gamma(self) -> float:
        return self.params.gamma

    @property
    def kTm(self) -> float:
        return self.params.kTm


def _require_on_grid(phi, ctx: OperatorContext):
    if not phi.grid.same_as(ctx.grid):
        raise GridMismatchError("field grid does not match operator context grid")


def _boundary_check(phi, ctx: OperatorContext):
    if ctx.warn_boundary:
        ratio = boundary_leak_ratio(phi)
        if ratio > ctx.boundary_tol:
            warnings.warn(
                f"|phi| at p-grid edge is {ratio:.2e} of max |phi| "
                f"(tolerance {ctx.boundary_tol:.0e}); results near the edge are unreliable",
                BoundaryLeakWarning,
                stacklevel=3,
            )


# ---------------------------------------------------------------------------
# Shift-derivative operators.  D_x = d/dx - i p / hbar fails to commute with
# D_p = d/dp: [D_p, D_x] = -i / hbar, which is what makes the phase-space
# representation genuinely quantum-like.
# ---------------------------------------------------------------------------

def apply_dx(phi: WaveField, ctx: OperatorContext) -> WaveField:
    """D_x phi = dphi/dx - (i p / hbar) phi (spectral d/dx)."""
    _require_on_grid(phi, ctx)
    v = phi.values
    out = x_derivative(v, ctx.grid)
    out -= (1j / ctx.params.hbar) * ctx.grid.p[None, :] * v
    return WaveField(out, phi.grid, phi.t)


def apply_dp(phi: WaveField, ctx: OperatorContext) -> WaveField:
    """D_p phi = dphi/dp (finite differences of order ctx.p_order)."""
    _require_on_grid(phi, ctx)
    return WaveField(p_derivative(phi.values, ctx.grid.hp, ctx.p_order), phi.grid, phi.t)


# ---------------------------------------------------------------------------
# Wave-field generators
# ---------------------------------------------------------------------------

def apply_transport(phi: WaveField, ctx: OperatorContext) -> WaveField:
    """Transport along the classical flow plus local phase rotation.

    A phi = dV/dx dphi/dp - dH/dp (d/dx - ip/hbar) phi - (i/hbar) H phi,
    with m c^2 dropped from the phase term under the rest-energy gauge.
    """
    _require_on_grid(phi, ctx)
    _boundary_check(phi, ctx)
    g = ctx.grid
    hbar = ctx.params.hbar
    v = phi.values
    dpv = p_derivative(v, g.hp, ctx.p_order)
    shifted_dx = x_derivative(v, g)
    shifted_dx -= (1j / hbar) * g.p[None, :] * v
    out = ctx.Vx[:, None] * dpv
    out -= ctx.dHdp[None, :] * shifted_dx
    out -= (1j / hbar) * ctx.H_phase * v
    return WaveField(out, phi.grid, phi.t)


def apply_dissipation(phi: WaveField, ctx: OperatorContext) -> WaveField:
    """Drift-diffusion generator B phi = d/dp[(p + i hbar d/dx) phi + kTm dphi/dp].

    After the hbar-scaled x transform this is, column by column in s, an
    Ornstein-Uhlenbeck operator in p with drift target s; its spectrum is
    0, -1, -2, ... and its kernel is the image of the slow-subspace projector.
    """
    _require_on_grid(phi, ctx)
    _boundary_check(phi, ctx)
    g = ctx.grid
    v = phi.values
    flux = g.p[None, :] * v
    flux += 1j * ctx.params.hbar * x_derivative(v, g)
    flux += ctx.kTm * p_derivative(v, g.hp, ctx.p_order)
    return WaveField(p_derivative(flux, g.hp, ctx.p_order), phi.grid, phi.t)


def rhs_modified_kk(phi: WaveField, ctx: OperatorContext) -> WaveField:
    """Full wave-field right-hand side A phi + gamma B phi."""
    out = apply_transport(phi, ctx)
    if ctx.gamma != 0.0:
        out.values += ctx.gamma * apply_dissipation(phi, ctx).values
    return out


# ---------------------------------------------------------------------------
# Classical density generators
# ---------------------------------------------------------------------------

def rhs_liouville(rho: DensityField, ctx: OperatorContext) -> DensityField:
    """{H, rho} = dH/dx drho/dp - dH/dp drho/dx."""
    _require_on_grid(rho, ctx)
    g = ctx.grid
    v = rho.values
    out = ctx.Vx[:, None] * p_derivative(v, g.hp, ctx.p_order)
    out -= ctx.dHdp[None, :] * x_derivative(v, g).real
    return DensityField(out, rho.grid, rho.t)


def rhs_classical_kk(f: DensityField, ctx: OperatorContext) -> DensityField:
    """Classical drift-diffusion right-hand side; gamma = 0 reduces exactly
    to :func:`rhs_liouville`."""
    out = rhs_liouville(f, ctx)
    if ctx.gamma != 0.0:
        g = ctx.grid
        flux = g.p[None, :] * f.values
        flux += ctx.kTm * p_derivative(f.values, g.hp, ctx.p_order)
        out.values += ctx.gamma * p_derivative(flux, g.hp, ctx.p_order)
    return out
