"""Independent reference solutions used to cross-check the simulator.

None of these share discretization machinery with the production right-hand
sides beyond the grid itself:

* special-relativistic proper-time formulas (closed form),
* the free-streaming closed form for the transport generator at V = 0,
* a split-step spectral solver for the emergent coordinate-space
  Schrodinger equation  i hbar dpsi/dt = H psi,
    H = -hbar^2/(2m) d^2/dy^2 + V(y) + m c^2 - d k_B T / 2
  (the constant shifts are pure global phases and can be toggled),
* semi-Lagrangian transport along classical characteristics for the
  Liouville equation,
* analytic eigenmodes of the per-s Ornstein-Uhlenbeck dissipation operator.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import hermite_e
from scipy.ndimage import map_coordinates

from .errors import ConfigError, ExtrapolationWarning, ValidationError
from .fields import DensityField, PsiField, WaveField
from .operators import OperatorContext
from .params import FreePotential, HamiltonianMode, Params, Potential


# ---------------------------------------------------------------------------
# Special-relativistic kinematics
# ---------------------------------------------------------------------------

def energy_from_momentum(p, params: Params):
    """E = c sqrt(p^2 + m^2 c^2)."""
    p = np.asarray(p, dtype=float)
    m, c = params.m, params.c
    return c * np.sqrt(p * p + m * m * c * c)


def velocity_from_momentum(p, params: Params):
    """v = dE/dp = p c / sqrt(p^2 + m^2 c^2); always |v| < c."""
    p = np.asarray(p, dtype=float)
    m, c = params.m, params.c
    return p * c / np.sqrt(p * p + m * m * c * c)


def proper_time(t, x, v, params: Params):
    """tau = (t - x v / c^2) / sqrt(1 - v^2/c^2); requires |v| < c."""
    v = np.asarray(v, dtype=float)
    c = params.c
    if np.any(np.abs(v) >= c):
        raise ValidationError("proper_time requires |v| < c")
    return (t - x * v / (c * c)) / np.sqrt(1.0 - (v * v) / (c * c))


def proper_time_from_momentum(t, x, p, params: Params, potential_energy=None):
    """tau = (H t - x p) / (m c^2) with H = E(p) + V; V defaults to 0."""
    H = energy_from_momentum(p, params)
    if potential_energy is not None:
        H = H + potential_energy
    return (H * t - x * np.asarray(p, dtype=float)) / params.mc2


@dataclass(frozen=True)
class RelativisticState:
    """Kinematic record (t, x, p, v, E, tau) of a point particle."""

    t: float
    x: float
    p: float
    v: float
    E: float
    tau: float

    @classmethod
    def from_momentum(cls, t, x, p, params: Params) -> "RelativisticState":
        E = float(energy_from_momentum(p, params))
        v = float(velocity_from_momentum(p, params))
        tau = float(proper_time_from_momentum(t, x, p, params))
        return cls(t=t, x=x, p=p, v=v, E=E, tau=tau)

    @classmethod
    def from_velocity(cls, t, x, v, params: Params) -> "RelativisticState":
        c = params.c
        if abs(v) >= c:
            raise ValidationError("RelativisticState requires |v| < c")
        gamma_l = 1.0 / math.sqrt(1.0 - (v / c) ** 2)
        p = params.m * v * gamma_l
        E = float(energy_from_momentum(p, params))
        tau = float(proper_time(t, x, v, params))
        return cls(t=t, x=x, p=p, v=v, E=E, tau=tau)


# ---------------------------------------------------------------------------
# Free-streaming closed form (transport generator, V = 0, quadratic H)
# ---------------------------------------------------------------------------

def free_phase(phi0: WaveField, ctx: OperatorContext, t: float) -> WaveField:
    """Closed-form evolution at V = 0:

        phi(x, p, t) = phi0(x - p t / m, p) * exp(i (p^2/(2m) - mc^2) t / hbar)

    (m c^2 dropped under the rest-energy gauge).  The x shift is evaluated
    spectrally, exact for periodic band-limited data.
    """
    if not isinstance(ctx.pot, FreePotential):
        raise ConfigError("free_phase requires the free potential")
    if ctx.mode != HamiltonianMode.QUADRATIC:
        raise ConfigError("free_phase is defined for the quadratic Hamiltonian")
    g = ctx.grid
    params = ctx.params
    shift = g.p * (t / params.m)                      # per-p-row displacement
    spec = np.fft.fft(phi0.values, axis=0)
    spec *= np.exp(-1j * g.kx[:, None] * shift[None, :])
    out = np.fft.ifft(spec, axis=0)
    rest = 0.0 if params.remove_rest_energy else params.mc2
    out *= np.exp(1j * (g.p ** 2 / (2.0 * params.m) - rest) * t / params.hbar)[None, :]
    return WaveField(out, phi0.grid, phi0.t + t)


# ---------------------------------------------------------------------------
# Slow-manifold Schrodinger solver (split-step spectral)
# ---------------------------------------------------------------------------

def _effective_potential(params: Params, pot: Potential, x,
                         include_rest_energy: bool | None,
                         include_thermal_shift: bool):
    V = pot.value(x)
    if include_rest_energy is None:
        include_rest_energy = not params.remove_rest_energy
    if include_rest_energy:
        V = V + params.mc2
    if include_thermal_shift:
        V = V - 0.5 * params.d * params.k_B * params.T
    return V


def schrodinger_rhs(psi: PsiField, params: Params, pot: Potential,
                    include_rest_energy: bool | None = None,
                    include_thermal_shift: bool = True) -> PsiField:
    """dpsi/dt = -(i/hbar) H psi with the constant shifts as configured."""
    g = psi.grid
    V = _effective_potential(params, pot, g.x, include_rest_energy, include_thermal_shift)
    lap = np.fft.ifft(-(g.kx ** 2) * np.fft.fft(psi.values))
    H_psi = -(params.hbar ** 2 / (2.0 * params.m)) * lap + V * psi.values
    return PsiField(-1j / params.hbar * H_psi, g, psi.t)


def schrodinger_evolve(psi0: PsiField, params: Params, pot: Potential,
                       t_end: float, dt: float,
                       include_rest_energy: bool | None = None,
                       include_thermal_shift: bool = True) -> PsiField:
    """Split-step spectral evolution (Strang: half V, full kinetic, half V).

    Steps are exactly unitary; dt controls splitting accuracy only.  The
    actual step is t_end / round(t_end/dt) so the integration lands exactly
    on t_end.
    """
    if dt <= 0:
        raise ValidationError(f"dt must be positive, got {dt}")
    g = psi0.grid
    if t_end == 0.0:
        return psi0.copy()
    n = max(1, round(abs(t_end) / dt))
    step = t_end / n
    V = _effective_potential(params, pot, g.x, include_rest_energy, include_thermal_shift)
    exp_v_half = np.exp(-0.5j * step / params.hbar * V)
    exp_kin = np.exp(-0.5j * params.hbar * step / params.m * g.kx ** 2)
    v = psi0.values.copy()
    for _ in range(n):
        v *= exp_v_half
        v = np.fft.ifft(exp_kin * np.fft.fft(v))
        v *= exp_v_half
    return PsiField(v, g, psi0.t + t_end)


# ---------------------------------------------------------------------------
# Semi-Lagrangian Liouville transport
# ---------------------------------------------------------------------------

def liouville_transport(rho0: DensityField, ctx: OperatorContext, t: float,
                        substep: float = 1e-3) -> DensityField:
    """rho(z, t) = rho0(flow_{-t}(z)) by node backtracing.

    Characteristics are integrated with leapfrog (kick-drift-kick) at the
    fine internal step ``substep``; rho0 is evaluated by cubic-spline
    interpolation, periodic in x, zero beyond the p edges.
    """
    if ctx.mode != HamiltonianMode.QUADRATIC:
        raise ConfigError("liouville_transport backtraces the quadratic-H flow")
    g = ctx.grid
    m = ctx.params.m
    X, P = np.meshgrid(g.x, g.p, indexing="ij")
    n = max(1, math.ceil(abs(t) / substep))
    dtau = -t / n
    X = X.copy()
    P = P.copy()
    for _ in range(n):
        P -= 0.5 * dtau * ctx.pot.grad(X)
        X += dtau * P / m
        P -= 0.5 * dtau * ctx.pot.grad(X)

    pad = 4
    padded = np.concatenate(
        [rho0.values[-pad:, :], rho0.values, rho0.values[:pad, :]], axis=0)
    xi = (X % g.spec.Lx) / g.hx + pad
    pj = (P - g.p[0]) / g.hp
    outside = (pj < 0) | (pj > g.spec.Np - 1)
    if np.any(outside):
        edge = max(np.max(np.abs(rho0.values[:, 0])), np.max(np.abs(rho0.values[:, -1])))
        peak = np.max(np.abs(rho0.values))
        if peak > 0 and edge / peak > 1e-8:
            warnings.warn(
                "characteristics left the p domain where the density is "
                "non-negligible; transported values there are extrapolated as 0",
                ExtrapolationWarning, stacklevel=2)
    out = map_coordinates(padded, [xi, pj], order=3, mode="constant", cval=0.0)
    return DensityField(out, rho0.grid, rho0.t + t)


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck eigenmodes of the dissipation operator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OUMode:
    """Analytic eigenmode of the per-s dissipation operator.

    profile(p) = He_n((p - s)/sqrt(kTm)) * exp(-(p - s)^2 / (2 kTm)),
    eigenvalue -n for the bare generator (-n gamma once scaled by gamma).
    """

    n: int
    s: float
    values: np.ndarray
    eigenvalue: float


def ou_mode(n: int, s: float, ctx: OperatorContext) -> OUMode:
    if n < 0 or int(n) != n:
        raise ValidationError(f"mode index must be a nonnegative integer, got {n}")
    if ctx.params.T <= 0:
        raise ValidationError("OU modes require T > 0")
    g = ctx.grid
    idx = round((s - g.s[0]) / g.ds)
    if not (0 <= idx < g.spec.Nx) or abs(g.s[idx] - s) > 1e-9 * max(1.0, abs(s)):
        raise ValidationError(
            f"drift target s={s} is not on the x-wavenumber lattice (spacing {g.ds:g})")
    D = ctx.kTm
    u = (g.p - s) / math.sqrt(D)
    coeffs = np.zeros(int(n) + 1)
    coeffs[-1] = 1.0
    profile = hermite_e.hermeval(u, coeffs) * np.exp(-u * u / 2.0)
    return OUMode(n=int(n), s=float(s), values=profile.astype(np.complex128),
                  eigenvalue=-float(n))


def ou_mode_field(n: int, s: float, ctx: OperatorContext) -> WaveField:
    """The eigenmode embedded in phase space: e^{i s x / hbar} * profile(p)."""
    mode = ou_mode(n, s, ctx)
    g = ctx.grid
    carrier = np.exp(1j * s * g.x / ctx.params.hbar)
    return WaveField(carrier[:, None] * mode.values[None, :], g, 0.0)
