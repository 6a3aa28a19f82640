"""Time stepping: explicit RK4, the exact dissipative substep, and Strang
composition.

Two schemes:

    rk4_full          classical RK4 on the full right-hand side A + gamma B;
                      requires dt <= stable_dt (hard error, overridable).
    strang_exactB_rk4A
                      per step: half an exact dissipative substep, one RK4
                      step on the transport generator alone, half an exact
                      dissipative substep.  The dissipative flow is solved
                      exactly, so the step count is set by the transport
                      scale, not by gamma; this is what makes the stiff
                      large-gamma regime affordable.

Exact dissipative substep.  After the hbar-scaled x transform the
dissipative generator acts per s-column as an Ornstein-Uhlenbeck
drift-diffusion operator in p with drift target s.  Its exact flow over a
time dt is a coordinate contraction toward s followed by a Gaussian blur:

    u_out(p) = integral  N(p; s + (p0 - s) e^{-g dt}, D (1 - e^{-2 g dt}))  u_in(p0) dp0

(g = gamma, D = k_B T m).  In the p-Fourier variable this is

    u_out^(w) = exp(-sigma^2 w^2 / 2) * exp(-i w (1-lam) s) * u_in^(lam w),
    lam = e^{-g dt},  sigma^2 = D (1 - lam^2),

so one step costs a scaled-frequency DFT (chirp-z transform), a diagonal
multiply, and an inverse FFT -- all spectrally accurate for fields that are
negligible at the p edges.  The w = 0 bin is preserved exactly, so the
p-integral of every s-column is conserved to machine precision and the
semigroup property holds to spectral accuracy.  The t -> infinity limit of
the step map is precisely the slow-subspace projector.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dfield
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.signal import czt

from .errors import DivergenceError, ValidationError
from .fields import SpectralField, WaveField, l2_norm, x_fourier, x_fourier_inverse
from .operators import OperatorContext, apply_transport, rhs_modified_kk

SCHEMES = ("rk4_full", "strang_exactB_rk4A")


@dataclass(frozen=True)
class StepPlan:
    scheme: str
    dt: float
    t_end: float
    snapshot_stride: int = 1
    store_snapshots: bool = True
    allow_unstable: bool = False

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValidationError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.dt <= 0:
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValidationError(f"t_end must be >= 0, got {self.t_end}")
        if self.snapshot_stride < 1:
            raise ValidationError("snapshot_stride must be >= 1")

    @property
    def n_steps(self) -> int:
        return max(1, round(self.t_end / self.dt)) if self.t_end > 0 else 0


@dataclass(frozen=True)
class StableDt:
    dt: float
    binding: str
    bounds: dict


def stable_dt(ctx: OperatorContext) -> StableDt:
    """Explicit-stability/accuracy heuristic for rk4_full.

    Minimum of a transport CFL bound, an explicit-diffusion bound, and a
    phase-accuracy bound (0.1 rad per step at the largest local energy,
    rest energy excluded under the gauge flag).
    """
    g = ctx.grid
    vmax = float(np.max(np.abs(ctx.dHdp)))
    bounds = {
        "cfl_transport": g.hx / vmax if vmax > 0 else math.inf,
        "p_diffusion": g.hp ** 2 / (2.0 * ctx.gamma * ctx.kTm) if ctx.gamma * ctx.kTm > 0 else math.inf,
        "phase_rotation": 0.1 * ctx.params.hbar / float(np.max(np.abs(ctx.H_phase)))
        if np.max(np.abs(ctx.H_phase)) > 0 else math.inf,
    }
    binding = min(bounds, key=bounds.get)
    return StableDt(dt=bounds[binding], binding=binding, bounds=bounds)


def step_rk4(phi: WaveField, rhs: Callable[[WaveField], WaveField], dt: float) -> WaveField:
    """One classical RK4 step; raises DivergenceError naming the first
    non-finite stage."""
    y = phi.values
    k1 = rhs(phi).values
    _finite_or_raise(k1, "k1")
    k2 = rhs(WaveField(y + (0.5 * dt) * k1, phi.grid, phi.t + 0.5 * dt)).values
    _finite_or_raise(k2, "k2")
    k3 = rhs(WaveField(y + (0.5 * dt) * k2, phi.grid, phi.t + 0.5 * dt)).values
    _finite_or_raise(k3, "k3")
    k4 = rhs(WaveField(y + dt * k3, phi.grid, phi.t + dt)).values
    _finite_or_raise(k4, "k4")
    out = y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return WaveField(out, phi.grid, phi.t + dt)


def _finite_or_raise(arr: np.ndarray, stage: str):
    if not np.all(np.isfinite(arr)):
        raise DivergenceError(f"non-finite values in RK4 stage {stage}", stage=stage)


class ExactBPropagator:
    """Exact flow of gamma * B over a fixed dt (see module docstring).

    gamma = 0 or dt = 0 is the identity (returned bit-exactly).  T = 0 is
    the pure-contraction limit (no blur).  Instances precompute the chirp-z
    parameters and the diagonal multiplier; they are reusable and cheap to
    apply repeatedly with the same dt.
    """

    def __init__(self, ctx: OperatorContext, dt: float):
        if dt < 0:
            raise ValidationError(f"dt must be >= 0, got {dt}")
        self.ctx = ctx
        self.dt = dt
        self.identity = (ctx.gamma == 0.0) or (dt == 0.0)
        if self.identity:
            return
        g = ctx.grid
        Np = g.spec.Np
        lam = math.exp(-ctx.gamma * dt)
        sigma2 = ctx.kTm * (1.0 - lam * lam)
        self.lam = lam
        # scaled-frequency DFT: sum_j u_j exp(-2i pi lam (k - Np/2) j / Np)
        self._czt_w = np.exp(-2j * np.pi * lam / Np)
        self._czt_a = np.exp(-1j * np.pi * lam)
        omega = 2.0 * np.pi * np.fft.fftfreq(Np, d=g.hp)      # fft order
        shift = (1.0 - lam) * (g.s[:, None] - g.p[0])
        self._mult = np.exp(-0.5 * sigma2 * omega[None, :] ** 2
                            - 1j * shift * omega[None, :])

    def __call__(self, phi: WaveField) -> WaveField:
        if self.identity:
            return WaveField(phi.values.copy(), phi.grid, phi.t + self.dt)
        spec = x_fourier(phi)
        u = czt(spec.values, m=self.ctx.grid.spec.Np, w=self._czt_w, a=self._czt_a, axis=1)
        u = np.fft.ifftshift(u, axes=1)
        u *= self._mult
        u = np.fft.ifft(u, axis=1)
        out = x_fourier_inverse(SpectralField(u, phi.grid, phi.t + self.dt))
        return out


def exact_b_propagator(phi: WaveField, ctx: OperatorContext, dt: float) -> WaveField:
    """One-shot convenience wrapper around :class:`ExactBPropagator`."""
    return ExactBPropagator(ctx, dt)(phi)


@dataclass
class Trajectory:
    times: list
    snapshots: list
    metrics: dict
    final: WaveField = None
    diverged: bool = False


Observer = Callable[[float, WaveField], Mapping[str, float] | None]


def evolve(phi0: WaveField, ctx: OperatorContext, plan: StepPlan,
           observers: Sequence[Observer] = ()) -> Trajectory:
    """March the wave field to plan.t_end, recording snapshots and metrics.

    Observers are called on the stepping thread at snapshot strides (and at
    t = 0 and the final step) with (t, phi); any mapping they return is
    appended to named metric lists.  Deterministic for identical inputs.
    Aborts with DivergenceError (carrying the partial trajectory) if the
    norm grows by more than 1e3 or turns non-finite.
    """
    if plan.scheme == "rk4_full" and not plan.allow_unstable:
        limit = stable_dt(ctx)
        if plan.dt > limit.dt * (1.0 + 1e-12):
            raise ValidationError(
                f"dt={plan.dt:g} exceeds stable_dt={limit.dt:g} "
                f"(binding constraint: {limit.binding}); "
                "set allow_unstable=True to override")

    n = plan.n_steps
    if n and abs(n * plan.dt - plan.t_end) > 1e-9 * max(1.0, abs(plan.t_end)):
        warnings.warn(
            f"t_end={plan.t_end:g} is not a multiple of dt={plan.dt:g}; "
            f"integrating to {n * plan.dt:g}", stacklevel=2)

    traj = Trajectory(times=[], snapshots=[], metrics={})
    norm0 = l2_norm(phi0)

    def record(t, f):
        traj.times.append(t)
        if plan.store_snapshots:
            traj.snapshots.append(f.copy())
        for obs in observers:
            res = obs(t, f)
            if res:
                for key, val in res.items():
                    traj.metrics.setdefault(key, []).append(val)

    phi = phi0.copy()
    record(phi.t, phi)

    if plan.scheme == "strang_exactB_rk4A":
        # Adjacent half-substeps between recording points are merged into a
        # single full substep (exact semigroup), halving the substep count.
        half_b = ExactBPropagator(ctx, 0.5 * plan.dt)
        full_b = ExactBPropagator(ctx, plan.dt)
        rhs = lambda f: apply_transport(f, ctx)
    else:
        half_b = full_b = None
        rhs = lambda f: rhs_modified_kk(f, ctx)

    t0 = phi.t
    pending_half = True
    for i in range(1, n + 1):
        record_due = (i % plan.snapshot_stride == 0) or (i == n)
        try:
            if half_b is not None:
                if pending_half:
                    phi = half_b(phi)
                phi = step_rk4(phi, rhs, plan.dt)
                if record_due:
                    phi = half_b(phi)
                    pending_half = True
                else:
                    phi = full_b(phi)
                    pending_half = False
            else:
                phi = step_rk4(phi, rhs, plan.dt)
        except DivergenceError as err:
            traj.diverged = True
            err.trajectory = traj
            raise
        phi.t = t0 + i * plan.dt  # avoid accumulated addition error
        nrm = l2_norm(phi)
        if not math.isfinite(nrm) or (norm0 > 0 and nrm > 1e3 * norm0):
            traj.diverged = True
            raise DivergenceError(
                f"norm grew to {nrm:.3e} (initial {norm0:.3e}) at t={phi.t:g}",
                trajectory=traj)
        if record_due:
            record(phi.t, phi)

    traj.final = phi
    return traj
