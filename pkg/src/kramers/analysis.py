"""Metrics and estimators that turn trajectories into verdicts.

Error norms, exponential decay-rate fitting, convergence-order estimation,
and the large-gamma scaling study that measures how fast the full dynamics
approaches the emergent Schrodinger dynamics (expected O(1/gamma)).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dfield
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .fields import l2_norm
from .grid import GridSpec
from .params import Params, Potential


@dataclass(frozen=True)
class MetricSeries:
    times: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValidationError("times and values must be 1-D arrays of equal length")
        if t.size >= 2 and not np.all(np.diff(t) > 0):
            raise ValidationError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class DecayFit:
    rate: float
    residual: float
    window: tuple


@dataclass(frozen=True)
class ScalingReport:
    abscissae: np.ndarray
    errors: np.ndarray
    exponent: float
    residual: float
    valid: tuple
    label: str = ""

    def __post_init__(self):
        a = np.asarray(self.abscissae, dtype=float)
        if a.size < 3:
            raise ValidationError("a scaling report needs at least 3 points")
        if np.any(a <= 0) or np.unique(a).size != a.size:
            raise ValidationError("abscissae must be positive and distinct")

    def as_dict(self) -> dict:
        return {
            "label": self.label,
            "abscissae": list(map(float, self.abscissae)),
            "errors": [float(e) for e in self.errors],
            "exponent": float(self.exponent),
            "residual": float(self.residual),
            "valid": list(self.valid),
        }


def field_error(a, b, norm: str = "relative_L2") -> float:
    """Norm of a - b on a shared grid; relative_L2 divides by ||b||."""
    if not a.grid.same_as(b.grid):
        raise ValidationError("fields live on different grids")
    diff = type(a)(a.values - b.values, a.grid, a.t)
    if norm == "Linf":
        return float(np.max(np.abs(diff.values)))
    err = l2_norm(diff)
    if norm == "L2":
        return err
    if norm == "relative_L2":
        ref = l2_norm(b)
        if ref == 0.0:
            raise ValidationError("relative norm undefined for a zero reference field")
        return err / ref
    raise ValidationError(f"unknown norm {norm!r}")


def fit_decay_rate(series: MetricSeries, window: tuple | None = None,
                   floor_factor: float = 100.0) -> DecayFit:
    """Least-squares slope of log(values) against time.

    With no explicit window, the fit uses only times where the value
    exceeds ``floor_factor`` times the series floor (late-time plateau),
    since the exponential law only holds above the discretization noise.
    """
    t = series.times
    v = series.values
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
    else:
        floor = max(float(np.min(v)), float(np.max(v)) * 1e-15, 0.0)
        mask = v > floor_factor * floor
        if np.count_nonzero(mask) < 2:
            mask = v > 0
    t, v = t[mask], v[mask]
    if t.size < 2:
        raise ValidationError("decay fit needs at least 2 points in the window")
    if np.any(v <= 0):
        raise ValidationError("decay fit requires positive values in the window")
    slope, intercept = np.polyfit(t, np.log(v), 1)
    resid = np.sqrt(np.mean((np.log(v) - (slope * t + intercept)) ** 2))
    return DecayFit(rate=-float(slope), residual=float(resid),
                    window=(float(t[0]), float(t[-1])))


def convergence_order(errors: Sequence[float], spacings: Sequence[float]) -> float:
    """Least-squares slope of log(error) vs log(spacing) over >= 3 levels."""
    e = np.asarray(errors, dtype=float)
    h = np.asarray(spacings, dtype=float)
    if e.size < 3 or h.size != e.size:
        raise ValidationError("convergence_order needs >= 3 matching levels")
    if np.any(h <= 0) or np.unique(h).size != h.size:
        raise ValidationError("spacings must be positive and distinct")
    if np.any(e <= 0):
        raise ValidationError("order undefined: zero or negative error values")
    slope, _ = np.polyfit(np.log(h), np.log(e), 1)
    return float(slope)


# ---------------------------------------------------------------------------
# Large-gamma slow-dynamics study
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlowDynamicsScenario:
    """Everything the gamma study needs; gamma itself is swept.

    ``characteristic_frequency`` sets the unit in which the swept gamma
    values are expressed (the oscillator frequency for a harmonic well).
    """

    params: Params
    grid_spec: GridSpec
    pot: Potential
    psi0_center: float
    psi0_width: float
    psi0_momentum: float = 0.0
    dt: float = 1e-3
    schrodinger_dt: float = 2e-4
    characteristic_frequency: float = 1.0


def gamma_scaling_study(scenario: SlowDynamicsScenario, gammas: Sequence[float],
                        t_check: float) -> ScalingReport:
    """Evolve the full equation from an embedded packet at each gamma and
    compare the extracted slow coordinate against the Schrodinger oracle.

    gammas are in units of the scenario's characteristic frequency and the
    fitted exponent of error vs gamma is expected near -1.
    """
    from .grid import make_grid
    from .integrate import StepPlan, evolve
    from .operators import OperatorContext
    from .oracles import schrodinger_evolve
    from .projection import ProjectionContext, embed_psi, extract_psi
    from .states import gaussian_psi
    from .errors import DivergenceError

    gam = np.asarray(gammas, dtype=float)
    if gam.size < 3:
        raise ValidationError("gamma study needs at least 3 gamma values")
    if np.any(gam <= 0) or np.unique(gam).size != gam.size:
        raise ValidationError("gamma values must be positive and distinct")

    base = scenario.params
    grid = make_grid(scenario.grid_spec, base.hbar)
    psi0 = gaussian_psi(grid, base, scenario.psi0_center, scenario.psi0_width,
                        scenario.psi0_momentum)
    psi_ref = schrodinger_evolve(psi0, base, scenario.pot, t_check, scenario.schrodinger_dt)

    errors = []
    valid = []
    for g_rel in gam:
        params_g = base.replace_gamma(float(g_rel) * scenario.characteristic_frequency)
        ctx = OperatorContext(params_g, scenario.pot, grid)
        pctx = ProjectionContext(params_g, grid)
        phi0 = embed_psi(psi0, pctx)
        plan = StepPlan(scheme="strang_exactB_rk4A", dt=scenario.dt, t_end=t_check,
                        snapshot_stride=10 ** 9, store_snapshots=False)
        try:
            traj = evolve(phi0, ctx, plan)
        except DivergenceError:
            errors.append(np.nan)
            valid.append(False)
            continue
        psi_sim = extract_psi(traj.final, pctx)
        errors.append(field_error(psi_sim, psi_ref, "relative_L2"))
        valid.append(True)

    errors = np.asarray(errors)
    ok = np.asarray(valid)
    if np.count_nonzero(ok) < 2:
        exponent, resid = np.nan, np.nan
    else:
        slope, intercept = np.polyfit(np.log(gam[ok]), np.log(errors[ok]), 1)
        resid = float(np.sqrt(np.mean(
            (np.log(errors[ok]) - (slope * np.log(gam[ok]) + intercept)) ** 2)))
        exponent = float(slope)
    return ScalingReport(abscissae=gam, errors=errors, exponent=exponent,
                         residual=resid, valid=tuple(valid), label="slow-dynamics error vs gamma")
