"""Run configuration: strict JSON schema, presets, and resolution.

Configs are strict JSON documents (no comments); unknown keys are rejected
so that a config is always a complete, unambiguous description of a run.
``resolve_config`` turns a validated document into live objects (params,
grid, potential, operator context, plan, initial state).
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema

from .errors import ConfigError, ValidationError
from .fields import WaveField
from .grid import Grid, GridSpec, make_grid, recommended_pmax
from .integrate import StepPlan, stable_dt
from .operators import OperatorContext
from .params import HamiltonianMode, Params, Potential, build_params, make_potential
from .projection import ProjectionContext
from .snapshot import read_snapshot
from .states import embedded_gaussian, random_smooth_field

SCENARIOS = ("relaxation", "schrodinger_limit", "liouville_limit",
             "free_phase_check", "custom")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["params", "grid", "potential", "scenario", "initial_state", "plan"],
    "properties": {
        "params": {
            "type": "object",
            "additionalProperties": False,
            "required": ["c", "T"],
            "properties": {
                "m": _POS, "c": _POS, "omega": _POS, "hbar": _POS,
                "beta": {"type": "number", "minimum": 0},
                "gamma": {"type": "number", "minimum": 0},
                "k_B": _POS, "T": {"type": "number", "minimum": 0},
                "d": {"type": "integer", "minimum": 1},
                "remove_rest_energy": {"type": "boolean"},
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["Lx", "Nx", "Pmax", "Np"],
            "properties": {
                "Lx": _POS, "Nx": {"type": "integer", "minimum": 8},
                "Pmax": _POS, "Np": {"type": "integer", "minimum": 8},
            },
        },
        "potential": {
            "type": "object",
            "required": ["kind"],
            "oneOf": [
                {
                    "properties": {"kind": {"const": "free"}},
                    "required": ["kind"], "additionalProperties": False,
                },
                {
                    "properties": {"kind": {"const": "harmonic"},
                                   "k": {"type": "number", "minimum": 0}, "x0": _NUM},
                    "required": ["kind", "k"], "additionalProperties": False,
                },
                {
                    "properties": {"kind": {"const": "double_well"},
                                   "a": _POS, "b": _NUM, "x0": _NUM},
                    "required": ["kind", "a", "b"], "additionalProperties": False,
                },
                {
                    "properties": {"kind": {"const": "polynomial"},
                                   "coefficients": {"type": "array", "items": _NUM,
                                                    "minItems": 1},
                                   "x0": _NUM},
                    "required": ["kind", "coefficients"], "additionalProperties": False,
                },
            ],
        },
        "hamiltonian_mode": {"enum": ["quadratic", "exact_relativistic"]},
        "scenario": {"enum": list(SCENARIOS)},
        "initial_state": {
            "type": "object",
            "required": ["type"],
            "oneOf": [
                {
                    "properties": {"type": {"const": "embedded_gaussian"},
                                   "center": _NUM, "width": _POS, "momentum": _NUM},
                    "required": ["type", "center", "width"],
                    "additionalProperties": False,
                },
                {
                    "properties": {"type": {"const": "random_smooth"},
                                   "seed": {"type": "integer", "minimum": 0},
                                   "cutoff_x": {"type": "integer", "minimum": 1},
                                   "cutoff_p": {"type": "integer", "minimum": 1},
                                   "p_width": _POS},
                    "required": ["type", "seed"],
                    "additionalProperties": False,
                },
                {
                    "properties": {"type": {"const": "file"}, "path": {"type": "string"}},
                    "required": ["type", "path"],
                    "additionalProperties": False,
                },
            ],
        },
        "plan": {
            "type": "object",
            "additionalProperties": False,
            "required": ["scheme", "t_end"],
            "properties": {
                "scheme": {"enum": ["rk4_full", "strang_exactB_rk4A"]},
                "dt": _POS,
                "t_end": {"type": "number", "minimum": 0},
                "snapshot_stride": {"type": "integer", "minimum": 1},
                "allow_unstable": {"type": "boolean"},
            },
        },
        "scenario_options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "gammas": {"type": "array", "items": _POS, "minItems": 1},
                "t_check": _POS,
                "oracle_substep": _POS,
                "schrodinger_dt": _POS,
            },
        },
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "directory": {"type": "string"},
                "snapshots": {"type": "boolean"},
                "metrics": {"type": "boolean"},
            },
        },
    },
}


def validate_config(doc: dict) -> dict:
    """Schema-validate; raises ConfigError naming the offending location."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        msgs = []
        for e in errors[:5]:
            loc = "/".join(str(p) for p in e.absolute_path) or "<root>"
            msgs.append(f"{loc}: {e.message}")
        raise ConfigError("invalid config: " + "; ".join(msgs))
    return doc


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
    return validate_config(doc)


@dataclass
class RunSetup:
    config: dict
    params: Params
    grid: Grid
    pot: Potential
    mode: HamiltonianMode
    ctx: OperatorContext
    plan: StepPlan
    phi0: WaveField
    scenario: str
    scenario_options: dict
    outputs: dict

    def projection_context(self) -> ProjectionContext:
        return ProjectionContext(self.params, self.grid)


def resolve_config(doc: dict, seed_override: int | None = None) -> RunSetup:
    """Build live objects from a validated config document.

    Returns a RunSetup whose ``config`` field is the fully resolved document
    (all derived quantities filled in), suitable for byte-identical reruns.
    """
    doc = validate_config(copy.deepcopy(doc))
    params = build_params(**doc["params"])
    gspec = GridSpec(d=params.d, **doc["grid"])
    grid = make_grid(gspec, params.hbar)
    pot = make_potential(**doc["potential"])
    mode = HamiltonianMode(doc.get("hamiltonian_mode", "quadratic"))
    ctx = OperatorContext(params, pot, grid, mode=mode)

    init = dict(doc["initial_state"])
    if seed_override is not None and init["type"] == "random_smooth":
        init["seed"] = int(seed_override)
    phi0 = _build_initial_state(init, params, grid)

    plan_doc = dict(doc["plan"])
    if "dt" not in plan_doc:
        plan_doc["dt"] = 0.5 * stable_dt(ctx).dt
    plan = StepPlan(**plan_doc)

    resolved = copy.deepcopy(doc)
    resolved["params"] = {
        "m": params.m, "c": params.c, "omega": params.omega, "hbar": params.hbar,
        "beta": params.beta, "gamma": params.gamma, "k_B": params.k_B, "T": params.T,
        "d": params.d, "remove_rest_energy": params.remove_rest_energy,
    }
    resolved["initial_state"] = init
    resolved["plan"] = {
        "scheme": plan.scheme, "dt": plan.dt, "t_end": plan.t_end,
        "snapshot_stride": plan.snapshot_stride, "allow_unstable": plan.allow_unstable,
    }

    return RunSetup(
        config=resolved, params=params, grid=grid, pot=pot, mode=mode, ctx=ctx,
        plan=plan, phi0=phi0, scenario=doc["scenario"],
        scenario_options=doc.get("scenario_options", {}),
        outputs={"snapshots": True, "metrics": True, **doc.get("outputs", {})},
    )


def _build_initial_state(init: dict, params: Params, grid: Grid) -> WaveField:
    kind = init["type"]
    if kind == "embedded_gaussian":
        pctx = ProjectionContext(params, grid)
        return embedded_gaussian(pctx, init["center"], init["width"],
                                 init.get("momentum", 0.0))
    if kind == "random_smooth":
        return random_smooth_field(
            grid, params, seed=init["seed"],
            cutoff_x=init.get("cutoff_x", 8), cutoff_p=init.get("cutoff_p", 6),
            p_width=init.get("p_width"))
    if kind == "file":
        phi = read_snapshot(init["path"])
        if not phi.grid.same_as(grid):
            raise ConfigError("snapshot grid does not match the configured grid")
        return phi
    raise ConfigError(f"unknown initial state type {kind!r}")


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

def preset(name: str, **overrides) -> dict:
    """Bundled scenario configs: 'harmonic', 'free', 'double_well'.

    Grids are sized so the momentum window holds the occupied wavenumber
    band plus eight thermal widths.
    """
    if name == "harmonic":
        doc = {
            "params": {"m": 1.0, "c": 30.0, "hbar": 1.0, "gamma": 5.0,
                       "k_B": 1.0, "T": 1.0},
            "grid": {"Lx": 16.0, "Nx": 256, "Pmax": 12.0, "Np": 256},
            "potential": {"kind": "harmonic", "k": 1.0, "x0": 8.0},
            "scenario": "custom",
            "initial_state": {"type": "embedded_gaussian", "center": 9.0,
                              "width": 0.7071067811865476, "momentum": 0.0},
            "plan": {"scheme": "strang_exactB_rk4A", "dt": 1e-3,
                     "t_end": 6.283185307179586, "snapshot_stride": 500},
        }
    elif name == "free":
        doc = {
            "params": {"m": 1.0, "c": 30.0, "hbar": 1.0, "gamma": 0.0,
                       "k_B": 1.0, "T": 1.0},
            "grid": {"Lx": 16.0, "Nx": 256, "Pmax": 12.0, "Np": 256},
            "potential": {"kind": "free"},
            "scenario": "free_phase_check",
            "initial_state": {"type": "random_smooth", "seed": 7,
                              "cutoff_x": 8, "cutoff_p": 6},
            "plan": {"scheme": "rk4_full", "dt": 1e-3, "t_end": 1.0,
                     "snapshot_stride": 200},
        }
    elif name == "double_well":
        doc = {
            "params": {"m": 1.0, "c": 30.0, "hbar": 1.0, "gamma": 5.0,
                       "k_B": 1.0, "T": 1.0},
            "grid": {"Lx": 16.0, "Nx": 256, "Pmax": 12.0, "Np": 256},
            "potential": {"kind": "double_well", "a": 2.0, "b": 0.01, "x0": 8.0},
            "scenario": "custom",
            "initial_state": {"type": "embedded_gaussian", "center": 10.0,
                              "width": 0.7071067811865476, "momentum": 0.0},
            "plan": {"scheme": "strang_exactB_rk4A", "dt": 1e-3, "t_end": 2.0,
                     "snapshot_stride": 200},
        }
    else:
        raise ConfigError(f"unknown preset {name!r}; available: harmonic, free, double_well")
    doc = _deep_update(doc, overrides)
    return validate_config(doc)


def _deep_update(base: dict, upd: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in upd.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_update(out[k], v)
        else:
            out[k] = v
    return out


def pmax_rule_report(setup: RunSetup) -> dict:
    """Startup sizing check: Pmax >= (occupied |s| of the initial state)
    + 8 sqrt(kTm), estimated from the initial field's spectrum."""
    import numpy as np
    from .fields import x_fourier

    spec = x_fourier(setup.phi0)
    power = (np.abs(spec.values) ** 2) @ setup.grid.p_weights()
    total = power.sum()
    if total == 0:
        s_occ = 0.0
    else:
        # occupied band: smallest |s| radius containing 99.999% of the power
        order = np.argsort(np.abs(setup.grid.s))
        cum_by_radius = np.cumsum(power[order])
        idx = np.searchsorted(cum_by_radius, 0.99999 * total)
        idx = min(idx, len(order) - 1)
        s_occ = float(np.abs(setup.grid.s[order[idx]]))
    required = recommended_pmax(s_occ, setup.params.kTm)
    return {
        "s_occupied": s_occ,
        "required_pmax": required,
        "pmax": setup.grid.spec.Pmax,
        "satisfied": bool(setup.grid.spec.Pmax >= required),
    }
