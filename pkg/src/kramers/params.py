"""Physical parameters, external potentials, and the Hamilton function.

Everything downstream draws its constants from a single ``Params`` record.
The action scale and the internal oscillation frequency are locked together
by ``hbar * omega = m * c**2``; exactly one of the two is supplied and the
other is derived.  Units are nondimensional: sensible defaults are m = 1,
k_B = 1, and hbar chosen directly by the user.

The Hamilton function comes in two flavours,

    exact_relativistic:  H = c * sqrt(m^2 c^2 + p^2) + V(x)
    quadratic:           H = m c^2 + p^2 / (2 m) + V(x)

selected by ``HamiltonianMode``.  The quadratic form is the one used by the
slow-dynamics (Schrodinger-limit) pipeline.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError, ValidationError


class HamiltonianMode(str, enum.Enum):
    QUADRATIC = "quadratic"
    EXACT = "exact_relativistic"


@dataclass(frozen=True)
class Params:
    """Immutable bundle of model constants.

    gamma = beta / m is the specific resistance of the medium; the
    large-gamma regime is quantum-like, gamma = 0 is classical transport.
    ``remove_rest_energy`` selects the gauge in which the uniform phase
    rotation exp(-i m c^2 t / hbar) has been factored out of the field;
    it never affects |phi|^2.
    """

    m: float
    c: float
    omega: float
    hbar: float
    beta: float
    gamma: float
    k_B: float
    T: float
    d: int = 1
    remove_rest_energy: bool = True

    @property
    def mc2(self) -> float:
        return self.m * self.c * self.c

    @property
    def kTm(self) -> float:
        """Thermal momentum variance k_B * T * m (diffusion strength)."""
        return self.k_B * self.T * self.m

    def replace_gamma(self, gamma: float) -> "Params":
        """Copy with a new specific resistance (beta kept consistent)."""
        if gamma < 0:
            raise ValidationError(f"gamma must be >= 0, got {gamma}")
        return Params(
            m=self.m, c=self.c, omega=self.omega, hbar=self.hbar,
            beta=gamma * self.m, gamma=gamma, k_B=self.k_B, T=self.T,
            d=self.d, remove_rest_energy=self.remove_rest_energy,
        )


def build_params(
    *,
    m: float = 1.0,
    c: float,
    omega: float | None = None,
    hbar: float | None = None,
    beta: float | None = None,
    gamma: float | None = None,
    k_B: float = 1.0,
    T: float,
    d: int = 1,
    remove_rest_energy: bool = True,
) -> Params:
    """Assemble a validated ``Params`` record.

    Exactly one of (omega, hbar) must be given; the other is derived from
    hbar = m c^2 / omega.  The drag may be given as beta or gamma = beta/m
    (both are accepted if consistent).
    """
    if (omega is None) == (hbar is None):
        raise ConfigError("exactly one of 'omega' or 'hbar' must be provided")
    if m <= 0:
        raise ValidationError(f"mass must be positive, got {m}")
    if c <= 0:
        raise ValidationError(f"light speed must be positive, got {c}")
    if T < 0:
        raise ValidationError(f"temperature must be >= 0, got {T}")
    if k_B <= 0:
        raise ValidationError(f"k_B must be positive, got {k_B}")
    if not (isinstance(d, int) and d >= 1):
        raise ValidationError(f"dimension d must be a positive integer, got {d!r}")

    mc2 = m * c * c
    if omega is None:
        if hbar <= 0:
            raise ValidationError(f"hbar must be positive, got {hbar}")
        omega = mc2 / hbar
    else:
        if omega <= 0:
            raise ValidationError(f"omega must be positive, got {omega}")
        hbar = mc2 / omega

    if beta is None and gamma is None:
        raise ConfigError("one of 'beta' or 'gamma' must be provided")
    if beta is None:
        beta = gamma * m
    elif gamma is None:
        gamma = beta / m
    elif not math.isclose(gamma, beta / m, rel_tol=1e-12, abs_tol=0.0):
        raise ConfigError(f"beta={beta} and gamma={gamma} disagree (gamma must equal beta/m)")
    if beta < 0:
        raise ValidationError(f"beta must be >= 0, got {beta}")

    return Params(
        m=m, c=c, omega=omega, hbar=hbar, beta=beta, gamma=gamma,
        k_B=k_B, T=T, d=d, remove_rest_energy=remove_rest_energy,
    )


# ---------------------------------------------------------------------------
# Potentials.  Each kind is a small frozen dataclass with analytic value()
# and grad(); no numerical differentiation of V anywhere in the package.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FreePotential:
    kind = "free"

    def value(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def grad(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class HarmonicPotential:
    """V = k (x - x0)^2 / 2."""

    k: float
    x0: float = 0.0

    kind = "harmonic"

    def __post_init__(self):
        if self.k < 0:
            raise ValidationError(f"harmonic stiffness must be >= 0, got {self.k}")

    def value(self, x):
        xi = np.asarray(x, dtype=float) - self.x0
        return 0.5 * self.k * xi * xi

    def grad(self, x):
        return self.k * (np.asarray(x, dtype=float) - self.x0)


@dataclass(frozen=True)
class DoubleWellPotential:
    """V = b ((x - x0)^2 - a^2)^2, minima at x0 +- a."""

    a: float
    b: float
    x0: float = 0.0

    kind = "double_well"

    def value(self, x):
        xi = np.asarray(x, dtype=float) - self.x0
        q = xi * xi - self.a * self.a
        return self.b * q * q

    def grad(self, x):
        xi = np.asarray(x, dtype=float) - self.x0
        return 4.0 * self.b * xi * (xi * xi - self.a * self.a)


@dataclass(frozen=True)
class PolynomialPotential:
    """V = sum_i coefficients[i] * (x - x0)^i."""

    coefficients: tuple
    x0: float = 0.0

    kind = "polynomial"

    def value(self, x):
        xi = np.asarray(x, dtype=float) - self.x0
        return np.polynomial.polynomial.polyval(xi, np.asarray(self.coefficients, dtype=float))

    def grad(self, x):
        xi = np.asarray(x, dtype=float) - self.x0
        dc = np.polynomial.polynomial.polyder(np.asarray(self.coefficients, dtype=float))
        return np.polynomial.polynomial.polyval(xi, dc)


Potential = Union[FreePotential, HarmonicPotential, DoubleWellPotential, PolynomialPotential]

_POTENTIAL_KINDS = {
    "free": FreePotential,
    "harmonic": HarmonicPotential,
    "double_well": DoubleWellPotential,
    "polynomial": PolynomialPotential,
}


def make_potential(kind: str, **kwargs) -> Potential:
    try:
        cls = _POTENTIAL_KINDS[kind]
    except KeyError:
        raise ValidationError(
            f"unknown potential kind {kind!r}; expected one of {sorted(_POTENTIAL_KINDS)}"
        ) from None
    if kind == "polynomial" and "coefficients" in kwargs:
        kwargs = dict(kwargs, coefficients=tuple(kwargs["coefficients"]))
    return cls(**kwargs)


# ---------------------------------------------------------------------------
# Hamilton function and its momentum gradient.
# ---------------------------------------------------------------------------

def eval_hamiltonian(params: Params, pot: Potential, x, p,
                     mode: HamiltonianMode = HamiltonianMode.QUADRATIC):
    """H(x, p); broadcasts x against p."""
    p = np.asarray(p, dtype=float)
    kinetic = _kinetic(params, p, mode)
    return kinetic + pot.value(x)


def _kinetic(params: Params, p, mode: HamiltonianMode):
    m, c = params.m, params.c
    if mode == HamiltonianMode.QUADRATIC:
        return params.mc2 + p * p / (2.0 * m)
    return c * np.sqrt(m * m * c * c + p * p)


def dH_dp(params: Params, p, mode: HamiltonianMode = HamiltonianMode.QUADRATIC):
    """Transport velocity dH/dp (independent of x for both modes)."""
    p = np.asarray(p, dtype=float)
    if mode == HamiltonianMode.QUADRATIC:
        return p / params.m
    m, c = params.m, params.c
    return p * c / np.sqrt(m * m * c * c + p * p)


def dH_dx(params: Params, pot: Potential, x, mode: HamiltonianMode = HamiltonianMode.QUADRATIC):
    """Force term dH/dx = dV/dx (kinetic part carries no x dependence)."""
    return pot.grad(x)
