"""Thermal qubit and the three correlated two-qubit projectile families.

The projectile pair is locally thermal in every family; the coherence
parameter moves population-basis coherence either into the equal-energy
|ge>,|eg> block (discordant family) or into the |gg>,|ee> block (entangled
family) without disturbing the single-qubit Gibbs reductions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ProjectileKind",
    "Scenario",
    "QubitSpec",
    "BathParams",
    "gibbs_weights",
    "thermal_qubit",
    "projectile_state",
    "coherence_bounds",
]


class ProjectileKind(enum.Enum):
    CLASSICAL = "classical"
    DISCORDANT = "discordant"
    ENTANGLED = "entangled"
    PRODUCT = "product"


class Scenario(enum.Enum):
    SEQUENTIAL = "sequential"
    COLLECTIVE = "collective"


@dataclass(frozen=True)
class QubitSpec:
    """Two-level spectrum; all qubits in the model share it."""

    E_g: float = 1.0
    E_e: float = 2.0

    def __post_init__(self) -> None:
        if not self.E_e > self.E_g:
            raise ValueError(f"E_e must exceed E_g, got E_g={self.E_g}, E_e={self.E_e}")

    @property
    def splitting(self) -> float:
        return self.E_e - self.E_g


def gibbs_weights(beta: float, spec: QubitSpec) -> tuple[float, float]:
    """(p_g, p_e) of the Gibbs state at inverse temperature ``beta``.

    Evaluated through the level splitting only, so the ground weight stays
    accurate in the beta -> infinity limit.
    """
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    x = math.exp(-beta * (spec.E_e - spec.E_g))
    return 1.0 / (1.0 + x), x / (1.0 + x)


def thermal_qubit(beta: float, spec: QubitSpec = QubitSpec()) -> np.ndarray:
    """Diagonal Gibbs state of a single qubit."""
    p_g, p_e = gibbs_weights(beta, spec)
    return np.diag([p_g, p_e]).astype(complex)


def coherence_bounds(kind: ProjectileKind, beta_B: float, spec: QubitSpec = QubitSpec()) -> tuple[float, float]:
    """Admissible symmetric coherence interval for the given projectile family.

    Positivity bounds: |lambda| <= p_g p_e (discordant), |mu| <= sqrt(p_g p_e)
    (entangled). Classical and product projectiles carry no coherence.
    """
    p_g, p_e = gibbs_weights(beta_B, spec)
    if kind is ProjectileKind.DISCORDANT:
        b = p_g * p_e
    elif kind is ProjectileKind.ENTANGLED:
        b = math.sqrt(p_g * p_e)
    else:
        b = 0.0
    return (-b, b)


@dataclass(frozen=True)
class BathParams:
    """Full description of one projectile bath.

    ``coherence`` is lambda for the discordant family and mu for the entangled
    one; it is ignored (normalized to zero) for classical projectiles.
    ``PRODUCT`` is an alias for a discordant bath with lambda = 0 and is
    normalized on construction.
    """

    kind: ProjectileKind
    beta_B: float
    coherence: float = 0.0
    scenario: Scenario = Scenario.COLLECTIVE
    J: float = 1.0
    tau: float = 0.05
    rate_p: float = 1.0
    qubit: QubitSpec = field(default_factory=QubitSpec)

    def __post_init__(self) -> None:
        if self.beta_B <= 0:
            raise ValueError(f"beta_B must be positive, got {self.beta_B}")
        if self.tau < 0:
            raise ValueError(f"tau must be nonnegative, got {self.tau}")
        if self.rate_p < 0:
            raise ValueError(f"rate_p must be nonnegative, got {self.rate_p}")
        if self.kind in (ProjectileKind.CLASSICAL, ProjectileKind.PRODUCT):
            object.__setattr__(self, "coherence", 0.0)
        if self.kind is ProjectileKind.PRODUCT:
            object.__setattr__(self, "kind", ProjectileKind.DISCORDANT)
        lo, hi = coherence_bounds(self.kind, self.beta_B, self.qubit)
        if not lo <= self.coherence <= hi:
            name = "lambda" if self.kind is ProjectileKind.DISCORDANT else "mu"
            bound = "p_g*p_e" if self.kind is ProjectileKind.DISCORDANT else "sqrt(p_g*p_e)"
            raise ValueError(
                f"{name}={self.coherence} violates the positivity bound "
                f"|{name}| <= {bound} = {hi:.9g} at beta_B={self.beta_B}"
            )

    @property
    def j_tau(self) -> float:
        return self.J * self.tau

    def gibbs(self) -> tuple[float, float]:
        return gibbs_weights(self.beta_B, self.qubit)


def projectile_state(params: BathParams) -> np.ndarray:
    """4x4 state of one projectile pair (qubit order B1, B2)."""
    p_g, p_e = params.gibbs()
    c = params.coherence
    if params.kind is ProjectileKind.CLASSICAL:
        rho = np.diag([p_g, 0.0, 0.0, p_e]).astype(complex)
    elif params.kind is ProjectileKind.DISCORDANT:
        rho = np.diag([p_g * p_g, p_g * p_e, p_g * p_e, p_e * p_e]).astype(complex)
        rho[1, 2] += c
        rho[2, 1] += c
    elif params.kind is ProjectileKind.ENTANGLED:
        rho = np.diag([p_g, 0.0, 0.0, p_e]).astype(complex)
        rho[0, 3] += c
        rho[3, 0] += c
    else:  # pragma: no cover - PRODUCT is normalized away in __post_init__
        raise ValueError(f"unhandled projectile kind {params.kind}")
    return rho
