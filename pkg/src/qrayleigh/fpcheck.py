"""Heat-equation (Fokker-Planck) coefficients and their jump-moment cross-checks.

The truncated phase-space equation for the bombarded qubit is a heat equation
whose diffusion coefficients split additively into a thermal population part
and a coherent (alpha lambda) part.  This module evaluates those coefficients
in closed form and verifies them, at the level of the first two moments,
against the two-state jump process defined by the Lindblad rates: the
inversion-diffusion coefficient evaluated at m = +/-1 must equal the
Kramers-Moyal second coefficient 2 kappa of the corresponding state, and the
first moment must relax at the population decay rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import analytic_state, generator_apply, lindblad_rates, table_one_coefficients
from .states import BathParams, ProjectileKind, gibbs_weights

__all__ = [
    "FPCoefficients",
    "MomentConsistencyReport",
    "heat_equation_coefficients",
    "moment_consistency_check",
    "first_moment_solution",
]


@dataclass(frozen=True)
class FPCoefficients:
    """Closed-form heat-equation coefficients (Poisson factor included).

    ``d_inversion(m) = d_inversion_const + m * d_inversion_slope`` is the
    inversion-diffusion coefficient; ``d_polarization`` multiplies the mixed
    polarization derivative and ``drift_coupling`` the mixed m-polarization
    terms.  ``thermal_part`` / ``coherent_part`` record the additive split of
    each coefficient into its population and alpha-lambda pieces.
    """

    d_polarization: float
    drift_coupling: float
    d_inversion_const: float
    d_inversion_slope: float
    thermal_part: dict[str, float]
    coherent_part: dict[str, float]

    def d_inversion(self, m: float) -> float:
        return self.d_inversion_const + m * self.d_inversion_slope


def heat_equation_coefficients(params: BathParams) -> FPCoefficients:
    if params.kind is not ProjectileKind.DISCORDANT:
        raise ValueError(
            "heat-equation coefficients are derived for discordant (or product) projectiles"
        )
    p_g, p_e = params.gibbs()
    coef = table_one_coefficients(params)
    al = coef.alpha * params.coherence
    rate = params.rate_p * coef.eta_over_alpha
    thermal = {
        "d_polarization": p_e * rate,
        "drift_coupling": -2.0 * p_e * rate,
        "d_inversion_const": rate,
        "d_inversion_slope": (p_g - p_e) * rate,
    }
    coherent = {
        "d_polarization": al * rate,
        "drift_coupling": -2.0 * al * rate,
        "d_inversion_const": 2.0 * al * rate,
        "d_inversion_slope": 0.0,
    }
    return FPCoefficients(
        d_polarization=thermal["d_polarization"] + coherent["d_polarization"],
        drift_coupling=thermal["drift_coupling"] + coherent["drift_coupling"],
        d_inversion_const=thermal["d_inversion_const"] + coherent["d_inversion_const"],
        d_inversion_slope=thermal["d_inversion_slope"] + coherent["d_inversion_slope"],
        thermal_part=thermal,
        coherent_part=coherent,
    )


@dataclass(frozen=True)
class MomentConsistencyReport:
    """Residuals of the Fokker-Planck vs jump-process moment identities."""

    km_residual_excited: float
    km_residual_ground: float
    rate_sum_residual: float
    rate_difference_residual: float
    first_moment_residual: float
    relaxation_rate_residual: float

    @property
    def max_residual(self) -> float:
        return max(
            self.km_residual_excited,
            self.km_residual_ground,
            self.rate_sum_residual,
            self.rate_difference_residual,
            self.first_moment_residual,
            self.relaxation_rate_residual,
        )

    def passed(self, tol: float = 1e-12) -> bool:
        return self.max_residual <= tol


def moment_consistency_check(params: BathParams, times=None) -> MomentConsistencyReport:
    """Verify the heat-equation coefficients against the Lindblad jump process."""
    fp = heat_equation_coefficients(params)
    rates = lindblad_rates(params)
    k1, k2 = rates.kappa_1, rates.kappa_2

    km_e = abs(fp.d_inversion(+1.0) - 2.0 * k1)
    km_g = abs(fp.d_inversion(-1.0) - 2.0 * k2)
    r_sum = abs(fp.d_inversion_const - (k1 + k2))
    r_diff = abs(fp.d_inversion_slope - (k1 - k2))

    decay = table_one_coefficients(params).decay_rate
    relax = abs((k1 + k2) - decay)

    if times is None:
        ref = 1.0 / decay if decay > 0 else 1.0
        times = np.linspace(0.0, 3.0 * ref, 7)
    sz = np.diag([-1.0, 1.0]).astype(complex)
    beta_probe = 2.0 * params.beta_B  # start away from the steady state
    worst = 0.0
    for t in np.asarray(times, dtype=float):
        rho = analytic_state(t, beta_probe, params)
        m = float(np.trace(sz @ rho).real)
        dm_generator = float(np.trace(sz @ generator_apply(rho, [params])).real)
        dm_jump = (k2 - k1) - (k1 + k2) * m
        worst = max(worst, abs(dm_generator - dm_jump))
    return MomentConsistencyReport(
        km_residual_excited=km_e,
        km_residual_ground=km_g,
        rate_sum_residual=r_sum,
        rate_difference_residual=r_diff,
        first_moment_residual=worst,
        relaxation_rate_residual=relax,
    )


def first_moment_solution(t: float, beta_S0: float, params: BathParams) -> float:
    """Closed-form <m>(t) of the jump process (relaxes at kappa_1 + kappa_2)."""
    rates = lindblad_rates(params)
    k1, k2 = rates.kappa_1, rates.kappa_2
    m_inf = (k2 - k1) / (k1 + k2)
    q_g, q_e = gibbs_weights(beta_S0, params.qubit)
    m0 = q_e - q_g
    return m_inf + (m0 - m_inf) * math.exp(-(k1 + k2) * t)
