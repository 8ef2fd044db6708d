"""Temperatures, heat and coherence currents, entropy production, Onsager coefficients.

Sign conventions, centralized here:

* positive heat current = heat flowing from the projectile bath into the qubit;
* coherence-potential differences: ``delta_C = -2 alpha lambda`` for the
  transient single-bath setting (bath coherence against the qubit's zero) and
  ``delta_C = 2 alpha (lambda' - lambda)`` between two baths;
* the coherence current carries the opposite sign to the heat current:
  -J_c = L_ch * delta_beta - L_cc * beta * delta_C.

The linear (Onsager) forms are a high-temperature description; they are
guarded by ``beta * (E_e - E_g) <= 0.1`` with an explicit override.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import analytic_state, generator_apply, lindblad_rates, table_one_coefficients
from .states import BathParams, ProjectileKind, QubitSpec, gibbs_weights

__all__ = [
    "CurrentRecord",
    "OnsagerMatrix",
    "NumericOnsagerResult",
    "TwoBathSteady",
    "UndefinedTemperatureError",
    "UnsupportedConfigurationError",
    "HIGH_T_THRESHOLD",
    "temperature_of",
    "steady_temperature",
    "heat_current",
    "anomalous_heat_current",
    "entropy_production",
    "delta_c_transient",
    "delta_c_two_bath",
    "coherence_current",
    "coherence_current_two_bath",
    "onsager_coefficients",
    "extract_onsager_numeric",
    "two_bath_steady",
    "generator_heat_current",
]

HIGH_T_THRESHOLD = 0.1


class UndefinedTemperatureError(ValueError):
    """A population vanished; no empirical temperature can be assigned."""


class UnsupportedConfigurationError(ValueError):
    """The requested multi-bath configuration is outside the modeled family."""


def temperature_of(rho_S: np.ndarray, spec: QubitSpec = QubitSpec()) -> float:
    """Empirical temperature of a diagonal two-level state.

    Inverse of ``thermal_qubit``; equal populations return ``inf``.
    """
    r = np.asarray(rho_S, dtype=complex)
    if r.shape != (2, 2) or abs(r[0, 1]) > 1e-12 or abs(r[1, 0]) > 1e-12:
        raise ValueError("temperature is defined for diagonal two-level states")
    p_g = r[0, 0].real
    p_e = r[1, 1].real
    if p_g <= 0.0 or p_e <= 0.0:
        raise UndefinedTemperatureError(f"populations ({p_g:.3g}, {p_e:.3g}) do not define a temperature")
    log_ratio = math.log(p_e / p_g)
    if log_ratio == 0.0:
        return math.inf
    return (spec.E_g - spec.E_e) / log_ratio


def steady_temperature(params: BathParams) -> float:
    """Thermalization temperature of the single-bath steady state."""
    coef = table_one_coefficients(params)
    return temperature_of(np.diag([coef.gamma_g, coef.gamma_e]).astype(complex), params.qubit)


def _j0(beta_S0: float, params: BathParams) -> float:
    """Time-independent heat-current amplitude (Poisson factor included)."""
    q_g, q_e = gibbs_weights(beta_S0, params.qubit)
    p_g, p_e = params.gibbs()
    coef = table_one_coefficients(params)
    al = coef.alpha * params.coherence if params.kind is ProjectileKind.DISCORDANT else 0.0
    thermal = q_g * p_e - q_e * p_g
    coherent = al * (q_g - q_e)
    return params.rate_p * (thermal + coherent) * params.qubit.splitting * coef.eta_over_alpha


def heat_current(t: float, beta_S0: float, params: BathParams) -> float:
    """Net heat current J(t) = J0 gamma(t) between bath and qubit."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    return _j0(beta_S0, params) * table_one_coefficients(params).gamma(t)


def anomalous_heat_current(t: float, params: BathParams) -> float:
    """Heat current at equal initial temperatures (beta_S0 = beta_B).

    Nonzero only for discordant projectiles; other kinds return exactly zero
    and flag the call with a warning.
    """
    if params.kind is not ProjectileKind.DISCORDANT:
        warnings.warn(
            f"anomalous heat current is identically zero for {params.kind.value} projectiles",
            UserWarning,
            stacklevel=2,
        )
        return 0.0
    return heat_current(t, params.beta_B, params)


def _beta_of(rho: np.ndarray, spec: QubitSpec) -> float:
    t = temperature_of(rho, spec)
    return 0.0 if math.isinf(t) else 1.0 / t


@dataclass(frozen=True)
class CurrentRecord:
    """Time-stamped currents and entropy budget of the transient relaxation."""

    t: float
    J_heat: float
    J_coherence: float
    entropy_production: float
    entropy_flux: float
    T_system: float


def entropy_production(t: float, beta_S0: float, params: BathParams) -> CurrentRecord:
    """Entropy production rate Pi(t) = J(t) (beta_S(t) - beta_S(inf)) >= 0.

    Also reports the split Pi = dS_vN/dt + Phi.  The coherence-current field
    evaluates the linear-response formula at the same instant (override
    applied; the formula is exact only in the high-temperature regime).
    """
    rho = analytic_state(t, beta_S0, params)
    coef = table_one_coefficients(params)
    j_heat = heat_current(t, beta_S0, params)
    beta_t = _beta_of(rho, params.qubit)
    beta_inf = 1.0 / steady_temperature(params)
    pi = j_heat * (beta_t - beta_inf)
    # dS_vN/dt for a diagonal state: -sum rho_ii' * ln(rho_ii).
    dee = -coef.decay_rate * (rho[1, 1].real - coef.gamma_e)
    ds_dt = -dee * math.log(rho[1, 1].real / rho[0, 0].real) if rho[1, 1].real > 0 else 0.0
    return CurrentRecord(
        t=float(t),
        J_heat=j_heat,
        J_coherence=coherence_current(t, beta_S0, params, allow_low_temperature=True),
        entropy_production=pi,
        entropy_flux=pi - ds_dt,
        T_system=temperature_of(rho, params.qubit),
    )


def delta_c_transient(params: BathParams) -> float:
    """Coherence-potential difference seen by the coherence-free qubit: -2 alpha lambda."""
    coef = table_one_coefficients(params)
    al = coef.alpha * params.coherence if params.kind is ProjectileKind.DISCORDANT else 0.0
    return -2.0 * al


def delta_c_two_bath(params1: BathParams, params2: BathParams) -> float:
    """Coherence-potential difference between two baths: 2 alpha (lambda' - lambda)."""
    coef = table_one_coefficients(params1)
    return 2.0 * coef.alpha * (params2.coherence - params1.coherence)


def _transient_l_coefficient(params: BathParams) -> float:
    coef = table_one_coefficients(params)
    return params.rate_p * params.qubit.splitting**2 * coef.eta_over_alpha / 4.0


def _require_high_t(betas, spec: QubitSpec, allow: bool, what: str) -> None:
    worst = max(b * spec.splitting for b in betas)
    if worst > HIGH_T_THRESHOLD and not allow:
        raise ValueError(
            f"{what} is a high-temperature (linear-response) form: "
            f"beta*dE = {worst:.3g} exceeds {HIGH_T_THRESHOLD}; "
            "pass allow_low_temperature=True to evaluate it anyway"
        )


def coherence_current(
    t: float,
    beta_S0: float,
    params: BathParams,
    allow_low_temperature: bool = False,
) -> float:
    """Transient coherence current: -J_c(t) = gamma(t) (L dbeta - L beta_S0 dC)."""
    _require_high_t((beta_S0, params.beta_B), params.qubit, allow_low_temperature, "the coherence current")
    l = _transient_l_coefficient(params)
    g = table_one_coefficients(params).gamma(t)
    d_beta = beta_S0 - params.beta_B
    d_c = delta_c_transient(params)
    return -g * (l * d_beta - l * beta_S0 * d_c)


def _check_matched(params1: BathParams, params2: BathParams) -> None:
    same = (
        params1.scenario is params2.scenario
        and params1.J == params2.J
        and params1.tau == params2.tau
        and params1.rate_p == params2.rate_p
        and params1.qubit == params2.qubit
    )
    if not same:
        raise UnsupportedConfigurationError(
            "two-bath formulas require identical collision parameters "
            "(scenario, J, tau, rate_p, qubit spec) for both baths"
        )


def _beta_infinity_high_t(params1: BathParams, params2: BathParams) -> float:
    coef = table_one_coefficients(params1)
    al = coef.alpha * params1.coherence + coef.alpha * params2.coherence
    return (params1.beta_B + params2.beta_B) / (2.0 * (1.0 + al))


def coherence_current_two_bath(
    params1: BathParams,
    params2: BathParams,
    allow_low_temperature: bool = False,
) -> float:
    """Steady coherence current between two baths (linear-response form)."""
    _check_matched(params1, params2)
    _require_high_t((params1.beta_B, params2.beta_B), params1.qubit, allow_low_temperature, "the coherence current")
    l = _transient_l_coefficient(params1) / 2.0
    d_beta = params2.beta_B - params1.beta_B
    d_c = delta_c_two_bath(params1, params2)
    return -(l * d_beta - l * _beta_infinity_high_t(params1, params2) * d_c)


@dataclass(frozen=True)
class OnsagerMatrix:
    """2x2 thermocoherent coefficients with the configuration's potentials."""

    L_hh: float
    L_hc: float
    L_ch: float
    L_cc: float
    regime: str
    delta_beta: float
    delta_C: float


def onsager_coefficients(
    params: BathParams,
    params2: BathParams | None = None,
    beta_S0: float | None = None,
) -> OnsagerMatrix:
    """Closed-form thermocoherent coefficients.

    Transient single bath: all four entries equal rate_p dE^2 eta / (4 alpha);
    two-bath steady state: exactly half of that, per bath.
    """
    if params2 is None:
        l = _transient_l_coefficient(params)
        b0 = params.beta_B if beta_S0 is None else beta_S0
        return OnsagerMatrix(
            L_hh=l,
            L_hc=l,
            L_ch=l,
            L_cc=l,
            regime="transient_high_T",
            delta_beta=b0 - params.beta_B,
            delta_C=delta_c_transient(params),
        )
    _check_matched(params, params2)
    l = _transient_l_coefficient(params) / 2.0
    return OnsagerMatrix(
        L_hh=l,
        L_hc=l,
        L_ch=l,
        L_cc=l,
        regime="two_bath_steady_high_T",
        delta_beta=params2.beta_B - params.beta_B,
        delta_C=delta_c_two_bath(params, params2),
    )


@dataclass(frozen=True)
class NumericOnsagerResult:
    matrix: OnsagerMatrix
    nonlinearity: float
    warning: str | None


def extract_onsager_numeric(
    params_base: BathParams,
    delta_beta_step: float,
    delta_C_step: float,
) -> NumericOnsagerResult:
    """Linear-response extraction of the L matrix by central finite differences.

    Independent of the closed forms: the heat current is the exact amplitude
    J0 and the coherence current is recovered from the exact entropy
    production rate through Pi = dbeta J_h + beta_inf dC J_c, differenced
    around the equilibrium point (dbeta = 0, dC = 0) of ``params_base``.

    The returned nonlinearity residual is the worst relative failure of the
    fitted linear form against the exact currents at the combined
    displacements (+-dbeta, +-dC), folded with the step-halving drift of the
    derivatives.  Within the high-temperature regime (beta dE <= 0.1) it
    stays at the per-mille level; beyond it the linear thermocoherent form
    stops describing the currents and a regime warning (> 5%) is attached.
    """
    spec = params_base.qubit
    coef = table_one_coefficients(params_base)
    if abs(coef.alpha) < 1e-12:
        raise ValueError("alpha = 0 (sequential J*tau = pi/2): delta_C cannot be varied")
    beta_b = params_base.beta_B

    def with_lambda(lam: float) -> BathParams:
        return BathParams(
            kind=ProjectileKind.DISCORDANT,
            beta_B=beta_b,
            coherence=lam,
            scenario=params_base.scenario,
            J=params_base.J,
            tau=params_base.tau,
            rate_p=params_base.rate_p,
            qubit=spec,
        )

    def j_h(d_beta: float, d_c: float) -> float:
        return _j0(beta_b + d_beta, with_lambda(-d_c / (2.0 * coef.alpha)))

    def j_c(d_beta: float, d_c: float) -> float:
        p = with_lambda(-d_c / (2.0 * coef.alpha))
        jh = _j0(beta_b + d_beta, p)
        beta_inf = 1.0 / steady_temperature(p)
        pi = jh * ((beta_b + d_beta) - beta_inf)
        return (pi - d_beta * jh) / (beta_inf * d_c)

    def fit(hb: float, hc: float) -> np.ndarray:
        l_hh = (j_h(hb, 0.0) - j_h(-hb, 0.0)) / (2.0 * hb)
        l_hc = -(j_h(0.0, hc) - j_h(0.0, -hc)) / (2.0 * hc) / beta_b
        jc_p = 0.5 * (j_c(hb, hc) + j_c(hb, -hc))
        jc_m = 0.5 * (j_c(-hb, hc) + j_c(-hb, -hc))
        l_ch = -(jc_p - jc_m) / (2.0 * hb)
        l_cc = (j_c(0.0, hc) - j_c(0.0, -hc)) / (2.0 * hc) / beta_b
        return np.array([[l_hh, l_hc], [l_ch, l_cc]])

    hb, hc = float(delta_beta_step), float(delta_C_step)
    full = fit(hb, hc)
    half = fit(hb / 2.0, hc / 2.0)
    scale = float(np.abs(half).max())
    drift = float(np.abs(full - half).max() / scale) if scale > 0 else 0.0

    # Superposition probe: the linear form must reproduce the exact currents
    # under simultaneous thermal and coherence displacements.
    probes = [(hb, hc), (hb, -hc), (-hb, hc)]
    jh_exact = [j_h(db, dc) for db, dc in probes]
    jc_exact = [j_c(db, dc) for db, dc in probes]
    jh_lin = [full[0, 0] * db - full[0, 1] * beta_b * dc for db, dc in probes]
    jc_lin = [-(full[1, 0] * db - full[1, 1] * beta_b * dc) for db, dc in probes]
    scale_h = max(abs(v) for v in jh_exact)
    scale_c = max(abs(v) for v in jc_exact)
    superposition = 0.0
    if scale_h > 0:
        superposition = max(abs(a - b) / scale_h for a, b in zip(jh_exact, jh_lin))
    if scale_c > 0:
        superposition = max(superposition, max(abs(a - b) / scale_c for a, b in zip(jc_exact, jc_lin)))
    nonlinearity = max(drift, superposition)

    warning = None
    if nonlinearity > 0.05:
        warning = (
            f"nonlinearity residual {nonlinearity:.2%} exceeds 5%: the linear "
            "thermocoherent form is not a faithful description at this point"
        )
    matrix = OnsagerMatrix(
        L_hh=float(full[0, 0]),
        L_hc=float(full[0, 1]),
        L_ch=float(full[1, 0]),
        L_cc=float(full[1, 1]),
        regime="transient_high_T",
        delta_beta=hb,
        delta_C=hc,
    )
    return NumericOnsagerResult(matrix=matrix, nonlinearity=nonlinearity, warning=warning)


@dataclass(frozen=True)
class TwoBathSteady:
    """Exact steady state of the two-bath master equation and its currents.

    ``beta_infinity`` comes from the exact rate balance of the two-bath
    generator; ``beta_infinity_high_t`` is the linearized expression
    (beta_B + beta_B') / (2 (1 + alpha lambda + alpha lambda')).
    """

    beta_infinity: float
    beta_infinity_high_t: float
    J_h_bath1: float
    J_h_bath2: float
    J_c: float
    Pi: float


def two_bath_steady(params1: BathParams, params2: BathParams) -> TwoBathSteady:
    """Steady-state balance of a qubit coupled to two discordant projectile baths."""
    for p in (params1, params2):
        if p.kind is not ProjectileKind.DISCORDANT:
            raise UnsupportedConfigurationError(
                "two-bath steady state is modeled for discordant (or product) projectile baths"
            )
    _check_matched(params1, params2)
    r1 = lindblad_rates(params1)
    r2 = lindblad_rates(params2)
    total = r1.kappa_1 + r1.kappa_2 + r2.kappa_1 + r2.kappa_2
    ree = (r1.kappa_2 + r2.kappa_2) / total
    rho = np.diag([1.0 - ree, ree]).astype(complex)
    d_e = params1.qubit.splitting
    j1 = d_e * (r1.kappa_2 * rho[0, 0].real - r1.kappa_1 * rho[1, 1].real)
    j2 = d_e * (r2.kappa_2 * rho[0, 0].real - r2.kappa_1 * rho[1, 1].real)
    beta_1 = 1.0 / steady_temperature(params1)
    beta_2 = 1.0 / steady_temperature(params2)
    return TwoBathSteady(
        beta_infinity=_beta_of(rho, params1.qubit),
        beta_infinity_high_t=_beta_infinity_high_t(params1, params2),
        J_h_bath1=j1,
        J_h_bath2=j2,
        J_c=coherence_current_two_bath(params1, params2, allow_low_temperature=True),
        Pi=-j1 * beta_1 - j2 * beta_2,
    )


def generator_heat_current(rho_S: np.ndarray, params: BathParams) -> float:
    """tr[H_S d rho/dt] evaluated on the brute-force generator (cross-check route)."""
    h_s = np.diag([params.qubit.E_g, params.qubit.E_e]).astype(complex)
    return float(np.trace(h_s @ generator_apply(rho_S, [params])).real)
