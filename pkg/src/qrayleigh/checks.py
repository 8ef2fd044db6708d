"""Self-contained invariant suite behind ``qrayleigh checks``.

Each check exercises one contract of the library on seeded random draws and
reports the worst residual against its tolerance.  The CLI serializes the
results as JSON and exits nonzero if any check fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import dynamics, fpcheck, measures, qmath, thermo
from .collision import collective_unitary, sequential_unitary, single_collision_map, total_free_hamiltonian
from .states import BathParams, ProjectileKind, QubitSpec, Scenario, coherence_bounds, projectile_state, thermal_qubit

__all__ = ["CheckResult", "run_all_checks", "DEFAULT_SEED"]

DEFAULT_SEED = 20200917
_KINDS = (ProjectileKind.CLASSICAL, ProjectileKind.DISCORDANT, ProjectileKind.ENTANGLED)


@dataclass(frozen=True)
class CheckResult:
    check_id: str
    passed: bool
    residual: float
    tolerance: float
    detail: str


def _random_bath(rng: np.random.Generator, kind=None, scenario=None) -> BathParams:
    kind = kind if kind is not None else _KINDS[rng.integers(len(_KINDS))]
    scenario = scenario if scenario is not None else (
        Scenario.SEQUENTIAL if rng.random() < 0.5 else Scenario.COLLECTIVE
    )
    beta = float(rng.uniform(0.5, 4.0))
    chi = float(rng.uniform(-1.0, 1.0))
    bound = coherence_bounds(kind, beta)[1]
    return BathParams(
        kind=kind,
        beta_B=beta,
        coherence=chi * bound,
        scenario=scenario,
        J=1.0,
        tau=float(rng.uniform(0.02, 1.3)),
        rate_p=float(rng.uniform(0.5, 2.0)),
    )


def _random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def _result(check_id: str, residual: float, tol: float, detail: str = "") -> CheckResult:
    return CheckResult(check_id, bool(residual <= tol), float(residual), float(tol), detail)


def check_tensor_associativity(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        a, b, c = (_random_density(rng, 2) for _ in range(3))
        left = qmath.tensor_product(qmath.tensor_product(a, b), c)
        right = qmath.tensor_product(a, qmath.tensor_product(b, c))
        worst = max(worst, float(np.abs(left - right).max()))
    return _result("qmath.tensor_associativity", worst, 1e-14)


def check_partial_trace_product(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        a = _random_density(rng, 2)
        b = _random_density(rng, 4)
        red = qmath.partial_trace(qmath.tensor_product(a, b), keep=(0,), dims=[2, 4])
        worst = max(worst, float(np.abs(red - a).max()))
    return _result("qmath.partial_trace_product", worst, 1e-14)


def check_unitary_group_law(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        h = _random_density(rng, 4)
        h = (h + h.conj().T) / 2
        t1, t2 = rng.uniform(-2, 2, size=2)
        u = qmath.unitary_from_hamiltonian(h, t1) @ qmath.unitary_from_hamiltonian(h, t2)
        worst = max(worst, float(np.abs(u - qmath.unitary_from_hamiltonian(h, t1 + t2)).max()))
    return _result("qmath.unitary_group_law", worst, 1e-12)


def check_local_gibbs_reductions(rng) -> CheckResult:
    worst = 0.0
    for _ in range(30):
        params = _random_bath(rng)
        rho = projectile_state(params)
        th = thermal_qubit(params.beta_B, params.qubit)
        for q in (0, 1):
            red = qmath.partial_trace(rho, keep=(q,))
            worst = max(worst, float(np.abs(red - th).max()))
    return _result("states.local_gibbs_reductions", worst, 1e-14)


def check_rho_d_eigenvalues(rng) -> CheckResult:
    worst = 0.0
    for _ in range(30):
        params = _random_bath(rng, kind=ProjectileKind.DISCORDANT)
        p_g, p_e = params.gibbs()
        lam = params.coherence
        expected = np.sort([p_g * p_g, p_e * p_e, p_g * p_e + lam, p_g * p_e - lam])
        got = np.linalg.eigvalsh(projectile_state(params))
        worst = max(worst, float(np.abs(got - expected).max()))
    return _result("states.rho_d_eigenvalues", worst, 1e-12)


def check_bounds_rejection(rng) -> CheckResult:
    failures = 0
    for _ in range(20):
        beta = float(rng.uniform(0.5, 4.0))
        for kind in (ProjectileKind.DISCORDANT, ProjectileKind.ENTANGLED):
            hi = coherence_bounds(kind, beta)[1]
            try:
                BathParams(kind=kind, beta_B=beta, coherence=hi * 1.0001)
                failures += 1
            except ValueError:
                pass
            try:
                BathParams(kind=kind, beta_B=beta, coherence=hi * 0.9999)
            except ValueError:
                failures += 1
    return _result("states.bounds_rejection", float(failures), 0.0, "mis-rejections")


def check_collision_unitarity(rng) -> CheckResult:
    worst = 0.0
    for _ in range(10):
        j_tau = float(rng.uniform(0.01, 2.5))
        for u in (sequential_unitary(1.0, j_tau), collective_unitary(1.0, j_tau)):
            m = u.matrix
            worst = max(worst, float(np.abs(m @ m.conj().T - np.eye(8)).max()))
    return _result("collision.unitarity", worst, 1e-12)


def check_collision_energy_conservation(rng) -> CheckResult:
    worst = 0.0
    h_free = total_free_hamiltonian(QubitSpec(), 3)
    for _ in range(10):
        j_tau = float(rng.uniform(0.01, 2.5))
        for u in (sequential_unitary(1.0, j_tau), collective_unitary(1.0, j_tau)):
            m = u.matrix
            worst = max(worst, float(np.abs(m @ h_free - h_free @ m).max()))
    return _result("collision.energy_conservation", worst, 1e-10)


def check_diagonal_sector_closed(rng) -> CheckResult:
    worst = 0.0
    for _ in range(10):
        params = _random_bath(rng)
        u = dynamics.collision_unitary_for(params)
        d = rng.uniform(0.1, 0.9)
        out = single_collision_map(np.diag([1 - d, d]).astype(complex), projectile_state(params), u)
        worst = max(worst, float(abs(out[0, 1])), float(abs(out[1, 0])))
    return _result("collision.diagonal_sector_closed", worst, 1e-12)


def check_analytic_vs_rk4(rng, n_draws: int = 50) -> CheckResult:
    worst = 0.0
    for _ in range(n_draws):
        params = _random_bath(rng)
        beta0 = float(rng.uniform(0.4, 4.0))
        coef = dynamics.table_one_coefficients(params)
        t_end = min(3.0 / coef.decay_rate, 3.0) if coef.decay_rate > 0 else 3.0
        grid = np.linspace(0.0, t_end, 7)
        traj = dynamics.integrate_master_equation(thermal_qubit(beta0, params.qubit), [params], grid)
        for t, rho in zip(grid, traj):
            ref = dynamics.analytic_state(float(t), beta0, params)
            worst = max(worst, float(np.abs(np.diag(rho - ref)).max()))
    return _result("dynamics.analytic_vs_rk4", worst, 1e-8)


def check_steady_state_annihilated(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        params = _random_bath(rng)
        coef = dynamics.table_one_coefficients(params)
        steady = np.diag([coef.gamma_g, coef.gamma_e]).astype(complex)
        worst = max(worst, float(np.abs(dynamics.generator_apply(steady, [params])).max()))
    return _result("dynamics.steady_state_annihilated", worst, 1e-12)


def check_mu_invariance(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        beta = float(rng.uniform(0.5, 4.0))
        scen = Scenario.SEQUENTIAL if rng.random() < 0.5 else Scenario.COLLECTIVE
        tau = float(rng.uniform(0.02, 1.3))
        mu = float(rng.uniform(-1, 1)) * coherence_bounds(ProjectileKind.ENTANGLED, beta)[1]
        pe = BathParams(kind=ProjectileKind.ENTANGLED, beta_B=beta, coherence=mu, scenario=scen, tau=tau)
        pc = BathParams(kind=ProjectileKind.CLASSICAL, beta_B=beta, scenario=scen, tau=tau)
        d = rng.uniform(0.05, 0.95)
        rho = np.diag([1 - d, d]).astype(complex)
        worst = max(
            worst,
            float(np.abs(dynamics.generator_apply(rho, [pe]) - dynamics.generator_apply(rho, [pc])).max()),
        )
    return _result("dynamics.mu_invariance_diagonal", worst, 1e-12)


def check_lindblad_reassembly(rng) -> CheckResult:
    worst = 0.0
    basis = [
        np.array([[1, 0], [0, 0]], dtype=complex),
        np.array([[0, 0], [0, 1]], dtype=complex),
        np.array([[0, 1], [1, 0]], dtype=complex) / 2,
        np.array([[0, -1j], [1j, 0]], dtype=complex) / 2,
    ]
    for _ in range(20):
        params = _random_bath(rng, kind=ProjectileKind.DISCORDANT)
        rates = dynamics.lindblad_rates(params)
        for b in basis:
            diff = dynamics.generator_apply(b, [params]) - dynamics.dissipator_apply(b, rates)
            worst = max(worst, float(np.abs(diff).max()))
    return _result("dynamics.lindblad_reassembly_discordant", worst, 1e-12)


def check_stochastic_vs_analytic(rng, n_traj: int = 10_000) -> CheckResult:
    params = _random_bath(rng, kind=ProjectileKind.DISCORDANT, scenario=Scenario.COLLECTIVE)
    params = BathParams(
        kind=params.kind,
        beta_B=params.beta_B,
        coherence=params.coherence,
        scenario=params.scenario,
        J=1.0,
        tau=0.6,
        rate_p=1.0,
    )
    beta0 = float(rng.uniform(0.4, 4.0))
    seed = int(rng.integers(2**32))
    t_end = 4.0
    ens = dynamics.stochastic_trajectories(
        thermal_qubit(beta0, params.qubit), params, t_end, n_traj, seed, n_points=21
    )
    worst_sigma = 0.0
    for t, mean, sem in zip(ens.times, ens.mean_excited_population, ens.std_error):
        ref = dynamics.analytic_state(float(t), beta0, params)[1, 1].real
        if sem > 0:
            worst_sigma = max(worst_sigma, abs(mean - ref) / sem)
    return _result("dynamics.stochastic_vs_analytic", worst_sigma, 4.0, f"n_traj={n_traj}, worst |dev|/sem")


def check_heat_current_consistency(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        params = _random_bath(rng)
        beta0 = float(rng.uniform(0.4, 4.0))
        t = float(rng.uniform(0.0, 3.0))
        j_closed = thermo.heat_current(t, beta0, params)
        j_gen = thermo.generator_heat_current(dynamics.analytic_state(t, beta0, params), params)
        worst = max(worst, abs(j_closed - j_gen))
    return _result("thermo.heat_current_consistency", worst, 1e-12)


def check_heat_flow_inhibition(rng) -> CheckResult:
    worst = 0.0
    for _ in range(50):
        params = _random_bath(rng, kind=ProjectileKind.DISCORDANT)
        beta0 = 1.0 / thermo.steady_temperature(params)
        for t in (0.0, 0.7, 5.0):
            worst = max(worst, abs(thermo.heat_current(t, beta0, params)))
    return _result("thermo.heat_flow_inhibition", worst, 1e-14)


def check_entropy_production_nonnegative(rng) -> CheckResult:
    worst = 0.0
    for _ in range(1000):
        params = _random_bath(rng)
        beta0 = float(rng.uniform(0.4, 4.0))
        t = float(rng.uniform(0.0, 5.0))
        worst = min(worst, thermo.entropy_production(t, beta0, params).entropy_production)
    return _result("thermo.entropy_production_nonnegative", -worst, 1e-12, "worst -Pi")


def check_onsager_reciprocity_numeric(rng) -> CheckResult:
    del rng
    params = BathParams(kind=ProjectileKind.DISCORDANT, beta_B=0.05, scenario=Scenario.COLLECTIVE, tau=0.05)
    res = thermo.extract_onsager_numeric(params, delta_beta_step=0.005, delta_C_step=0.004)
    closed = thermo.onsager_coefficients(params).L_hh
    m = res.matrix
    rel = max(
        abs(m.L_hh / closed - 1),
        abs(m.L_hc / closed - 1),
        abs(m.L_ch / closed - 1),
        abs(m.L_cc / closed - 1),
        abs(m.L_hc - m.L_ch) / abs(closed),
    )
    return _result("thermo.onsager_reciprocity_numeric", rel, 0.02, f"nonlinearity={res.nonlinearity:.2e}")


def check_two_bath_first_law(rng) -> CheckResult:
    worst = 0.0
    peltier_ok = True
    for _ in range(20):
        beta1 = float(rng.uniform(0.5, 3.0))
        beta2 = float(rng.uniform(0.5, 3.0))
        tau = float(rng.uniform(0.02, 1.0))
        chi1, chi2 = rng.uniform(-1, 1, size=2)
        p1 = BathParams(
            kind=ProjectileKind.DISCORDANT, beta_B=beta1,
            coherence=chi1 * coherence_bounds(ProjectileKind.DISCORDANT, beta1)[1], tau=tau,
        )
        p2 = BathParams(
            kind=ProjectileKind.DISCORDANT, beta_B=beta2,
            coherence=chi2 * coherence_bounds(ProjectileKind.DISCORDANT, beta2)[1], tau=tau,
        )
        ss = thermo.two_bath_steady(p1, p2)
        worst = max(worst, abs(ss.J_h_bath1 + ss.J_h_bath2))
    pel1 = BathParams(kind=ProjectileKind.DISCORDANT, beta_B=2.0,
                      coherence=coherence_bounds(ProjectileKind.DISCORDANT, 2.0)[1], tau=0.05)
    pel2 = BathParams(kind=ProjectileKind.DISCORDANT, beta_B=2.0, coherence=0.0, tau=0.05)
    if abs(thermo.two_bath_steady(pel1, pel2).J_h_bath1) <= 0.0:
        peltier_ok = False
    detail = "includes coherent-Peltier nonzero-flow check" + ("" if peltier_ok else " [FAILED]")
    residual = worst if peltier_ok else math.inf
    return _result("thermo.two_bath_first_law", residual, 1e-12, detail)


def check_fp_moments(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        params = _random_bath(rng, kind=ProjectileKind.DISCORDANT)
        worst = max(worst, fpcheck.moment_consistency_check(params).max_residual)
    return _result("fpcheck.moment_identities", worst, 1e-12)


def check_discord_bounds(rng, n_draws: int = 60) -> CheckResult:
    worst = 0.0
    for _ in range(n_draws):
        params = _random_bath(rng)
        rho = projectile_state(params)
        d = measures.quantum_discord(rho).value
        i = measures.mutual_information(rho)
        worst = max(worst, -d, d - i - 1e-12)
    return _result("measures.discord_bounds", max(0.0, worst), 1e-10, "0 <= discord <= I")


_ALL_CHECKS = (
    check_tensor_associativity,
    check_partial_trace_product,
    check_unitary_group_law,
    check_local_gibbs_reductions,
    check_rho_d_eigenvalues,
    check_bounds_rejection,
    check_collision_unitarity,
    check_collision_energy_conservation,
    check_diagonal_sector_closed,
    check_analytic_vs_rk4,
    check_steady_state_annihilated,
    check_mu_invariance,
    check_lindblad_reassembly,
    check_stochastic_vs_analytic,
    check_heat_current_consistency,
    check_heat_flow_inhibition,
    check_entropy_production_nonnegative,
    check_onsager_reciprocity_numeric,
    check_two_bath_first_law,
    check_fp_moments,
    check_discord_bounds,
)


def run_all_checks(seed: int = DEFAULT_SEED) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [fn(rng) for fn in _ALL_CHECKS]
