"""Coarse-grained open dynamics of the bombarded qubit.

Exposes two independent routes to the same populations:

* the closed-form relaxation built from the scenario/correlation coefficient
  table (``table_one_coefficients`` / ``analytic_state``), and
* brute-force routes driven purely by the collision unitaries: the exact
  master-equation generator, its fixed-step RK4 integration, and a seeded
  Poisson repeated-interaction Monte Carlo ensemble.

Rate normalization: every physical rate reported here (relaxation rate of the
population envelope, Lindblad rates, dephasing) includes the Poisson arrival
rate ``rate_p``.  Working picture is the interaction picture; the exchange
interaction commutes with the free Hamiltonian of identical qubits, so
populations and equal-energy coherences agree with the Schroedinger picture.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .collision import (
    EXTENDED_COLLECTIVE,
    CollisionUnitary,
    collective_unitary,
    extended_collective_unitary,
    sequential_unitary,
    single_collision_map,
)
from .qmath import tensor_product, validate_density_matrix
from .states import BathParams, ProjectileKind, Scenario, gibbs_weights, projectile_state

__all__ = [
    "TableOneCoefficients",
    "LindbladRates",
    "TrajectoryEnsemble",
    "CollisionSnapshot",
    "NonThermalSteadyStateError",
    "NumericalIntegrationError",
    "table_one_coefficients",
    "analytic_state",
    "collision_unitary_for",
    "generator_apply",
    "generator_superoperator",
    "integrate_master_equation",
    "lindblad_rates",
    "dissipator_apply",
    "stochastic_trajectories",
    "intra_collision_snapshots",
    "extended_block_map",
    "extended_block_steady_state",
]


class NonThermalSteadyStateError(ValueError):
    """The discordant coherence is too negative for a thermal steady state."""


class NumericalIntegrationError(RuntimeError):
    """State invariants were violated beyond tolerance during integration."""


@dataclass(frozen=True)
class TableOneCoefficients:
    """Ingredients of the analytic population solution.

    ``gamma_g + gamma_e = 1`` and ``gamma(0) = 1`` by construction;
    ``eta_over_alpha`` is stored in the simplified form that removes the
    0/0 at the sequential point J*tau = pi/2, and ``alpha`` itself enters
    the physics only through the products ``alpha * lambda``.
    """

    alpha: float
    gamma_g: float
    gamma_e: float
    decay_rate: float
    eta_over_alpha: float
    eta: float

    def gamma(self, t: float) -> float:
        return math.exp(-self.decay_rate * t)


def _scenario_geometry(scenario: Scenario, j_tau: float) -> tuple[float, float, float]:
    """(alpha, eta, eta/alpha) for one collision scenario."""
    if scenario is Scenario.COLLECTIVE:
        eta = math.sin(2.0 * math.sqrt(2.0) * j_tau) ** 2
        return 1.0, eta, eta
    c = math.cos(j_tau)
    s = math.sin(j_tau)
    alpha = 2.0 * c / (1.0 + c * c)
    eta = s * math.sin(2.0 * j_tau)
    return alpha, eta, s * s * (1.0 + c * c)


def table_one_coefficients(params: BathParams) -> TableOneCoefficients:
    p_g, p_e = params.gibbs()
    alpha, eta, eta_over_alpha = _scenario_geometry(params.scenario, params.j_tau)
    if params.kind is ProjectileKind.DISCORDANT:
        al = alpha * params.coherence
        denom = 1.0 + 2.0 * al
        if denom <= 0.0:
            raise NonThermalSteadyStateError(
                f"no thermal steady state: 1 + 2*alpha*lambda = {denom:.6g} <= 0 "
                f"(alpha={alpha:.6g}, lambda={params.coherence:.6g})"
            )
        gamma_g = (p_g + al) / denom
        gamma_e = (p_e + al) / denom
        decay = params.rate_p * denom * eta_over_alpha
    else:
        gamma_g, gamma_e = p_g, p_e
        decay = params.rate_p * eta_over_alpha
    return TableOneCoefficients(
        alpha=alpha,
        gamma_g=gamma_g,
        gamma_e=gamma_e,
        decay_rate=decay,
        eta_over_alpha=eta_over_alpha,
        eta=eta,
    )


def analytic_state(t: float, beta_S0: float, params: BathParams) -> np.ndarray:
    """Closed-form diagonal qubit state at time ``t``.

    Interpolates exponentially between the initial Gibbs populations and the
    steady-state weights (gamma_g, gamma_e); at t = 0 it returns
    ``thermal_qubit(beta_S0)`` exactly.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    q_g, q_e = gibbs_weights(beta_S0, params.qubit)
    coef = table_one_coefficients(params)
    g = coef.gamma(t)
    rho_gg = coef.gamma_g * (1.0 - q_e * g) + coef.gamma_e * q_g * g
    rho_ee = coef.gamma_e * (1.0 - q_g * g) + coef.gamma_g * q_e * g
    return np.diag([rho_gg, rho_ee]).astype(complex)


def collision_unitary_for(params: BathParams) -> CollisionUnitary:
    if params.scenario is Scenario.COLLECTIVE:
        return collective_unitary(params.J, params.tau)
    return sequential_unitary(params.J, params.tau)


def generator_apply(rho_S: np.ndarray, baths) -> np.ndarray:
    """Master-equation right-hand side: sum over baths of p (tr_B[U rho U+] - rho)."""
    baths = list(baths)
    if not 1 <= len(baths) <= 2:
        raise ValueError(f"expected 1 or 2 baths, got {len(baths)}")
    rho = np.asarray(rho_S, dtype=complex)
    out = np.zeros_like(rho)
    for bath in baths:
        u = collision_unitary_for(bath)
        out += bath.rate_p * (single_collision_map(rho, projectile_state(bath), u) - rho)
    return out


def generator_superoperator(baths) -> np.ndarray:
    """4x4 matrix of ``generator_apply`` acting on vec(rho) (row-major)."""
    sup = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        basis = np.zeros((2, 2), dtype=complex)
        basis.flat[k] = 1.0
        sup[:, k] = generator_apply(basis, baths).reshape(4)
    return sup


def integrate_master_equation(rho0: np.ndarray, baths, t_grid) -> np.ndarray:
    """Fixed-step RK4 integration of the exact generator along ``t_grid``.

    The step never exceeds min(1e-3 / rate_p, grid spacing).  The generator is
    linear and time independent, so one RK4 step is the fixed matrix
    I + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24, assembled once per segment and
    applied per substep.  Every grid point is checked against the
    density-matrix invariants at 1e-8.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1 or t_grid[0] != 0.0 or np.any(np.diff(t_grid) <= 0):
        raise ValueError("t_grid must be increasing and start at 0")
    baths = list(baths)
    total_rate = sum(b.rate_p for b in baths)
    h_max = 1e-3 / total_rate if total_rate > 0 else math.inf

    sup = generator_superoperator(baths)
    eye = np.eye(4, dtype=complex)
    v = np.asarray(rho0, dtype=complex).reshape(4).copy()
    out = np.empty((t_grid.size, 2, 2), dtype=complex)
    out[0] = v.reshape(2, 2)
    _check_point(out[0], t_grid[0])
    step_cache: dict[float, np.ndarray] = {}
    for i in range(1, t_grid.size):
        span = t_grid[i] - t_grid[i - 1]
        n_sub = max(1, math.ceil(span / min(h_max, span)))
        h = span / n_sub
        step = step_cache.get(h)
        if step is None:
            hg = h * sup
            step = eye + hg + (hg @ hg) / 2.0 + (hg @ hg @ hg) / 6.0 + (hg @ hg @ hg @ hg) / 24.0
            step_cache[h] = step
        for _ in range(n_sub):
            v = step @ v
        out[i] = v.reshape(2, 2)
        _check_point(out[i], t_grid[i])
    return out


def _check_point(rho: np.ndarray, t: float, tol: float = 1e-8) -> None:
    report = validate_density_matrix(rho, tol)
    if not report.passed:
        raise NumericalIntegrationError(
            f"integration produced an invalid state at t={t:.6g}: "
            f"trace dev {report.trace_deviation:.3e}, "
            f"herm dev {report.hermiticity_deviation:.3e}, "
            f"min eig {report.min_eigenvalue:.3e}"
        )


@dataclass(frozen=True)
class LindbladRates:
    """Rates of the Lindblad decomposition, Poisson factor included.

    kappa_1 drives emission (e -> g), kappa_2 excitation (g -> e);
    c_dephase is the extra energy-preserving coherence decay.  The dephasing
    closed forms are those of the discordant projectile family.
    """

    kappa_1: float
    kappa_2: float
    c_dephase: float


def lindblad_rates(params: BathParams) -> LindbladRates:
    p_g, p_e = params.gibbs()
    coef = table_one_coefficients(params)
    al = coef.alpha * params.coherence if params.kind is ProjectileKind.DISCORDANT else 0.0
    k1 = params.rate_p * (p_g + al) * coef.eta_over_alpha
    k2 = params.rate_p * (p_e + al) * coef.eta_over_alpha
    if params.scenario is Scenario.SEQUENTIAL:
        c = params.rate_p * math.sin(params.j_tau) ** 4 / 2.0
    else:
        c = params.rate_p * 2.0 * (p_g**2 + p_e**2) * math.sin(math.sqrt(2.0) * params.j_tau) ** 4
    return LindbladRates(kappa_1=k1, kappa_2=k2, c_dephase=c)


def dissipator_apply(rho: np.ndarray, rates: LindbladRates) -> np.ndarray:
    """D_h + D_d assembled from ``rates`` (interaction picture, no commutator)."""
    r = np.asarray(rho, dtype=complex)
    k1, k2, c = rates.kappa_1, rates.kappa_2, rates.c_dephase
    out = np.empty_like(r)
    out[0, 0] = k1 * r[1, 1] - k2 * r[0, 0]
    out[1, 1] = k2 * r[0, 0] - k1 * r[1, 1]
    off = 0.5 * (k1 + k2) + c
    out[0, 1] = -off * r[0, 1]
    out[1, 0] = -off * r[1, 0]
    return out


@dataclass(frozen=True)
class TrajectoryEnsemble:
    seed: int
    n_traj: int
    times: np.ndarray
    mean_excited_population: np.ndarray
    std_error: np.ndarray


def stochastic_trajectories(
    rho0: np.ndarray,
    params: BathParams,
    t_end: float,
    n_traj: int,
    seed: int,
    n_points: int = 51,
) -> TrajectoryEnsemble:
    """Poisson repeated-interaction Monte Carlo oracle for the master equation.

    Each trajectory draws exponential inter-arrival times at ``rate_p`` and
    applies the single-collision channel at every arrival (collisions are
    instantaneous on the coarse-grained time axis; tau enters only through
    the unitary).  Per-trajectory generators are spawned from the master seed
    before dispatch and the reduction runs in trajectory-index order, so the
    ensemble mean is bit-stable regardless of execution order.
    """
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    times = np.linspace(0.0, float(t_end), int(n_points))
    u = collision_unitary_for(params)
    rho_b = projectile_state(params)
    # One-collision channel as a superoperator on vec(rho_S); built from the
    # same single-collision map a per-arrival application would use.
    chan = np.zeros((4, 4), dtype=complex)
    for k in range(4):
        basis = np.zeros((2, 2), dtype=complex)
        basis.flat[k] = 1.0
        chan[:, k] = single_collision_map(basis, rho_b, u).reshape(4)

    seeds = np.random.SeedSequence(seed).spawn(n_traj)
    v0 = np.asarray(rho0, dtype=complex).reshape(4)
    acc = np.zeros(times.size)
    acc_sq = np.zeros(times.size)
    for k in range(n_traj):
        rng = np.random.default_rng(seeds[k])
        arrivals = _poisson_arrivals(rng, params.rate_p, t_end)
        v = v0.copy()
        series = np.empty(times.size)
        j = 0
        for i, t in enumerate(times):
            while j < arrivals.size and arrivals[j] <= t:
                v = chan @ v
                j += 1
            series[i] = v[3].real
        acc += series
        acc_sq += series * series
    mean = acc / n_traj
    if n_traj > 1:
        var = np.maximum(acc_sq - n_traj * mean * mean, 0.0) / (n_traj - 1)
        sem = np.sqrt(var / n_traj)
    else:
        sem = np.zeros_like(mean)
    return TrajectoryEnsemble(
        seed=int(seed),
        n_traj=int(n_traj),
        times=times,
        mean_excited_population=mean,
        std_error=sem,
    )


def _poisson_arrivals(rng: np.random.Generator, rate: float, t_end: float) -> np.ndarray:
    if rate <= 0.0:
        return np.empty(0)
    # Draw in blocks until the cumulative time passes t_end.
    block = max(8, int(rate * t_end + 6.0 * math.sqrt(rate * t_end + 1.0)))
    gaps = rng.exponential(1.0 / rate, size=block)
    t_acc = np.cumsum(gaps)
    while t_acc[-1] < t_end:
        gaps = rng.exponential(1.0 / rate, size=block)
        t_acc = np.concatenate([t_acc, t_acc[-1] + np.cumsum(gaps)])
    return t_acc[t_acc <= t_end]


@dataclass(frozen=True)
class CollisionSnapshot:
    """Observables of the joint three-qubit state at one intra-collision time.

    The reported off-diagonals connect degenerate levels, so they are
    identical in the interaction and Schroedinger pictures.
    """

    time: float
    b1b2_l1_coherence: float
    sb1_upper_offdiag: complex
    sb2_upper_offdiag: complex
    max_real_offdiag_sb: float
    max_imag_b1b2: float
    max_single_qubit_offdiag: float


def intra_collision_snapshots(
    rho_S: np.ndarray,
    rho_B: np.ndarray,
    scenario: Scenario,
    J: float,
    times,
) -> list[CollisionSnapshot]:
    """Evolve S + B1 + B2 through one collision and record coherence routing."""
    if scenario is not Scenario.COLLECTIVE:
        raise ValueError("intra-collision snapshots are defined for the collective scenario")
    joint0 = tensor_product(np.asarray(rho_S, dtype=complex), np.asarray(rho_B, dtype=complex))
    out = []
    for t in np.asarray(times, dtype=float):
        u = collective_unitary(J, t).matrix
        joint = u @ joint0 @ u.conj().T
        t9 = joint.reshape(2, 2, 2, 2, 2, 2)
        rho_b1b2 = np.einsum("abcade->bcde", t9).reshape(4, 4)
        rho_sb1 = np.einsum("abcdec->abde", t9).reshape(4, 4)
        rho_sb2 = np.einsum("abcdbe->acde", t9).reshape(4, 4)
        singles = [
            np.einsum("abcabd->cd", t9),
            np.einsum("abcdbc->ad", t9),
            np.einsum("abcadc->bd", t9),
        ]
        offmask = ~np.eye(4, dtype=bool)
        out.append(
            CollisionSnapshot(
                time=float(t),
                b1b2_l1_coherence=float(np.abs(rho_b1b2[offmask]).sum()),
                sb1_upper_offdiag=complex(rho_sb1[1, 2]),
                sb2_upper_offdiag=complex(rho_sb2[1, 2]),
                max_real_offdiag_sb=float(
                    max(np.abs(rho_sb1[offmask].real).max(), np.abs(rho_sb2[offmask].real).max())
                ),
                max_imag_b1b2=float(np.abs(rho_b1b2.imag).max()),
                max_single_qubit_offdiag=float(max(abs(s[0, 1]) for s in singles)),
            )
        )
    return out


def _require_entangled_pair(params: BathParams) -> None:
    if params.kind is not ProjectileKind.ENTANGLED:
        raise ValueError("the extended collision block is studied for entangled projectile pairs")
    if params.scenario is not Scenario.COLLECTIVE:
        raise ValueError("the extended collision block is collective")


def extended_block_map(rho_S: np.ndarray, params: BathParams) -> np.ndarray:
    """One extended collective collision with a fresh two-pair block rho_E x rho_E."""
    _require_entangled_pair(params)
    pair = projectile_state(params)
    u = extended_collective_unitary(params.J, params.tau)
    assert u.scenario == EXTENDED_COLLECTIVE
    return single_collision_map(np.asarray(rho_S, dtype=complex), tensor_product(pair, pair), u)


def extended_block_steady_state(params: BathParams) -> np.ndarray:
    """Diagonal fixed point of the extended-block channel (populations sector).

    The channel restricted to diagonal states is affine in the excited
    population, so the fixed point is exact.
    """
    _require_entangled_pair(params)
    out_g = extended_block_map(np.diag([1.0, 0.0]).astype(complex), params)
    out_e = extended_block_map(np.diag([0.0, 1.0]).astype(complex), params)
    a = out_g[1, 1].real
    b = out_e[1, 1].real - a
    ree = a / (1.0 - b)
    return np.diag([1.0 - ree, ree]).astype(complex)
