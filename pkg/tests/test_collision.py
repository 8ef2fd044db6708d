from __future__ import annotations

import numpy as np
import pytest

from qrayleigh.collision import (
    collective_unitary,
    extended_collective_unitary,
    pair_interaction_hamiltonian,
    sequential_unitary,
    single_collision_map,
    total_free_hamiltonian,
)
from qrayleigh.qmath import tensor_product, unitary_from_hamiltonian, validate_density_matrix
from qrayleigh.states import (
    BathParams,
    ProjectileKind,
    QubitSpec,
    Scenario,
    coherence_bounds,
    projectile_state,
    thermal_qubit,
)

from conftest import random_bath
from oracle_tools import collision_channel, pair_hamiltonian, sequential_unitary_loop


def test_zero_coupling_hamiltonian_is_zero():
    assert np.abs(pair_interaction_hamiltonian(0.0, (0, 1), 3)).max() == 0.0


def test_two_qubit_exchange_structure():
    # sx sx + sy sy = 2(|ge><eg| + h.c.): exactly two entries, both 2J
    h = pair_interaction_hamiltonian(0.7, (0, 1), 2)
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 2] = expected[2, 1] = 2 * 0.7
    assert np.abs(h - expected).max() < 1e-15
    assert abs(np.trace(h)) == 0.0


def test_embedding_matches_loop_oracle():
    for (i, j, n) in ((0, 1, 3), (0, 2, 3), (1, 2, 3), (0, 3, 4), (2, 4, 5)):
        got = pair_interaction_hamiltonian(1.3, (i, j), n)
        ref = pair_hamiltonian(1.3, i, j, n)
        assert np.abs(got - ref).max() < 1e-15


def test_excitation_number_commutes():
    h = pair_interaction_hamiltonian(1.0, (0, 1), 2)
    sz_tot = np.diag([2.0, 0.0, 0.0, -2.0]).astype(complex)  # sz(0) + sz(1)
    assert np.abs(h @ sz_tot - sz_tot @ h).max() == 0.0


def test_invalid_pair_indices_rejected():
    for pair, n in (((0, 0), 3), ((0, 3), 3), ((-1, 1), 3)):
        with pytest.raises(ValueError):
            pair_interaction_hamiltonian(1.0, pair, n)
    with pytest.raises(ValueError):
        pair_interaction_hamiltonian(1.0, (0, 1), 6)


@pytest.mark.parametrize("builder", [sequential_unitary, collective_unitary])
def test_zero_duration_is_identity(builder):
    u = builder(1.0, 0.0)
    assert np.abs(u.matrix - np.eye(8)).max() < 1e-15


def test_unitarity_and_energy_conservation_random(rng):
    h_tot = total_free_hamiltonian(QubitSpec(), 3)
    for _ in range(8):
        j_tau = float(rng.uniform(0.01, 2.8))
        for u in (sequential_unitary(1.0, j_tau), collective_unitary(1.0, j_tau)):
            m = u.matrix
            assert np.abs(m @ m.conj().T - np.eye(8)).max() < 1e-12
            assert np.abs(m @ h_tot - h_tot @ m).max() < 1e-10


def test_sequential_full_swap_structure():
    # each tau/2 factor rotates its single-excitation block by J tau
    u = sequential_unitary(1.0, np.pi).matrix
    ket_egg = np.zeros(8)
    ket_egg[4] = 1.0  # |e g g>
    out = u @ ket_egg
    # J tau = pi per half collision: each two-qubit factor is a full swap of
    # the pair; amplitudes must stay inside the single-excitation sector
    probs = np.abs(out) ** 2
    assert probs[[4, 2, 1]].sum() == pytest.approx(1.0, abs=1e-12)
    assert np.abs(sequential_unitary_loop(1.0, np.pi) - u).max() < 1e-12


def test_sequential_matches_loop_oracle(rng):
    for _ in range(5):
        j_tau = float(rng.uniform(0.05, 2.0))
        assert np.abs(sequential_unitary(1.0, j_tau).matrix - sequential_unitary_loop(1.0, j_tau)).max() < 1e-13


def test_sequential_order_flag_changes_matrix_not_channel(rng):
    j_tau = 0.83
    u_default = sequential_unitary(1.0, j_tau, order="b2_first")
    u_flipped = sequential_unitary(1.0, j_tau, order="b1_first")
    assert np.abs(u_default.matrix - u_flipped.matrix).max() > 1e-3
    # in-scope projectile states are swap symmetric: same target-qubit channel
    for _ in range(6):
        params = random_bath(rng)
        rho_b = projectile_state(params)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho_s = a @ a.conj().T
        rho_s /= np.trace(rho_s)
        out1 = single_collision_map(rho_s, rho_b, u_default)
        out2 = single_collision_map(rho_s, rho_b, u_flipped)
        assert np.abs(out1 - out2).max() < 1e-14


def test_sequential_rejects_unknown_order():
    with pytest.raises(ValueError):
        sequential_unitary(1.0, 0.5, order="simultaneous")


def test_collective_zero_rate_point():
    # at tau = pi / (2 sqrt(2) J) the collective factor sin^2(2 sqrt2 J tau) vanishes
    j = 1.0
    tau = np.pi / (2 * np.sqrt(2) * j)
    eta = np.sin(2 * np.sqrt(2) * j * tau) ** 2
    assert eta < 1e-30
    u = collective_unitary(j, tau)
    rho_s = np.diag([0.0, 1.0]).astype(complex)
    params = BathParams(kind=ProjectileKind.CLASSICAL, beta_B=2.0, tau=tau)
    out = single_collision_map(rho_s, projectile_state(params), u)
    assert abs(out[0, 0].real) < 1e-12  # no de-excitation: zero effective rate


def test_extended_block_identity_and_excitation_conservation():
    u = extended_collective_unitary(1.0, 0.0)
    assert np.abs(u.matrix - np.eye(32)).max() < 1e-15
    u = extended_collective_unitary(1.0, 0.37)
    n_exc = np.diag([bin(k).count("1") for k in range(32)]).astype(complex)
    assert np.abs(u.matrix @ n_exc - n_exc @ u.matrix).max() < 1e-10
    assert np.abs(u.matrix @ u.matrix.conj().T - np.eye(32)).max() < 1e-12


def test_extended_block_mu_sensitivity():
    # with two entangled pairs the channel output depends on mu
    beta = 2.0
    mu_max = coherence_bounds(ProjectileKind.ENTANGLED, beta)[1]
    u = extended_collective_unitary(1.0, 0.2)
    rho_s = thermal_qubit(beta)
    outs = []
    for mu in (0.0, mu_max):
        pair = projectile_state(BathParams(kind=ProjectileKind.ENTANGLED, beta_B=beta, coherence=mu))
        outs.append(single_collision_map(rho_s, tensor_product(pair, pair), u))
    assert np.abs(outs[0] - outs[1]).max() > 1e-6


def test_identity_collision_leaves_state(rng):
    params = random_bath(rng)
    rho_b = projectile_state(params)
    u = collective_unitary(1.0, 0.0)
    rho_s = thermal_qubit(1.7)
    assert np.abs(single_collision_map(rho_s, rho_b, u) - rho_s).max() < 1e-14


def test_single_pair_entangled_coherence_is_inert_on_thermal_input():
    beta = 2.0
    mu_max = coherence_bounds(ProjectileKind.ENTANGLED, beta)[1]
    rho_s = thermal_qubit(1.1)
    for scenario, u in (
        (Scenario.COLLECTIVE, collective_unitary(1.0, 0.4)),
        (Scenario.SEQUENTIAL, sequential_unitary(1.0, 0.4)),
    ):
        ref = None
        for mu in (0.0, 0.3 * mu_max, -mu_max):
            params = BathParams(kind=ProjectileKind.ENTANGLED, beta_B=beta, coherence=mu, scenario=scenario)
            out = single_collision_map(rho_s, projectile_state(params), u)
            if ref is None:
                ref = out
            assert np.abs(out - ref).max() < 1e-12


def test_thermal_fixed_point_at_bath_temperature():
    # detailed balance: Gibbs qubit + product bath at the same temperature is invariant
    beta = 2.0
    params = BathParams(kind=ProjectileKind.DISCORDANT, beta_B=beta, coherence=0.0, tau=0.9)
    rho_s = thermal_qubit(beta)
    for u in (sequential_unitary(1.0, 0.9), collective_unitary(1.0, 0.9)):
        out = single_collision_map(rho_s, projectile_state(params), u)
        assert np.abs(out - rho_s).max() < 1e-14


def test_diagonal_sector_closed(rng):
    for _ in range(10):
        params = random_bath(rng)
        u = collective_unitary(1.0, params.tau) if params.scenario is Scenario.COLLECTIVE else sequential_unitary(1.0, params.tau)
        d = float(rng.uniform(0.05, 0.95))
        out = single_collision_map(np.diag([1 - d, d]).astype(complex), projectile_state(params), u)
        assert abs(out[0, 1]) < 1e-12 and abs(out[1, 0]) < 1e-12
        assert validate_density_matrix(out).passed


def test_sequential_lambda_zero_factorizes(rng):
    # product bath: the three-qubit channel equals two independent two-qubit collisions
    beta = 1.4
    params = BathParams(kind=ProjectileKind.DISCORDANT, beta_B=beta, coherence=0.0, tau=0.6)
    rho_b = projectile_state(params)
    u3 = sequential_unitary(1.0, params.tau)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    rho_s = a @ a.conj().T
    rho_s /= np.trace(rho_s)
    out3 = single_collision_map(rho_s, rho_b, u3)

    th = thermal_qubit(beta)
    u2 = unitary_from_hamiltonian(pair_interaction_hamiltonian(1.0, (0, 1), 2), params.tau / 2)

    def collide_once(rho):
        joint = u2 @ tensor_product(rho, th) @ u2.conj().T
        return np.array(
            [[joint[0, 0] + joint[1, 1], joint[0, 2] + joint[1, 3]],
             [joint[2, 0] + joint[3, 1], joint[2, 2] + joint[3, 3]]]
        )

    assert np.abs(out3 - collide_once(collide_once(rho_s))).max() < 1e-13


def test_channel_matches_loop_oracle(rng):
    for _ in range(4):
        params = random_bath(rng)
        u = collective_unitary(1.0, params.tau) if params.scenario is Scenario.COLLECTIVE else sequential_unitary(1.0, params.tau)
        rho_b = projectile_state(params)
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho_s = a @ a.conj().T
        rho_s /= np.trace(rho_s)
        ref = collision_channel(rho_s, rho_b, u.matrix)
        got = single_collision_map(rho_s, rho_b, u)
        assert np.abs(got - ref).max() < 1e-14


def test_dimension_mismatch_rejected():
    u = collective_unitary(1.0, 0.3)
    with pytest.raises(ValueError):
        single_collision_map(np.eye(2) / 2, np.eye(8) / 8, u)


def test_unitary_cache_returns_same_object():
    a = collective_unitary(1.0, 0.3)
    b = collective_unitary(1.0, 0.3)
    assert a.matrix is b.matrix
