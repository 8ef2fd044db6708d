"""Exchange interaction and the sequential / collective / extended collision unitaries.

The pair interaction J(sx sx + sy sy) conserves the total excitation number,
so every unitary built here commutes with the total free Hamiltonian of
identical qubits and the collisions are energy preserving.  All channels are
computed with the interaction unitaries only (interaction picture); for the
populations and the equal-energy coherences reported by this package the
Schroedinger-picture free phase cancels.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .qmath import partial_trace, tensor_product, unitary_from_hamiltonian
from .states import QubitSpec, Scenario

__all__ = [
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "CollisionUnitary",
    "pair_interaction_hamiltonian",
    "sequential_unitary",
    "collective_unitary",
    "extended_collective_unitary",
    "single_collision_map",
    "total_free_hamiltonian",
]

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

EXTENDED_COLLECTIVE = "extended_collective"


def _embed_two_qubit(op4: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Act ``op4`` on qubits (i, j) of an n-qubit register, identity elsewhere."""
    others = [q for q in range(n) if q not in (i, j)]
    cur = [i, j] + others  # logical qubit carried by each axis of kron(op4, I)
    perm = [cur.index(q) for q in range(n)]
    full = np.kron(op4, np.eye(2 ** (n - 2), dtype=complex))
    t = full.reshape([2] * (2 * n))
    t = t.transpose(perm + [p + n for p in perm])
    return np.ascontiguousarray(t.reshape(2**n, 2**n))


def pair_interaction_hamiltonian(J: float, target_pair: tuple[int, int], n_qubits: int) -> np.ndarray:
    """J (sx sx + sy sy) on ``target_pair``, identity on the other qubits."""
    i, j = target_pair
    if n_qubits < 2 or n_qubits > 5:
        raise ValueError(f"n_qubits must be in 2..5, got {n_qubits}")
    if i == j or not (0 <= i < n_qubits) or not (0 <= j < n_qubits):
        raise ValueError(f"invalid qubit pair {target_pair} for {n_qubits} qubits")
    h2 = J * (tensor_product(SIGMA_X, SIGMA_X) + tensor_product(SIGMA_Y, SIGMA_Y))
    return _embed_two_qubit(h2, i, j, n_qubits)


@dataclass(frozen=True, eq=False)
class CollisionUnitary:
    """One collision propagator; ``matrix`` is shared and must not be mutated."""

    scenario: str
    J: float
    tau: float
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_duration(tau: float) -> float:
    if tau < 0:
        raise ValueError(f"collision duration must be nonnegative, got {tau}")
    return float(tau)


@functools.lru_cache(maxsize=256)
def _sequential_matrix(J: float, tau: float, order: str) -> np.ndarray:
    u_sb1 = unitary_from_hamiltonian(pair_interaction_hamiltonian(J, (0, 1), 3), tau / 2.0)
    u_sb2 = unitary_from_hamiltonian(pair_interaction_hamiltonian(J, (0, 2), 3), tau / 2.0)
    if order == "b2_first":
        return u_sb1 @ u_sb2
    if order == "b1_first":
        return u_sb2 @ u_sb1
    raise ValueError(f"order must be 'b2_first' or 'b1_first', got {order!r}")


def sequential_unitary(J: float, tau: float, order: str = "b2_first") -> CollisionUnitary:
    """Product of two half-duration two-qubit collisions on (S, B1, B2).

    The default order applies the S-B2 half first; the flag exists because the
    two orderings give identical target-qubit channels for the projectile
    families in scope (the pair states are swap symmetric).
    """
    tau = _check_duration(tau)
    return CollisionUnitary(Scenario.SEQUENTIAL.value, float(J), tau, _sequential_matrix(float(J), tau, order))


@functools.lru_cache(maxsize=256)
def _collective_matrix(J: float, tau: float) -> np.ndarray:
    h = pair_interaction_hamiltonian(J, (0, 1), 3) + pair_interaction_hamiltonian(J, (0, 2), 3)
    return unitary_from_hamiltonian(h, tau)


def collective_unitary(J: float, tau: float) -> CollisionUnitary:
    """exp(-i tau (H_SB1 + H_SB2)): simultaneous collision with both pair qubits."""
    tau = _check_duration(tau)
    return CollisionUnitary(Scenario.COLLECTIVE.value, float(J), tau, _collective_matrix(float(J), tau))


@functools.lru_cache(maxsize=64)
def _extended_collective_matrix(J: float, tau: float) -> np.ndarray:
    h = sum(pair_interaction_hamiltonian(J, (0, j), 5) for j in (1, 2, 3, 4))
    return unitary_from_hamiltonian(h, tau)


def extended_collective_unitary(J: float, tau: float) -> CollisionUnitary:
    """Collective collision block extended to two projectile pairs (S, B1..B4)."""
    tau = _check_duration(tau)
    return CollisionUnitary(EXTENDED_COLLECTIVE, float(J), tau, _extended_collective_matrix(float(J), tau))


def single_collision_map(rho_S: np.ndarray, rho_B: np.ndarray, u: CollisionUnitary) -> np.ndarray:
    """tr_B[U (rho_S x rho_B) U+]: one collision with a fresh projectile."""
    ds = rho_S.shape[0]
    db = rho_B.shape[0]
    if ds * db != u.dim:
        raise ValueError(f"dimension mismatch: system {ds} x bath {db} != unitary {u.dim}")
    joint = u.matrix @ tensor_product(rho_S, rho_B) @ u.matrix.conj().T
    return partial_trace(joint, keep=(0,), dims=[ds, db])


def total_free_hamiltonian(spec: QubitSpec, n_qubits: int) -> np.ndarray:
    """Sum of identical single-qubit Hamiltonians over the register (diagonal)."""
    idx = np.arange(2**n_qubits)
    n_exc = np.array([bin(k).count("1") for k in idx])
    diag = spec.E_g * (n_qubits - n_exc) + spec.E_e * n_exc
    return np.diag(diag).astype(complex)
