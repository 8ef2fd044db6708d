"""Coherence and correlation quantifiers for the projectile pair states.

Entropic quantities are returned in nats unless a ``units`` argument says
otherwise.  Classical correlations follow the measurement-based definition:
the maximum over projective measurements on the second qubit of the average
entropy reduction of the first; discord is mutual information minus that
maximum.  The optimizer runs a 5-degree Bloch-angle grid followed by
golden-section coordinate refinement to 1e-9 in angle, which is sufficient
for the X-shaped two-qubit states this package produces.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qmath import partial_trace, require_density_matrix

__all__ = [
    "MeasureId",
    "OptimizerInfo",
    "MeasureResult",
    "MeasureOptimizationError",
    "von_neumann_entropy",
    "l1_coherence",
    "rel_entropy_coherence",
    "classical_correlations",
    "quantum_discord",
    "mutual_information",
    "entanglement_of_formation",
    "concurrence",
]

_LN2 = math.log(2.0)
_PAULI = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)
_SY_SY = np.kron(_PAULI[1], _PAULI[1])


class MeasureId(enum.Enum):
    CLASSICAL_CORRELATIONS = "classical_correlations"
    QUANTUM_DISCORD = "quantum_discord"


class MeasureOptimizationError(RuntimeError):
    """Measurement optimization failed to settle; carries the best value found."""

    def __init__(self, message: str, best_value: float):
        super().__init__(message)
        self.best_value = best_value


@dataclass(frozen=True)
class OptimizerInfo:
    theta: float
    phi: float
    residual: float


@dataclass(frozen=True)
class MeasureResult:
    value: float
    measure_id: MeasureId
    optimizer_info: OptimizerInfo


def _eigvals_clipped(rho: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(rho)
    return np.clip(w.real, 0.0, None)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-tr[rho ln rho] with 0 ln 0 := 0 (nats)."""
    r = require_density_matrix(rho)
    w = _eigvals_clipped(r)
    w = w[w > 0.0]
    return float(-(w * np.log(w)).sum())


def l1_coherence(rho: np.ndarray) -> float:
    """Sum of the absolute off-diagonal entries in the energy eigenbasis."""
    r = require_density_matrix(rho)
    off = ~np.eye(r.shape[0], dtype=bool)
    return float(np.abs(r[off]).sum())


def rel_entropy_coherence(rho: np.ndarray) -> float:
    """Entropy of the dephased state minus the entropy of the state."""
    r = require_density_matrix(rho)
    if np.abs(r[~np.eye(r.shape[0], dtype=bool)]).max() == 0.0:
        return 0.0
    diag = np.clip(np.diag(r).real, 0.0, None)
    diag = diag[diag > 0.0]
    s_diag = float(-(diag * np.log(diag)).sum())
    w = _eigvals_clipped(r)
    w = w[w > 0.0]
    return max(0.0, s_diag - float(-(w * np.log(w)).sum()))


def _entropy_weights(w: np.ndarray) -> float:
    w = w[w > 0.0]
    return float(-(w * np.log(w)).sum())


def _conditional_entropy_grid(rho4: np.ndarray, thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Average post-measurement entropy of qubit A for measurements n(theta, phi) on B.

    Vectorized over the angle grid; returns an array of shape (len(thetas), len(phis)).
    """
    t, p = np.meshgrid(thetas, phis, indexing="ij")
    n = np.stack(
        [np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)],
        axis=-1,
    ).reshape(-1, 3)
    ndots = np.einsum("gk,kij->gij", n, _PAULI)
    eye = np.eye(2, dtype=complex)
    proj = np.stack([(eye + ndots) / 2.0, (eye - ndots) / 2.0], axis=1)  # (G, 2, 2, 2)
    blocks = rho4.reshape(2, 2, 2, 2)  # (a, b, a', b')
    cond = np.einsum("abcd,gkdb->gkac", blocks, proj)  # unnormalized conditionals
    pk = np.einsum("gkaa->gk", cond).real
    m00 = cond[..., 0, 0].real
    m11 = cond[..., 1, 1].real
    rad = np.sqrt(((m00 - m11) / 2.0) ** 2 + np.abs(cond[..., 0, 1]) ** 2)
    e_hi = np.clip((m00 + m11) / 2.0 + rad, 0.0, None)
    e_lo = np.clip((m00 + m11) / 2.0 - rad, 0.0, None)

    def xlx(v: np.ndarray) -> np.ndarray:
        return np.where(v > 0.0, v * np.log(np.where(v > 0.0, v, 1.0)), 0.0)

    # sum_k p_k S(M_k / p_k) = -sum e ln e + sum p_k ln p_k
    out = -(xlx(e_hi) + xlx(e_lo)).sum(axis=1) + xlx(pk).sum(axis=1)
    return out.reshape(t.shape)


def _golden_min(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _minimize_conditional_entropy(
    rho4: np.ndarray,
    grid_step_deg: float = 5.0,
    angle_tol: float = 1e-9,
    max_passes: int = 8,
) -> tuple[float, OptimizerInfo]:
    thetas = np.linspace(0.0, math.pi, int(round(180.0 / grid_step_deg)) + 1)
    phis = np.linspace(0.0, 2.0 * math.pi, 2 * int(round(180.0 / grid_step_deg)) + 1)
    grid = _conditional_entropy_grid(rho4, thetas, phis)
    i, j = np.unravel_index(int(np.argmin(grid)), grid.shape)
    theta, phi = float(thetas[i]), float(phis[j])
    best = float(grid[i, j])
    window = math.radians(grid_step_deg)

    def f_theta(x: float) -> float:
        return float(_conditional_entropy_grid(rho4, np.array([x]), np.array([phi]))[0, 0])

    def f_phi(x: float) -> float:
        return float(_conditional_entropy_grid(rho4, np.array([theta]), np.array([x]))[0, 0])

    residual = math.inf
    for _ in range(max_passes):
        theta, v1 = _golden_min(f_theta, max(0.0, theta - window), min(math.pi, theta + window), angle_tol)
        phi, v2 = _golden_min(f_phi, phi - window, phi + window, angle_tol)
        value = min(v1, v2)
        residual = best - value
        best = min(best, value)
        window = max(10.0 * angle_tol, window / 4.0)
        if abs(residual) < 1e-13:
            break
    else:
        if abs(residual) > 1e-10:
            raise MeasureOptimizationError(
                f"measurement optimization did not settle (last improvement {residual:.3e})",
                best_value=best,
            )
    return best, OptimizerInfo(theta=theta, phi=phi, residual=abs(residual))


def _require_two_qubit(rho: np.ndarray) -> np.ndarray:
    r = require_density_matrix(rho)
    if r.shape != (4, 4):
        raise ValueError(f"expected a two-qubit (4x4) state, got shape {r.shape}")
    return r


def mutual_information(rho_AB: np.ndarray) -> float:
    r = _require_two_qubit(rho_AB)
    s_a = _entropy_weights(_eigvals_clipped(partial_trace(r, (0,))))
    s_b = _entropy_weights(_eigvals_clipped(partial_trace(r, (1,))))
    s_ab = _entropy_weights(_eigvals_clipped(r))
    return s_a + s_b - s_ab


def classical_correlations(rho_AB: np.ndarray, grid_step_deg: float = 5.0) -> MeasureResult:
    """Maximum entropy reduction of A over projective measurements on B."""
    r = _require_two_qubit(rho_AB)
    s_a = _entropy_weights(_eigvals_clipped(partial_trace(r, (0,))))
    s_cond, info = _minimize_conditional_entropy(r, grid_step_deg)
    return MeasureResult(
        value=max(0.0, s_a - s_cond),
        measure_id=MeasureId.CLASSICAL_CORRELATIONS,
        optimizer_info=info,
    )


def quantum_discord(rho_AB: np.ndarray, grid_step_deg: float = 5.0) -> MeasureResult:
    """Mutual information minus classical correlations, clipped at -1e-10 -> 0."""
    cc = classical_correlations(rho_AB, grid_step_deg)
    value = mutual_information(rho_AB) - cc.value
    if value < -1e-10:
        raise MeasureOptimizationError(
            f"discord evaluated to {value:.3e} < -1e-10: measurement optimization failed",
            best_value=value,
        )
    return MeasureResult(
        value=max(0.0, value),
        measure_id=MeasureId.QUANTUM_DISCORD,
        optimizer_info=cc.optimizer_info,
    )


def concurrence(rho_AB: np.ndarray) -> float:
    """Wootters concurrence from the spin-flipped eigenvalues."""
    r = _require_two_qubit(rho_AB)
    rt = r @ _SY_SY @ r.conj() @ _SY_SY
    w = np.linalg.eigvals(rt)
    w = np.sqrt(np.clip(np.sort(w.real)[::-1], 0.0, None))
    return float(max(0.0, w[0] - w[1] - w[2] - w[3]))


def entanglement_of_formation(rho_AB: np.ndarray, units: str = "nats") -> float:
    """Wootters closed form: EoF = h((1 + sqrt(1 - C^2)) / 2)."""
    if units not in ("nats", "bits"):
        raise ValueError(f"units must be 'nats' or 'bits', got {units!r}")
    c = concurrence(rho_AB)
    x = 0.5 * (1.0 + math.sqrt(max(0.0, 1.0 - c * c)))
    if x in (0.0, 1.0):
        h = 0.0
    else:
        h = -(x * math.log(x) + (1.0 - x) * math.log(1.0 - x))
    return h / _LN2 if units == "bits" else h
