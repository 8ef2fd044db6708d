"""Dense complex linear algebra for small multi-qubit Hilbert spaces (dim 2..32).

Conventions: hbar = k_B = 1; basis |g> -> 0, |e> -> 1; in multi-qubit kets the
leftmost qubit is the most significant index, matching ``numpy.kron`` order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "tensor_product",
    "partial_trace",
    "unitary_from_hamiltonian",
    "validate_density_matrix",
    "require_density_matrix",
    "ValidationReport",
]

HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-12
POSITIVITY_TOL = 1e-10


def _as_square(m: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {a.shape}")
    return a


def _qubit_count(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with the left factor as the more significant subsystem."""
    return np.kron(_as_square(a, "a"), _as_square(b, "b"))


def partial_trace(rho: np.ndarray, keep, dims=None) -> np.ndarray:
    """Reduce ``rho`` to the subsystems in ``keep`` (original subsystem order).

    ``dims`` defaults to an all-qubit factorization inferred from the matrix
    size. Trace and Hermiticity are preserved by construction.
    """
    r = _as_square(rho, "rho")
    if dims is None:
        dims = [2] * _qubit_count(r.shape[0])
    dims = list(dims)
    if int(np.prod(dims)) != r.shape[0]:
        raise ValueError(f"dims {dims} do not factor dimension {r.shape[0]}")
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep must name at least one subsystem")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")

    n = len(dims)
    t = r.reshape(dims + dims)
    # Contract traced subsystems one at a time, rightmost first so axis
    # numbering of the remaining subsystems stays valid.
    removed = 0
    for q in reversed(range(n)):
        if q in keep:
            continue
        t = np.trace(t, axis1=q, axis2=q + n - removed)
        removed += 1
    d_keep = int(np.prod([dims[q] for q in keep]))
    return t.reshape(d_keep, d_keep)


def unitary_from_hamiltonian(h: np.ndarray, t: float) -> np.ndarray:
    """exp(-i t h) via full Hermitian eigendecomposition."""
    hm = _as_square(h, "h")
    dev = float(np.abs(hm - hm.conj().T).max())
    if dev > HERMITICITY_TOL:
        raise ValueError(f"hamiltonian is not Hermitian (max deviation {dev:.3e})")
    w, v = np.linalg.eigh(hm)
    return (v * np.exp(-1j * float(t) * w)) @ v.conj().T


@dataclass(frozen=True)
class ValidationReport:
    """Per-invariant verdicts for a candidate density matrix."""

    trace_deviation: float
    hermiticity_deviation: float
    min_eigenvalue: float
    tol: float
    trace_ok: bool
    hermitian_ok: bool
    positive_ok: bool

    @property
    def passed(self) -> bool:
        return self.trace_ok and self.hermitian_ok and self.positive_ok


def validate_density_matrix(rho: np.ndarray, tol: float = POSITIVITY_TOL) -> ValidationReport:
    """Report trace, Hermiticity and positivity deviations of ``rho`` at ``tol``."""
    r = _as_square(rho, "rho")
    trace_dev = abs(np.trace(r) - 1.0)
    herm_dev = float(np.abs(r - r.conj().T).max())
    min_eig = float(np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0])
    return ValidationReport(
        trace_deviation=float(trace_dev),
        hermiticity_deviation=herm_dev,
        min_eigenvalue=min_eig,
        tol=float(tol),
        trace_ok=trace_dev <= tol,
        hermitian_ok=herm_dev <= tol,
        positive_ok=min_eig >= -tol,
    )


def require_density_matrix(rho: np.ndarray, tol: float = POSITIVITY_TOL) -> np.ndarray:
    """Validate ``rho`` and return it; raise ``ValueError`` on failure."""
    report = validate_density_matrix(rho, tol)
    if not report.passed:
        raise ValueError(
            "invalid density matrix: "
            f"trace deviation {report.trace_deviation:.3e}, "
            f"hermiticity deviation {report.hermiticity_deviation:.3e}, "
            f"min eigenvalue {report.min_eigenvalue:.3e} (tol {tol:g})"
        )
    return np.asarray(rho, dtype=complex)
