"""Independent brute-force oracles used by the test suite.

Deliberately shares no code with the package: embeddings are built by looping
over basis-state bit patterns, partial traces by explicit index sums, and the
measurement optimization by an exhaustive angle grid.  Values frozen into the
tests were computed with these routines.
"""

from __future__ import annotations

import numpy as np

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI = np.array([SX, SY, [[1, 0], [0, -1]]], dtype=complex)


def kron_chain(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = np.kron(out, m)
    return out


def embed_pair_loop(op4, i, j, n):
    dim = 2**n
    out = np.zeros((dim, dim), dtype=complex)
    for r in range(dim):
        rb = [(r >> (n - 1 - k)) & 1 for k in range(n)]
        for c in range(dim):
            cb = [(c >> (n - 1 - k)) & 1 for k in range(n)]
            if all(rb[k] == cb[k] for k in range(n) if k not in (i, j)):
                out[r, c] = op4[(rb[i] << 1) | rb[j], (cb[i] << 1) | cb[j]]
    return out


def pair_hamiltonian(J, i, j, n):
    return embed_pair_loop(J * (np.kron(SX, SX) + np.kron(SY, SY)), i, j, n)


def expm_hermitian(h, t):
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def ptrace_loop(rho, keep, dims):
    """Partial trace by explicit index summation."""
    n = len(dims)
    keep = sorted(keep)
    traced = [q for q in range(n) if q not in keep]
    d_keep = int(np.prod([dims[q] for q in keep]))
    shaped = rho.reshape(list(dims) + list(dims))
    out = np.zeros((d_keep, d_keep), dtype=complex)

    def unravel(flat, subdims):
        idx = []
        for d in reversed(subdims):
            idx.append(flat % d)
            flat //= d
        return list(reversed(idx))

    keep_dims = [dims[q] for q in keep]
    trace_dims = [dims[q] for q in traced]
    d_tr = int(np.prod(trace_dims)) if traced else 1
    for a in range(d_keep):
        ia = unravel(a, keep_dims)
        for b in range(d_keep):
            ib = unravel(b, keep_dims)
            acc = 0.0 + 0.0j
            for m in range(d_tr):
                im = unravel(m, trace_dims) if traced else []
                row = [0] * n
                col = [0] * n
                for q, v in zip(keep, ia):
                    row[q] = v
                for q, v in zip(keep, ib):
                    col[q] = v
                for q, v in zip(traced, im):
                    row[q] = v
                    col[q] = v
                acc += shaped[tuple(row + col)]
            out[a, b] = acc
    return out


def sequential_unitary_loop(J, tau, b2_first=True):
    u_sb1 = expm_hermitian(pair_hamiltonian(J, 0, 1, 3), tau / 2)
    u_sb2 = expm_hermitian(pair_hamiltonian(J, 0, 2, 3), tau / 2)
    return u_sb1 @ u_sb2 if b2_first else u_sb2 @ u_sb1


def collective_unitary_loop(J, tau):
    return expm_hermitian(pair_hamiltonian(J, 0, 1, 3) + pair_hamiltonian(J, 0, 2, 3), tau)


def collision_channel(rho_s, rho_b, u):
    nb = int(np.log2(rho_b.shape[0]))
    joint = u @ np.kron(rho_s, rho_b) @ u.conj().T
    return ptrace_loop(joint, [0], [2] + [2] * nb)


def gibbs_pair(beta, e_g=1.0, e_e=2.0):
    w = np.exp(-beta * np.array([e_g, e_e]))
    w = w / w.sum()
    return float(w[0]), float(w[1])


def entropy_nats(rho):
    w = np.clip(np.linalg.eigvalsh(rho).real, 0.0, None)
    w = w[w > 0]
    return float(-(w * np.log(w)).sum())


def conditional_entropy(rho4, theta, phi):
    """Average post-measurement entropy of qubit A for one measurement on B."""
    n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    ndot = sum(nk * pk for nk, pk in zip(n, PAULI))
    total = 0.0
    for sign in (+1, -1):
        proj = (np.eye(2) + sign * ndot) / 2
        op = np.kron(np.eye(2), proj)
        sub = op @ rho4 @ op
        pk = float(np.trace(sub).real)
        if pk <= 1e-14:
            continue
        cond = ptrace_loop(sub, [0], [2, 2]) / pk
        total += pk * entropy_nats(cond)
    return total


def classical_correlations_grid(rho4, n_theta=181, n_phi=361, refine_rounds=4):
    """Exhaustive-grid + golden-section oracle for classical correlations."""
    thetas = np.linspace(0, np.pi, n_theta)
    phis = np.linspace(0, 2 * np.pi, n_phi)
    best = np.inf
    arg = (0.0, 0.0)
    for th in thetas:
        for ph in phis:
            v = conditional_entropy(rho4, th, ph)
            if v < best:
                best, arg = v, (th, ph)
    th, ph = arg

    def golden(f, lo, hi, tol=1e-10):
        invphi = (np.sqrt(5) - 1) / 2
        a, b = lo, hi
        c, d = b - invphi * (b - a), a + invphi * (b - a)
        fc, fd = f(c), f(d)
        while b - a > tol:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = f(d)
        return (a + b) / 2

    step = float(thetas[1] - thetas[0])
    for _ in range(refine_rounds):
        th = golden(lambda x: conditional_entropy(rho4, x, ph), max(0, th - step), min(np.pi, th + step))
        ph = golden(lambda x: conditional_entropy(rho4, th, x), ph - step, ph + step)
    s_a = entropy_nats(ptrace_loop(rho4, [0], [2, 2]))
    return s_a - conditional_entropy(rho4, th, ph)
