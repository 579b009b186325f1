"""Reference implementations used only by the tests.

Everything here is written independently of the package: dense Kronecker
products instead of reshaped tensor ops, bit loops instead of transposes.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from lowrank_prep.circuit import CX, U

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)


def u_gate(theta, phi, lam):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]]
    )


def kron_all(mats):
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def embed_1q(mat, q, n):
    return kron_all([mat if i == q else I2 for i in range(n)])


def embed_cx(c, t, n):
    off = kron_all([P0 if i == c else I2 for i in range(n)])
    on = kron_all([P1 if i == c else (X if i == t else I2) for i in range(n)])
    return off + on


def dense_unitary(circuit):
    n = circuit.width
    total = np.eye(2**n, dtype=complex)
    for g in circuit.gates:
        if isinstance(g, U):
            total = embed_1q(u_gate(g.theta, g.phi, g.lam), g.qubit, n) @ total
        else:
            total = embed_cx(g.control, g.target, n) @ total
    return total * np.exp(1j * circuit.global_phase)


def dense_state(circuit):
    return dense_unitary(circuit)[:, 0]


def bits(x, width):
    return [(x >> (width - 1 - i)) & 1 for i in range(width)]


def loop_matrix(psi, subset_a, subset_b):
    """Amplitude matrix built by spelling every global index bit by bit."""
    n = len(subset_a) + len(subset_b)
    m = np.zeros((2 ** len(subset_a), 2 ** len(subset_b)), dtype=complex)
    for idx in range(2**n):
        b = bits(idx, n)
        row = int("".join(str(b[q]) for q in subset_a), 2)
        col = int("".join(str(b[q]) for q in subset_b), 2)
        m[row, col] = psi[idx]
    return m


def reduced_density(psi, q):
    n = int(np.log2(len(psi)))
    rho = np.zeros((2, 2), dtype=complex)
    for i, j in itertools.product(range(2**n), repeat=2):
        bi, bj = bits(i, n), bits(j, n)
        if all(bi[k] == bj[k] for k in range(n) if k != q):
            rho[bi[q], bj[q]] += psi[i] * np.conj(psi[j])
    return rho


def meyer_wallach_dm(psi):
    n = int(np.log2(len(psi)))
    purities = [np.trace(reduced_density(psi, q) @ reduced_density(psi, q)).real for q in range(n)]
    return 2 * (1 - sum(purities) / n)


def haar_state(n, rng):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def haar_unitary(dim, rng):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def formula_estimate(n, m):
    """Four-case CNOT model, transcribed term by term with rationals."""
    k = n // 2 if n % 2 == 0 else (n - 1) // 2
    f = Fraction
    if m < k and n % 2 == 0:
        return (2**m - m - 1) + m + 2 * (f(2 ** (m + k)) - f(1, 24) * 2**k)
    if m < k:
        return (2**m - m - 1) + m + (f(2 ** (m + k)) - f(1, 24) * 2**k) + (
            f(2 ** (m + k + 1)) - f(1, 24) * 2 ** (k + 1)
        )
    if n % 2 == 0:
        return (2**k - k - 1) + k + 2 * (f(23, 48) * 4**k - f(3, 2) * 2**k + f(4, 3))
    return (
        (2**k - k - 1)
        + k
        + (f(23, 48) * 4**k - f(3, 2) * 2**k + f(4, 3))
        + (f(23, 48) * 4 ** (k + 1) - f(3, 2) * 2 ** (k + 1) + f(4, 3))
    )


def global_phase_free_fidelity(a, b):
    return abs(np.vdot(a, b)) ** 2
