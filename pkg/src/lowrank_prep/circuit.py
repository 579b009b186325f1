"""Gate-level circuits over the alphabet {U(theta, phi, lam), CX}.

Qubit 0 is the most significant bit of the amplitude index.  ``U`` follows
the OpenQASM convention::

    U(theta, phi, lam) = [[cos(theta/2),            -e^{i lam} sin(theta/2)],
                          [e^{i phi} sin(theta/2),   e^{i(phi+lam)} cos(theta/2)]]

A circuit also records a global phase so that simulation is exact, not just
exact up to phase.
"""
from __future__ import annotations

import cmath
import functools
import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput

ELIDE_TOL = 1e-12


class U(NamedTuple):
    theta: float
    phi: float
    lam: float
    qubit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)


class CX(NamedTuple):
    control: int
    target: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.control, self.target)


Gate = U | CX


def u_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ]
    )


def u_params(mat: np.ndarray) -> tuple[float, float, float, float]:
    """Decompose a 2x2 unitary as ``exp(i*phase) * U(theta, phi, lam)``."""
    a, b = mat[0, 0], mat[0, 1]
    c, d = mat[1, 0], mat[1, 1]
    theta = 2 * math.atan2(abs(c), abs(a))
    if abs(a) > 1e-14:
        phase = cmath.phase(a)
    else:
        # cos(theta/2) == 0: only phi + lam is fixed by b, c.
        phase = cmath.phase(-b)
    if abs(c) > 1e-14:
        phi = cmath.phase(c) - phase
    else:
        phi = 0.0
    if abs(b) > 1e-14:
        lam = cmath.phase(-b) - phase
    else:
        lam = cmath.phase(d) - phase - phi
    return theta, _wrap(phi), _wrap(lam), phase


def _wrap(x: float) -> float:
    """Map an angle into (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def is_identity_u(g: U, tol: float = ELIDE_TOL) -> bool:
    return abs(g.theta) < tol and abs(_wrap(g.phi + g.lam)) < tol


class Circuit:
    """Ordered list of gates on ``width`` qubits plus a global phase.

    Built by appending; treat as immutable once handed to another owner.
    """

    def __init__(self, width: int, gates: Iterable[Gate] = (), global_phase: float = 0.0):
        if width < 1:
            raise InvalidInput(f"circuit width must be >= 1, got {width}")
        self.width = width
        self.gates: list[Gate] = []
        self.global_phase = float(global_phase)
        for g in gates:
            self.append(g)

    def __repr__(self):
        return (
            f"Circuit(width={self.width}, gates={len(self.gates)}, "
            f"cnots={self.cnot_count()}, global_phase={self.global_phase:.6g})"
        )

    def __len__(self):
        return len(self.gates)

    def __eq__(self, other):
        if not isinstance(other, Circuit):
            return NotImplemented
        return (
            self.width == other.width
            and self.gates == other.gates
            and self.global_phase == other.global_phase
        )

    def append(self, g: Gate) -> None:
        for q in g.qubits:
            if not 0 <= q < self.width:
                raise InvalidInput(f"qubit {q} out of range for width {self.width}")
        if isinstance(g, CX) and g.control == g.target:
            raise InvalidInput("CX control and target coincide")
        self.gates.append(g)

    def u(self, theta: float, phi: float, lam: float, qubit: int) -> None:
        self.append(U(float(theta), float(phi), float(lam), int(qubit)))

    def ry(self, theta: float, qubit: int) -> None:
        self.u(theta, 0.0, 0.0, qubit)

    def rz(self, theta: float, qubit: int) -> None:
        # Rz(t) = exp(-i t/2) U(0, 0, t)
        self.u(0.0, 0.0, theta, qubit)
        self.global_phase -= theta / 2

    def cx(self, control: int, target: int) -> None:
        self.append(CX(int(control), int(target)))

    def extend(self, other: "Circuit", qubits: Sequence[int] | None = None) -> None:
        """Append ``other``, mapping its local qubit ``i`` onto ``qubits[i]``."""
        if qubits is None:
            qubits = range(other.width)
        qubits = list(qubits)
        if len(qubits) != other.width:
            raise InvalidInput(f"need {other.width} target qubits, got {len(qubits)}")
        for g in other.gates:
            if isinstance(g, U):
                self.append(g._replace(qubit=qubits[g.qubit]))
            else:
                self.append(CX(qubits[g.control], qubits[g.target]))
        self.global_phase += other.global_phase

    def copy(self) -> "Circuit":
        return Circuit(self.width, self.gates, self.global_phase)

    def inverse(self) -> "Circuit":
        out = Circuit(self.width, global_phase=-self.global_phase)
        for g in reversed(self.gates):
            if isinstance(g, U):
                out.append(U(-g.theta, -g.lam, -g.phi, g.qubit))
            else:
                out.append(g)
        return out

    def cnot_count(self) -> int:
        return sum(isinstance(g, CX) for g in self.gates)

    def depth(self) -> int:
        level = [0] * self.width
        for g in self.gates:
            d = max(level[q] for q in g.qubits) + 1
            for q in g.qubits:
                level[q] = d
        return max(level, default=0)

    def simplified(self, tol: float = ELIDE_TOL) -> "Circuit":
        """Peephole pass: merge runs of one-qubit gates, drop identities, cancel adjacent CX pairs."""
        slots: list[Gate | None] = []
        stacks: list[list[int]] = [[] for _ in range(self.width)]
        phase = self.global_phase

        def top(q):
            return stacks[q][-1] if stacks[q] else None

        for g in self.gates:
            if isinstance(g, U):
                q = g.qubit
                i = top(q)
                if i is not None and isinstance(slots[i], U):
                    prev = slots[i]
                    mat = u_matrix(g.theta, g.phi, g.lam) @ u_matrix(prev.theta, prev.phi, prev.lam)
                    theta, phi, lam, ph = u_params(mat)
                    phase += ph
                    merged = U(theta, phi, lam, q)
                    if is_identity_u(merged, tol):
                        slots[i] = None
                        stacks[q].pop()
                    else:
                        slots[i] = merged
                    continue
                if is_identity_u(g, tol):
                    continue
                slots.append(g)
                stacks[q].append(len(slots) - 1)
            else:
                i, j = top(g.control), top(g.target)
                if i is not None and i == j and slots[i] == g:
                    slots[i] = None
                    stacks[g.control].pop()
                    stacks[g.target].pop()
                    continue
                slots.append(g)
                stacks[g.control].append(len(slots) - 1)
                stacks[g.target].append(len(slots) - 1)
        return Circuit(self.width, (g for g in slots if g is not None), _wrap(phase))


def cnot_count(c: Circuit) -> int:
    return c.cnot_count()


def depth(c: Circuit) -> int:
    return c.depth()


def apply_u(states: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Apply a 2x2 matrix to ``qubit`` of states stored as columns, shape ``(2**n, ...)``."""
    trail = states.shape[1:]
    t = states.reshape(2**qubit, 2, -1)
    return np.matmul(mat, t).reshape((2**n,) + trail)


@functools.lru_cache(maxsize=512)
def cx_permutation(control: int, target: int, n: int) -> np.ndarray:
    idx = np.arange(2**n)
    cbit, tbit = 1 << (n - 1 - control), 1 << (n - 1 - target)
    return np.where(idx & cbit, idx ^ tbit, idx)


def simulate(c: Circuit, start=None) -> np.ndarray:
    """Exact statevector after running ``c`` from ``start`` (default ``|0...0>``).

    ``start`` may be a batch shaped ``(..., 2**n)``; the result has the same shape.
    """
    n = c.width
    if start is None:
        start = np.zeros(2**n, dtype=complex)
        start[0] = 1.0
    start = np.asarray(start, dtype=complex)
    if start.shape[-1] != 2**n:
        raise InvalidInput(f"start state length {start.shape[-1]} does not match width {n}")
    lead = start.shape[:-1]
    state = np.ascontiguousarray(start.reshape(-1, 2**n).T)
    for g in c.gates:
        if isinstance(g, U):
            state = apply_u(state, u_matrix(g.theta, g.phi, g.lam), g.qubit, n)
        else:
            state = state[cx_permutation(g.control, g.target, n)]
    return (state.T * cmath.exp(1j * c.global_phase)).reshape(lead + (2**n,))


def unitary(c: Circuit) -> np.ndarray:
    """Dense matrix of the circuit (column ``j`` is the image of basis state ``j``)."""
    dim = 2**c.width
    return simulate(c, np.eye(dim, dtype=complex)).T
