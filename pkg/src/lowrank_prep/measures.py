"""Entanglement quantifiers computed from Schmidt spectra."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInput
from .linalg import DEFAULT_TOL, Bipartition, as_state, num_qubits, schmidt_decompose


@dataclass(frozen=True)
class MeasureReport:
    purity: float
    schmidt_rank: int
    schmidt_measure: float
    m_qubits: int
    meyer_wallach: float

    def to_dict(self) -> dict:
        return asdict(self)


def purity_from_sigma(sigma: Sequence[float]) -> float:
    """Purity ``Tr(rho_A**2) = sum sigma_i**4`` of either reduced state."""
    s = np.asarray(sigma, dtype=float)
    norm2 = float(np.sum(s**2))
    if abs(norm2 - 1.0) > 1e-8:
        raise InvalidInput(f"Schmidt spectrum is not normalized (sum sigma^2 = {norm2!r})")
    return float(np.sum(s**4))


def schmidt_measure(rank: int) -> float:
    """Schmidt measure in e-bits."""
    if rank < 1:
        raise InvalidInput(f"rank must be >= 1, got {rank}")
    return math.log2(rank)


def m_of(rank: int) -> int:
    """Number of qubits needed to hold ``rank`` Schmidt coefficients."""
    if rank < 1:
        raise InvalidInput(f"rank must be >= 1, got {rank}")
    return (rank - 1).bit_length()


def single_qubit_purities(psi) -> np.ndarray:
    v = as_state(psi)
    n = num_qubits(v)
    out = np.empty(n)
    for k in range(n):
        bp = Bipartition((k,), tuple(q for q in range(n) if q != k))
        out[k] = np.sum(schmidt_decompose(v, bp).sigma ** 4)
    return out


def meyer_wallach(psi) -> float:
    v = as_state(psi)
    if num_qubits(v) < 2:
        raise InvalidInput("Meyer-Wallach measure needs at least two qubits")
    q = 2.0 * (1.0 - float(np.mean(single_qubit_purities(v))))
    return min(1.0, max(0.0, q))


def fidelity(a, b) -> float:
    """``|<a|b>|**2`` for two normalized states of equal length."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise InvalidInput(f"dimension mismatch: {a.size} vs {b.size}")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def measure_report(psi, bp: Bipartition | None = None, tol: float = DEFAULT_TOL) -> MeasureReport:
    v = as_state(psi)
    n = num_qubits(v)
    bp = bp or Bipartition.half(n)
    sd = schmidt_decompose(v, bp, tol)
    return MeasureReport(
        purity=purity_from_sigma(sd.sigma),
        schmidt_rank=sd.rank,
        schmidt_measure=schmidt_measure(sd.rank),
        m_qubits=m_of(sd.rank),
        meyer_wallach=meyer_wallach(v),
    )
