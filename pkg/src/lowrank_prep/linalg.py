"""Schmidt decomposition of pure states over a qubit bipartition.

States are plain complex numpy vectors of length ``2**n``.  Qubit 0 is the
most significant bit of the amplitude index (big-endian), everywhere in the
package.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInput

#: Absolute cutoff on singular values when counting the Schmidt rank.
DEFAULT_TOL = 1e-10
NORM_TOL = 1e-10


def as_state(psi, norm_tol: float = NORM_TOL) -> np.ndarray:
    """Validate ``psi`` as a normalized state vector and return it as complex128."""
    v = np.asarray(psi, dtype=complex).ravel()
    size = v.size
    if size < 2 or size & (size - 1):
        raise InvalidInput(f"state length {size} is not a power of two >= 2")
    if not np.all(np.isfinite(v)):
        raise InvalidInput("state has non-finite amplitudes")
    norm2 = float(np.vdot(v, v).real)
    if abs(norm2 - 1.0) > norm_tol:
        raise InvalidInput(f"state is not normalized (|psi|^2 = {norm2!r})")
    return v


def num_qubits(psi: np.ndarray) -> int:
    return int(psi.size).bit_length() - 1


def random_state(n: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Random state with real and imaginary parts drawn uniformly from [0, 1), then normalized."""
    rng = np.random.default_rng(rng)
    v = rng.random(2**n) + 1j * rng.random(2**n)
    return v / np.linalg.norm(v)


def random_product_state(n: int, rng: np.random.Generator | int | None = None) -> np.ndarray:
    rng = np.random.default_rng(rng)
    v = np.ones(1, dtype=complex)
    for _ in range(n):
        v = np.kron(v, random_state(1, rng))
    return v


@dataclass(frozen=True)
class Bipartition:
    """Split of the qubits ``0..n-1`` into two nonempty ordered index sets."""

    subset_a: tuple[int, ...]
    subset_b: tuple[int, ...]

    def __post_init__(self):
        a, b = tuple(self.subset_a), tuple(self.subset_b)
        object.__setattr__(self, "subset_a", a)
        object.__setattr__(self, "subset_b", b)
        if not a or not b:
            raise InvalidInput("both sides of a bipartition must be nonempty")
        joined = a + b
        if len(set(joined)) != len(joined):
            raise InvalidInput(f"bipartition sides overlap: {a} | {b}")
        if sorted(joined) != list(range(len(joined))):
            raise InvalidInput(f"bipartition {a} | {b} does not cover 0..{len(joined) - 1}")

    @property
    def n(self) -> int:
        return len(self.subset_a) + len(self.subset_b)

    @classmethod
    def from_subset(cls, n: int, subset_a: Sequence[int]) -> "Bipartition":
        """Bipartition with the complement of ``subset_a`` on side B, sorted, smaller side first."""
        a = tuple(sorted(subset_a))
        if any(not 0 <= q < n for q in a):
            raise InvalidInput(f"qubit index out of range in {a} for n={n}")
        b = tuple(q for q in range(n) if q not in a)
        if len(a) > len(b):
            a, b = b, a
        return cls(a, b)

    @classmethod
    def half(cls, n: int) -> "Bipartition":
        """First ``n // 2`` qubits against the rest."""
        if n < 2:
            raise InvalidInput("need at least two qubits to bipartition")
        return cls(tuple(range(n // 2)), tuple(range(n // 2, n)))

    def swapped(self) -> "Bipartition":
        return Bipartition(self.subset_b, self.subset_a)


@dataclass(frozen=True)
class SchmidtDecomposition:
    """Full SVD of a reshaped state.

    ``sigma``, ``u`` and ``vh`` hold every singular triple, including the ones
    under ``tol``; ``rank`` counts the triples above it.  The state is
    ``sum_i sigma[i] * kron(u[:, i], vh[i, :])`` after the bipartition's
    index regrouping.
    """

    bipartition: Bipartition
    sigma: np.ndarray
    u: np.ndarray
    vh: np.ndarray
    rank: int
    tol: float = DEFAULT_TOL

    @property
    def left(self) -> np.ndarray:
        """Columns ``|alpha_i>`` for the first ``rank`` coefficients."""
        return self.u[:, : self.rank]

    @property
    def right(self) -> np.ndarray:
        """Columns ``|beta_i>`` for the first ``rank`` coefficients."""
        return self.vh[: self.rank].T


@dataclass(frozen=True)
class TruncationResult:
    decomposition: SchmidtDecomposition
    keep: int
    normalizer: float
    sigma_prime: np.ndarray
    loss: float


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = U @ diag(S) @ Vh`` with ``S`` descending."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise InvalidInput("svd expects a matrix")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    return np.linalg.svd(m, full_matrices=False)


def _axes(bp: Bipartition) -> list[int]:
    return list(bp.subset_a) + list(bp.subset_b)


def reshape_to_matrix(psi, bp: Bipartition) -> np.ndarray:
    """Arrange amplitudes as a ``2**|A| x 2**|B|`` matrix.

    Row index spells the A-qubit bits in ``bp.subset_a`` order, column index
    the B-qubit bits in ``bp.subset_b`` order.
    """
    v = np.asarray(psi, dtype=complex).ravel()
    n = num_qubits(v)
    if 2**n != v.size or bp.n != n:
        raise InvalidInput(f"bipartition over {bp.n} qubits does not match state of length {v.size}")
    t = v.reshape((2,) * n).transpose(_axes(bp))
    return t.reshape(2 ** len(bp.subset_a), 2 ** len(bp.subset_b))


def flatten_from_matrix(m: np.ndarray, bp: Bipartition) -> np.ndarray:
    """Inverse of :func:`reshape_to_matrix`."""
    n = bp.n
    t = np.asarray(m).reshape((2,) * n)
    return t.transpose(np.argsort(_axes(bp))).reshape(-1)


def schmidt_decompose(psi, bp: Bipartition, tol: float = DEFAULT_TOL) -> SchmidtDecomposition:
    v = as_state(psi)
    u, s, vh = svd(reshape_to_matrix(v, bp))
    s = s / np.linalg.norm(s)
    rank = max(1, int(np.count_nonzero(s > tol)))
    return SchmidtDecomposition(bp, s, u, vh, rank, tol)


def truncate(sd: SchmidtDecomposition, r: int) -> TruncationResult:
    """Keep the ``r`` largest Schmidt coefficients and renormalize.

    The loss is the discarded weight ``sum_{i>r} sigma_i**2``, which equals
    one minus the fidelity between the original and truncated states.
    """
    if r < 1:
        raise InvalidInput(f"truncation rank must be >= 1, got {r}")
    keep = min(r, sd.rank)
    kept = sd.sigma[:keep]
    if keep == sd.rank:
        loss = 0.0
    else:
        loss = float(np.sum(sd.sigma[keep:] ** 2))
    z = float(np.linalg.norm(kept))
    return TruncationResult(sd, keep, z, kept / z, loss)


def truncation_loss(sigma: Sequence[float], r: int) -> float:
    """Discarded weight of a bare spectrum, normalizing it first."""
    s = np.asarray(sigma, dtype=float)
    if r < 1:
        raise InvalidInput(f"truncation rank must be >= 1, got {r}")
    s2 = s**2 / np.sum(s**2)
    return float(np.sum(s2[r:]))


def reconstruct(sd: SchmidtDecomposition | TruncationResult) -> np.ndarray:
    """Reassemble the state from its Schmidt triples (renormalized when truncated)."""
    if isinstance(sd, TruncationResult):
        keep, coeffs, sd = sd.keep, sd.sigma_prime, sd.decomposition
    else:
        keep = sd.rank
        coeffs = sd.sigma[:keep] / np.linalg.norm(sd.sigma[:keep])
    m = (sd.u[:, :keep] * coeffs) @ sd.vh[:keep]
    return flatten_from_matrix(m, sd.bipartition)
