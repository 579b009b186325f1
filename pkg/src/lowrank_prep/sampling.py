"""Shot sampling, CNOT-depolarizing Monte Carlo trajectories, and the MAE metric.

Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64); the same
``(input, shots, seed)`` always gives the same histogram.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .circuit import CX, Circuit, U, apply_u, cx_permutation, simulate, u_matrix
from .errors import InvalidInput

_PAULIS = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
# Rows per batched trajectory block, times the state dimension.
_BLOCK_ELEMENTS = 1 << 16


@dataclass
class ShotCounts:
    shots: int
    counts: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        total = sum(self.counts.values())
        if total != self.shots:
            raise InvalidInput(f"histogram sums to {total}, expected {self.shots}")

    def frequencies(self, dim: int) -> np.ndarray:
        f = np.zeros(dim)
        for k, c in self.counts.items():
            f[k] = c
        return f / self.shots

    def to_json(self) -> dict:
        return {"shots": self.shots, "counts": {str(k): v for k, v in sorted(self.counts.items())}}

    @classmethod
    def from_json(cls, obj: dict) -> "ShotCounts":
        return cls(int(obj["shots"]), {int(k): int(v) for k, v in obj["counts"].items()})

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _histogram(outcomes: np.ndarray) -> dict[int, int]:
    values, counts = np.unique(outcomes, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}


def sample(psi, shots: int, seed: int) -> ShotCounts:
    """Draw ``shots`` i.i.d. outcomes from ``|psi_x|**2``."""
    if shots < 1:
        raise InvalidInput(f"shots must be >= 1, got {shots}")
    probs = np.abs(np.asarray(psi, dtype=complex).ravel()) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    drawn = rng.multinomial(shots, probs)
    return ShotCounts(shots, {int(i): int(c) for i, c in enumerate(drawn) if c})


def _apply_per_column(states: np.ndarray, mats: np.ndarray, qubit: int, n: int) -> np.ndarray:
    rows = states.shape[1]
    t = states.reshape(2**qubit, 2, 2 ** (n - qubit - 1), rows)
    return np.einsum("rij,ajbr->aibr", mats, t).reshape(2**n, rows)


def _run_trajectories(c: Circuit, cx_sites: list[int], errors: np.ndarray) -> np.ndarray:
    """Final states for a block of trajectories; ``errors[t, j]`` is the Pauli pair index after CX ``j``.

    States are held as columns so every gate acts on long contiguous rows.
    """
    n = c.width
    states = np.zeros((2**n, errors.shape[0]), dtype=complex)
    states[0] = 1.0
    site_of = {g: j for j, g in enumerate(cx_sites)}
    for gi, g in enumerate(c.gates):
        if isinstance(g, U):
            states = apply_u(states, u_matrix(g.theta, g.phi, g.lam), g.qubit, n)
            continue
        states = states[cx_permutation(g.control, g.target, n)]
        hit = np.nonzero(errors[:, site_of[gi]])[0]
        if hit.size:
            pc, pt = np.divmod(errors[hit, site_of[gi]], 4)
            sub = _apply_per_column(states[:, hit], _PAULIS[pc], g.control, n)
            states[:, hit] = _apply_per_column(sub, _PAULIS[pt], g.target, n)
    return states.T


def simulate_noisy(c: Circuit, p_cnot: float, shots: int, seed: int) -> ShotCounts:
    """Sample ``c`` with a two-qubit depolarizing error after every CX.

    Each shot is one trajectory: after each CX, with probability ``p_cnot``
    one of the 15 non-identity two-qubit Paulis is applied to its operands.
    Shots that drew identical error patterns share one simulated state.
    """
    if not 0.0 <= p_cnot <= 1.0:
        raise InvalidInput(f"p_cnot must lie in [0, 1], got {p_cnot}")
    if shots < 1:
        raise InvalidInput(f"shots must be >= 1, got {shots}")
    cx_sites = [i for i, g in enumerate(c.gates) if isinstance(g, CX)]
    if p_cnot == 0.0 or not cx_sites:
        return sample(simulate(c), shots, seed)

    rng = np.random.default_rng(seed)
    hit = rng.random((shots, len(cx_sites))) < p_cnot
    pauli = rng.integers(1, 16, size=(shots, len(cx_sites)))
    pattern = np.where(hit, pauli, 0).astype(np.int8)
    unique, shot_traj = np.unique(pattern, axis=0, return_inverse=True)
    shot_traj = shot_traj.ravel()
    u = rng.random(shots)

    dim = 2**c.width
    phase = np.exp(1j * c.global_phase)
    block = max(1, _BLOCK_ELEMENTS // dim)
    outcomes = np.empty(shots, dtype=np.int64)
    for start in range(0, unique.shape[0], block):
        stop = min(start + block, unique.shape[0])
        states = _run_trajectories(c, cx_sites, unique[start:stop]) * phase
        cdf = np.cumsum(np.abs(states) ** 2, axis=1)
        cdf /= cdf[:, -1:]
        mine = np.nonzero((shot_traj >= start) & (shot_traj < stop))[0]
        rows = cdf[shot_traj[mine] - start]
        outcomes[mine] = np.minimum((rows < u[mine, None]).sum(axis=1), dim - 1)
    return ShotCounts(shots, _histogram(outcomes))


def mae(counts: ShotCounts, target) -> float:
    """Mean over all ``2**n`` outcomes of ``|freq(x) - |target_x|**2|``."""
    t = np.abs(np.asarray(target, dtype=complex).ravel()) ** 2
    if any(k >= t.size or k < 0 for k in counts.counts):
        raise InvalidInput("histogram outcome outside the target's dimension")
    return float(np.mean(np.abs(counts.frequencies(t.size) - t)))
