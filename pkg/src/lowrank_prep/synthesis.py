"""Circuit constructions for state preparation.

Building blocks, bottom up:

* uniformly controlled (multiplexed) Ry/Rz rotations in Gray-code order,
* diagonal unitaries as a cascade of multiplexed Rz,
* amplitude encoding (Ry cascade for magnitudes, diagonal for phases),
* generalized Householder reflections ``I - (1 + w)|u><u|``,
* isometries and unitaries as products of reflections plus a phase fix,
* the four-phase low-rank preparation over the half split.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .circuit import ELIDE_TOL, Circuit
from .cost import lrsp_estimate
from .errors import InvalidInput
from .linalg import DEFAULT_TOL, Bipartition, as_state, num_qubits, schmidt_decompose, truncate
from .measures import m_of

ISOMETRY_TOL = 1e-10


# -- multiplexed rotations --------------------------------------------------


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def _gray_switch_bits(k: int) -> list[int]:
    """Bit flipped between consecutive Gray codes, wrapping back to zero."""
    size = 2**k
    return [(_gray(i) ^ _gray((i + 1) % size)).bit_length() - 1 for i in range(size)]


def _gray_angles(alpha: np.ndarray, k: int) -> np.ndarray:
    """Solve for the rotation angles interleaved with the Gray-code CNOTs.

    With control value ``x`` the target sees ``sum_i (-1)^{x . gray(i)} theta_i``;
    that sign matrix is orthogonal up to ``2**k``.
    """
    size = 2**k
    signs = np.array(
        [[(-1) ** bin(x & _gray(i)).count("1") for i in range(size)] for x in range(size)],
        dtype=float,
    )
    return signs.T @ alpha / size


def _drop_idle_controls(alpha: np.ndarray, controls: list[int], tol: float):
    """Remove controls whose value never changes the rotation angle."""
    t = alpha.reshape((2,) * len(controls)) if controls else alpha.reshape(())
    kept = []
    axis = 0
    for q in controls:
        a0, a1 = np.take(t, 0, axis=axis), np.take(t, 1, axis=axis)
        if np.allclose(a0, a1, rtol=0.0, atol=tol):
            t = a0
        else:
            kept.append(q)
            axis += 1
    return t.reshape(-1), kept


def multiplexed_rotation(
    circuit: Circuit,
    axis: str,
    alpha: Sequence[float],
    controls: Sequence[int],
    target: int,
    tol: float = ELIDE_TOL,
) -> None:
    """Append a rotation on ``target`` whose angle is ``alpha[x]`` for control value ``x``.

    ``x`` reads ``controls`` big-endian.  Uses ``2**k`` rotations and ``2**k``
    CNOTs for ``k`` controls that actually matter.
    """
    rot = {"y": circuit.ry, "z": circuit.rz}[axis]
    alpha = np.asarray(alpha, dtype=float)
    if alpha.size != 2 ** len(controls):
        raise InvalidInput(f"need {2 ** len(controls)} angles, got {alpha.size}")
    alpha, controls = _drop_idle_controls(alpha, list(controls), tol)
    if np.all(np.abs(alpha) < tol):
        return
    k = len(controls)
    if k == 0:
        rot(alpha[0], target)
        return
    thetas = _gray_angles(alpha, k)
    for theta, bit in zip(thetas, _gray_switch_bits(k)):
        if abs(theta) >= tol:
            rot(theta, target)
        circuit.cx(controls[k - 1 - bit], target)


# -- diagonal gates and amplitude encoding ---------------------------------


def append_diagonal(circuit: Circuit, phases: Sequence[float], qubits: Sequence[int]) -> None:
    """Append ``diag(exp(i * phases))`` on ``qubits`` (big-endian), global phase included."""
    phases = np.asarray(phases, dtype=float)
    qubits = list(qubits)
    while qubits:
        pairs = phases.reshape(-1, 2)
        multiplexed_rotation(circuit, "z", pairs[:, 1] - pairs[:, 0], qubits[:-1], qubits[-1])
        phases = pairs.mean(axis=1)
        qubits.pop()
    circuit.global_phase += float(phases[0])


def diagonal_circuit(phases: Sequence[float]) -> Circuit:
    phases = np.asarray(phases, dtype=float)
    q = num_qubits(phases)
    if phases.size != 2**q or q < 1:
        raise InvalidInput(f"diagonal length {phases.size} is not a power of two >= 2")
    c = Circuit(q)
    append_diagonal(c, phases, range(q))
    return c.simplified()


def _append_magnitudes(circuit: Circuit, mags: np.ndarray, qubits: list[int]) -> None:
    """Ry cascade taking ``|0...0>`` to the nonnegative vector ``mags``."""
    q = len(qubits)
    weights = mags**2
    for j in range(q):
        blocks = weights.reshape(2**j, 2, -1).sum(axis=2)
        alpha = 2 * np.arctan2(np.sqrt(blocks[:, 1]), np.sqrt(blocks[:, 0]))
        multiplexed_rotation(circuit, "y", alpha, qubits[:j], qubits[j])


def prep_state(v) -> Circuit:
    """Amplitude encoding: a circuit mapping ``|0...0>`` exactly onto ``v``.

    Magnitudes are loaded with multiplexed Ry; complex phases are then applied
    as one diagonal gate.  Real nonnegative inputs produce Ry gates only.
    """
    v = as_state(v)
    q = num_qubits(v)
    c = Circuit(q)
    mags = np.abs(v)
    _append_magnitudes(c, mags, list(range(q)))
    phases = np.where(mags > 1e-14, np.angle(v), 0.0)
    if np.any(np.abs(phases) > ELIDE_TOL):
        append_diagonal(c, phases, range(q))
    return c.simplified()


# -- reflections, isometries, unitaries ------------------------------------


def reflection(u, w: complex) -> Circuit:
    """Circuit for ``I - (1 + w)|u><u|`` with ``|w| = 1``.

    Unprepare ``u``, put phase ``-w`` on ``|0...0>``, prepare ``u`` again.
    """
    if abs(abs(w) - 1.0) > 1e-12:
        raise InvalidInput(f"|w| must be 1, got {abs(w)!r}")
    prep = prep_state(u)
    q = prep.width
    phases = np.zeros(2**q)
    phases[0] = cmath.phase(-w)
    c = prep.inverse()
    append_diagonal(c, phases, range(q))
    c.extend(prep)
    return c.simplified()


def _check_isometry(v: np.ndarray) -> None:
    if v.ndim != 2:
        raise InvalidInput("isometry must be a matrix")
    rows, cols = v.shape
    k = num_qubits(np.empty(rows))
    if rows != 2**k or k < 1:
        raise InvalidInput(f"row count {rows} is not a power of two >= 2")
    if not 1 <= cols <= rows:
        raise InvalidInput(f"need 1 <= columns <= {rows}, got {cols}")
    err = np.max(np.abs(v.conj().T @ v - np.eye(cols)))
    if err > ISOMETRY_TOL:
        raise InvalidInput(f"columns are not orthonormal (max deviation {err:.3g})")


def _free_phase_fill(phases: np.ndarray, inputs: list[int]) -> np.ndarray:
    """Choose phases on non-input basis states so the diagonal ignores idle qubits."""
    mask = 0
    for p in inputs:
        mask |= p ^ inputs[0]
    fixed = inputs[0] & ~mask
    lookup = {p: phases[p] for p in inputs}
    out = phases.copy()
    taken = set(inputs)
    for x in range(phases.size):
        if x not in taken:
            out[x] = lookup.get((x & mask) | fixed, 0.0)
    return out


def synth_isometry(v, inputs: Sequence[int] | None = None) -> Circuit:
    """Circuit ``W`` with ``W|inputs[j]> = v[:, j]`` for every column ``j``.

    ``inputs`` defaults to the first ``c`` basis states.  Each column is sent
    to its input basis vector by one Householder reflection (skipped when it is
    already there up to phase); the residual phases are fixed by one diagonal.
    A single column with input ``|0...0>`` is plain amplitude encoding.
    """
    v = np.asarray(v, dtype=complex)
    _check_isometry(v)
    rows, cols = v.shape
    inputs = list(range(cols)) if inputs is None else [int(p) for p in inputs]
    if len(inputs) != cols or len(set(inputs)) != cols or not all(0 <= p < rows for p in inputs):
        raise InvalidInput("inputs must be distinct basis indices, one per column")
    if cols == 1 and inputs[0] == 0:
        return prep_state(v[:, 0])

    k = num_qubits(np.empty(rows))
    r = v.copy()
    mirrors = []
    phases = np.zeros(rows)
    for j, p in enumerate(inputs):
        x = r[:, j]
        off = np.delete(x, p)
        if np.linalg.norm(off) >= 1e-12:
            y = np.zeros(rows, dtype=complex)
            y[p] = -cmath.exp(1j * cmath.phase(x[p])) if abs(x[p]) > 0 else -1.0
            u = x - y
            u /= np.linalg.norm(u)
            r -= 2.0 * np.outer(u, u.conj() @ r)
            mirrors.append(u)
        phases[p] = cmath.phase(r[p, j])

    c = Circuit(k)
    phases = _free_phase_fill(phases, inputs)
    if np.any(np.abs(phases) > ELIDE_TOL):
        append_diagonal(c, phases, range(k))
    for u in reversed(mirrors):
        c.extend(reflection(u, 1.0))
    return c.simplified()


def synth_unitary(u) -> Circuit:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InvalidInput("unitary must be square")
    _check_isometry(u)
    return synth_isometry(u)


# -- low-rank state preparation ---------------------------------------------


@dataclass(frozen=True)
class LrspConfig:
    r: int | None = None
    tol: float = DEFAULT_TOL
    recurse_product: bool = True

    def __post_init__(self):
        if self.r is not None and self.r < 1:
            raise InvalidInput(f"r must be >= 1, got {self.r}")


@dataclass
class SynthesisReport:
    n: int
    rank: int
    m: int
    predicted_loss: float
    cnots: int
    depth: int
    model_estimate: float | None
    phase_cnots: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _encode(cols: np.ndarray, shift: int) -> Circuit:
    """Phase 3/4 block: map ``|j << shift>`` to column ``j``."""
    inputs = [j << shift for j in range(cols.shape[1])]
    if cols.shape[1] == 1:
        return prep_state(cols[:, 0])
    if cols.shape[0] == cols.shape[1]:
        return synth_unitary(cols)
    return synth_isometry(cols, inputs)


def _lrsp(v: np.ndarray, cfg: LrspConfig) -> tuple[Circuit, dict]:
    n = num_qubits(v)
    if n == 1:
        c = prep_state(v)
        return c, {"rank": 1, "m": 0, "loss": 0.0, "phases": [0, 0, c.cnot_count(), 0]}

    a = n // 2
    sd = schmidt_decompose(v, Bipartition.half(n), cfg.tol)
    rank = sd.rank if cfg.r is None else min(cfg.r, sd.rank)
    tr = truncate(sd, rank)
    m = m_of(rank)
    c = Circuit(n)

    if rank == 1 and cfg.recurse_product:
        exact = LrspConfig(None, cfg.tol, True)
        left, _ = _lrsp(sd.u[:, 0], exact)
        right, _ = _lrsp(sd.vh[0], exact)
        c.extend(left, range(a))
        c.extend(right, range(a, n))
        phases = [0, 0, left.cnot_count(), right.cnot_count()]
        return c, {"rank": 1, "m": 0, "loss": tr.loss, "phases": phases}

    width = 2**m
    sigma = np.zeros(width)
    sigma[:rank] = tr.sigma_prime
    p1 = prep_state(sigma) if m > 0 else Circuit(1)
    if m > 0:
        c.extend(p1, range(m))
    for q in range(m):
        c.cx(q, q + a)
    p3 = _encode(sd.u[:, :width], a - m)
    p4 = _encode(sd.vh[:width].T, (n - a) - m)
    c.extend(p3, range(a))
    c.extend(p4, range(a, n))
    phases = [p1.cnot_count(), m, p3.cnot_count(), p4.cnot_count()]
    return c, {"rank": rank, "m": m, "loss": tr.loss, "phases": phases}


def lrsp(psi, cfg: LrspConfig | None = None) -> tuple[Circuit, SynthesisReport]:
    """Low-rank state preparation over the half split.

    Schmidt-decompose across the first ``n // 2`` qubits, keep at most
    ``cfg.r`` coefficients (padded to ``2**m``), load them on ``m`` qubits,
    copy with ``m`` CNOTs, then encode the left and right singular vectors.
    A rank-one split recurses into both halves instead.
    """
    cfg = cfg or LrspConfig()
    v = as_state(psi)
    c, info = _lrsp(v, cfg)
    n = num_qubits(v)
    model = float(lrsp_estimate(n, info["m"]).total) if n >= 2 else None
    report = SynthesisReport(
        n=n,
        rank=info["rank"],
        m=info["m"],
        predicted_loss=info["loss"],
        cnots=c.cnot_count(),
        depth=c.depth(),
        model_estimate=model,
        phase_cnots=dict(zip(("phase1", "phase2", "phase3", "phase4"), info["phases"])),
    )
    return c, report


def sweep_rows(psi, tol: float = DEFAULT_TOL) -> list[dict]:
    """One synthesis per ``m = 0..n//2`` with the rank clamped to ``2**m``."""
    v = as_state(psi)
    n = num_qubits(v)
    rows = []
    for m in range(n // 2 + 1):
        c, rep = lrsp(v, LrspConfig(r=2**m, tol=tol))
        rows.append(
            {
                "m": m,
                "cnots": rep.cnots,
                "depth": rep.depth,
                "predicted_loss": rep.predicted_loss,
                "model_estimate": float(lrsp_estimate(n, m).total),
            }
        )
    return rows
