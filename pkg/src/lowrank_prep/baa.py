"""Bounded-approximation search over product factorizations.

A plan splits the state repeatedly, each split keeping only the top Schmidt
pair of one factor.  Losses compose multiplicatively in fidelity.  The search
maximizes saved CNOTs subject to a total loss budget.
"""
from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .circuit import Circuit
from .cost import baseline_sp_count
from .errors import InvalidInput, ResourceLimit
from .linalg import Bipartition, as_state, num_qubits, schmidt_decompose
from .synthesis import LrspConfig, lrsp

BRUTE_FORCE_MAX_QUBITS = 6


class CostFn(enum.Enum):
    MODEL = "model"
    REALIZED = "realized"


@dataclass(frozen=True, eq=False)
class FactorState:
    qubits: tuple[int, ...]
    state: np.ndarray

    @property
    def key(self) -> tuple:
        return (self.qubits, self.state.tobytes())


@dataclass(frozen=True)
class Step:
    factor: tuple[int, ...]
    subset_a: tuple[int, ...]
    subset_b: tuple[int, ...]
    loss: float


@dataclass
class ApproxPlan:
    n: int
    factors: list[FactorState]
    steps: list[Step]
    total_loss: float
    predicted_cnots: int
    saved_cnots: int
    cost_fn: CostFn
    factor_costs: list[int] = field(default_factory=list)
    # 1 - |<psi|product>|^2; differs from total_loss when both halves of a split are split again
    exact_loss: float | None = None

    def sort_key(self) -> tuple:
        return (-self.saved_cnots, self.total_loss, _step_key(self.steps))

    def to_json(self) -> dict:
        return {
            "schema": "v1",
            "n": self.n,
            "steps": [
                {"factor_qubits": list(s.factor), "subset_a": list(s.subset_a), "step_loss": s.loss}
                for s in self.steps
            ],
            "factors": [list(f.qubits) for f in self.factors],
            "total_loss": self.total_loss,
            "predicted_cnots": self.predicted_cnots,
            "saved_cnots": self.saved_cnots,
            "cost_fn": self.cost_fn.value,
            "exact_loss": self.exact_loss,
        }


def compose_loss(losses: Sequence[float]) -> float:
    """Total loss ``1 - prod(1 - l_i)`` of a chain of approximation steps."""
    keep = 1.0
    for loss in losses:
        keep *= 1.0 - loss
    return 1.0 - keep


def sorted_losses(steps: Sequence[Step]) -> list[float]:
    return [s.loss for s in sorted(steps, key=lambda s: (s.factor, s.subset_a))]


def _step_key(steps: Sequence[Step]) -> tuple:
    return tuple((s.factor, s.subset_a) for s in steps)


def enumerate_bipartitions(qubits: Sequence[int]) -> list[Bipartition]:
    """Distinct bipartitions of a factor, over its local positions ``0..q-1``.

    Side A has ``1..q//2`` positions; for even ``q`` a half split is listed
    once, with position 0 on side A.
    """
    q = len(qubits)
    if q < 2:
        raise InvalidInput("need at least two qubits to bipartition")
    out = []
    for size in range(1, q // 2 + 1):
        for a in itertools.combinations(range(q), size):
            if 2 * size == q and 0 not in a:
                continue
            out.append(Bipartition(a, tuple(i for i in range(q) if i not in a)))
    return out


def branch(f: FactorState, bp: Bipartition) -> tuple[FactorState, FactorState, float]:
    """Split ``f`` keeping its top Schmidt pair; the loss is the discarded weight."""
    if bp.n != len(f.qubits):
        raise InvalidInput(f"bipartition over {bp.n} qubits does not fit factor {f.qubits}")
    sd = schmidt_decompose(f.state, bp)
    left = FactorState(tuple(f.qubits[i] for i in bp.subset_a), sd.u[:, 0].copy())
    right = FactorState(tuple(f.qubits[i] for i in bp.subset_b), sd.vh[0].copy())
    loss = float(np.sum(sd.sigma[1:] ** 2))
    return left, right, loss


class _Context:
    """Memo tables shared by one search."""

    def __init__(self, cost_fn: CostFn):
        self.cost_fn = cost_fn
        self._branches: dict = {}
        self._costs: dict = {}

    def branches(self, f: FactorState) -> list[tuple[Step, FactorState, FactorState]]:
        key = f.key
        if key not in self._branches:
            out = []
            if len(f.qubits) >= 2:
                for bp in enumerate_bipartitions(f.qubits):
                    left, right, loss = branch(f, bp)
                    out.append((Step(f.qubits, left.qubits, right.qubits, loss), left, right))
            self._branches[key] = out
        return self._branches[key]

    def cost(self, f: FactorState) -> int:
        key = f.key
        if key not in self._costs:
            if self.cost_fn is CostFn.MODEL:
                self._costs[key] = baseline_sp_count(len(f.qubits))
            else:
                self._costs[key] = lrsp(f.state, LrspConfig())[1].cnots
        return self._costs[key]

    def plan(self, n: int, leaves: Sequence[FactorState], steps: Sequence[Step]) -> ApproxPlan:
        leaves = sorted(leaves, key=lambda f: f.qubits)
        steps = sorted(steps, key=lambda s: (s.factor, s.subset_a))
        costs = [self.cost(f) for f in leaves]
        predicted = sum(costs)
        return ApproxPlan(
            n=n,
            factors=list(leaves),
            steps=list(steps),
            total_loss=compose_loss(sorted_losses(steps)),
            predicted_cnots=predicted,
            saved_cnots=baseline_sp_count(n) - predicted,
            cost_fn=self.cost_fn,
            factor_costs=costs,
        )


def _with_exact_loss(plan: ApproxPlan, psi) -> ApproxPlan:
    overlap = np.vdot(product_state(plan), np.asarray(psi, dtype=complex).ravel())
    plan.exact_loss = float(max(0.0, 1.0 - abs(overlap) ** 2))
    return plan


def _root(psi) -> tuple[int, FactorState]:
    v = as_state(psi)
    n = num_qubits(v)
    return n, FactorState(tuple(range(n)), v)


def _check_budget(budget: float) -> None:
    if not 0.0 <= budget <= 1.0:
        raise InvalidInput(f"loss budget must lie in [0, 1], got {budget}")


def baa_search(psi, budget: float, cost_fn: CostFn = CostFn.MODEL) -> ApproxPlan:
    """Branch-and-bound breadth-first search for the plan saving the most CNOTs.

    Nodes hold a queue of undecided factors; expanding a node either keeps
    the first undecided factor whole or splits it over one of its
    bipartitions, so every split tree is reached by exactly one path.  Nodes
    whose loss exceeds ``budget`` are cut, as are nodes whose optimistic
    saving (all undecided factors free) cannot reach the best plan found.
    Ties go to the smaller loss, then the lexicographically smaller steps.
    """
    _check_budget(budget)
    cost_fn = CostFn(cost_fn)
    n, root = _root(psi)
    ctx = _Context(cost_fn)
    baseline = baseline_sp_count(n)
    best: ApproxPlan | None = None

    frontier = deque([((root,), (), (), 0)])
    while frontier:
        undecided, closed, steps, closed_cost = frontier.popleft()
        if best is not None and baseline - closed_cost < best.saved_cnots:
            continue
        if not undecided:
            plan = ctx.plan(n, closed, steps)
            if best is None or plan.sort_key() < best.sort_key():
                best = plan
            continue
        f, rest = undecided[0], undecided[1:]
        frontier.append((rest, closed + (f,), steps, closed_cost + ctx.cost(f)))
        for step, left, right in ctx.branches(f):
            new_steps = steps + (step,)
            if compose_loss(sorted_losses(new_steps)) > budget:
                continue
            frontier.append((rest + (left, right), closed, new_steps, closed_cost))
    assert best is not None
    return _with_exact_loss(best, root.state)


def _all_trees(f: FactorState, ctx: _Context) -> Iterator[tuple[list[FactorState], list[Step]]]:
    yield [f], []
    for step, left, right in ctx.branches(f):
        for leaves_a, steps_a in _all_trees(left, ctx):
            for leaves_b, steps_b in _all_trees(right, ctx):
                yield leaves_a + leaves_b, [step] + steps_a + steps_b


def all_plans(psi, cost_fn: CostFn = CostFn.MODEL) -> list[ApproxPlan]:
    """Every split tree of ``psi`` as a plan (exhaustive; small ``n`` only)."""
    n, root = _root(psi)
    if n > BRUTE_FORCE_MAX_QUBITS:
        raise ResourceLimit(f"exhaustive enumeration limited to n <= {BRUTE_FORCE_MAX_QUBITS}, got {n}")
    ctx = _Context(CostFn(cost_fn))
    return [ctx.plan(n, leaves, steps) for leaves, steps in _all_trees(root, ctx)]


def brute_force_plans(psi, budget: float, cost_fn: CostFn = CostFn.MODEL) -> ApproxPlan:
    """Exhaustive oracle for :func:`baa_search` with the same objective and tie-break."""
    _check_budget(budget)
    feasible = [p for p in all_plans(psi, cost_fn) if p.total_loss <= budget]
    return _with_exact_loss(min(feasible, key=ApproxPlan.sort_key), psi)


def product_path_losses(psi) -> list[float]:
    """Total loss of every split tree that ends in single-qubit factors."""
    return [p.total_loss for p in all_plans(psi) if all(len(f.qubits) == 1 for f in p.factors)]


def synth_plan(plan: ApproxPlan, cfg: LrspConfig | None = None) -> Circuit:
    """Prepare every factor with low-rank preparation, side by side on its own qubits."""
    c = Circuit(plan.n)
    for f in plan.factors:
        sub, _ = lrsp(f.state, cfg)
        c.extend(sub, f.qubits)
    return c


def product_state(plan: ApproxPlan) -> np.ndarray:
    """The approximating state of a plan, assembled from its factors."""
    n = plan.n
    t = np.ones((), dtype=complex)
    order: list[int] = []
    for f in plan.factors:
        t = np.multiply.outer(t, f.state.reshape((2,) * len(f.qubits)))
        order.extend(f.qubits)
    return t.transpose(np.argsort(order)).reshape(-1)

