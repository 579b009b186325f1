"""Analytic CNOT counts for low-rank state preparation.

All quantities are exact rationals (``fractions.Fraction``); callers that
want a display integer round up themselves.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import InvalidInput


class Regime(enum.Enum):
    ISO_EVEN = "IsoEven"
    ISO_ODD = "IsoOdd"
    UNI_EVEN = "UniEven"
    UNI_ODD = "UniOdd"


@dataclass(frozen=True)
class CostEstimate:
    phase1: Fraction
    phase2: Fraction
    phase34: Fraction
    total: Fraction
    regime: Regime
    k: int


def half_qubits(n: int) -> int:
    """``k = floor(n / 2)``, the size of the smaller register."""
    return n // 2


def _check(n: int, m: int) -> int:
    if n < 2:
        raise InvalidInput(f"need n >= 2, got {n}")
    k = half_qubits(n)
    if not 0 <= m <= k:
        raise InvalidInput(f"m must lie in [0, {k}] for n={n}, got {m}")
    return k


def _state_prep(q: int) -> Fraction:
    return Fraction(2**q - q - 1)


def _unitary(q: int) -> Fraction:
    return Fraction(23, 48) * 4**q - Fraction(3, 2) * 2**q + Fraction(4, 3)


def _isometry(m: int, q: int) -> Fraction:
    return Fraction(2 ** (m + q)) - Fraction(2**q, 24)


def lrsp_estimate(n: int, m: int) -> CostEstimate:
    k = _check(n, m)
    even = n % 2 == 0
    if m < k:
        p1, p2 = _state_prep(m), Fraction(m)
        if even:
            p34, regime = 2 * _isometry(m, k), Regime.ISO_EVEN
        else:
            p34, regime = _isometry(m, k) + _isometry(m, k + 1), Regime.ISO_ODD
    else:
        p1, p2 = _state_prep(k), Fraction(k)
        if even:
            p34, regime = 2 * _unitary(k), Regime.UNI_EVEN
        else:
            p34, regime = _unitary(k) + _unitary(k + 1), Regime.UNI_ODD
    return CostEstimate(p1, p2, p34, p1 + p2 + p34, regime, k)


def table1_bound(n: int, m: int) -> Fraction:
    k = _check(n, m)
    if m < k:
        scale = 2 * 2 ** (n // 2) if n % 2 == 0 else 3 * 2 ** ((n - 1) // 2)
        return scale * (2**m - Fraction(1, 24))
    if n % 2 == 0:
        return Fraction(23, 24) * 2**n
    return Fraction(115, 96) * 2**n


def bipartition_count(n: int) -> int:
    """Number of bipartitions counted as ``sum_{k=1}^{n//2} C(n, k)``.

    Complementary halves are counted twice when ``n`` is even.
    """
    if n < 2:
        raise InvalidInput(f"need n >= 2, got {n}")
    return sum(comb(n, k) for k in range(1, n // 2 + 1))


def baseline_sp_count(q: int) -> int:
    """CNOTs of a generic ``q``-qubit state preparation, ``2**q - q - 1``."""
    if q < 1:
        raise InvalidInput(f"need q >= 1, got {q}")
    return 2**q - q - 1
