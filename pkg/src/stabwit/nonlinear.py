"""Variance-based separability tests across a fixed cut.

Each test pairs observables ``A_i`` on the left block with ``B_i`` on the
right block. If the left observables satisfy ``sum var(A_i) >= a`` on every
state (and the right ones ``>= b``), product states across the cut obey
``sum var(A_i + B_i) >= a + b``. With ``A_i^2 = B_i^2 = 1`` this rearranges
into a linear witness minus squared means, which is what ``LurReport``
stores.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import ConsistencyError, DimensionError, HermitianOperator, expectation
from .states import State

DETECT_SLACK = 1e-12
VARIANCE_TOL = 1e-10


class ContractError(ValueError):
    """Observables do not satisfy the algebraic preconditions of a bound."""


@dataclass(frozen=True)
class LurReport:
    linear_part: float
    correction: float
    total: float
    detected: bool

    def to_json(self) -> dict:
        return {
            "linear_part": self.linear_part,
            "correction": self.correction,
            "total": self.total,
            "detected": self.detected,
        }


def variance(op: HermitianOperator, rho: State) -> float:
    v = expectation(op * op, rho) - expectation(op, rho) ** 2
    if v < -VARIANCE_TOL:
        raise ConsistencyError(f"negative variance {v}")
    return max(v, 0.0)


def _pauli(n: int, placements: dict[int, str], sign: float = 1.0) -> HermitianOperator:
    """Pauli string from 1-based ``{qubit: letter}``; qubits outside ``1..n`` are dropped."""
    letters = ["I"] * n
    for q, ch in placements.items():
        if 1 <= q <= n:
            letters[q - 1] = ch
    return HermitianOperator.from_pauli("".join(letters), sign)


def _check_n(rho: State, n: int) -> None:
    if rho.n_qubits != n:
        raise DimensionError(f"state has {rho.n_qubits} qubits, expected {n}")


def lur_report(
    rho: State,
    pairs: Sequence[tuple[HermitianOperator, HermitianOperator]],
    bound_a: float,
    bound_b: float,
) -> LurReport:
    """Evaluate ``sum var(A_i + B_i) >= bound_a + bound_b`` in witness form (halved)."""
    n_pairs = len(pairs)
    linear = (2 * n_pairs - bound_a - bound_b) / 2
    linear += sum(expectation(a * b, rho) for a, b in pairs)
    correction = 0.5 * sum(expectation(a + b, rho) ** 2 for a, b in pairs)
    total = linear - correction
    return LurReport(linear, correction, total, total < -DETECT_SLACK)


def _check_cut(n: int, k: int) -> None:
    if not 1 <= k <= n - 1:
        raise ValueError(f"cut k={k} outside 1..{n - 1}")


def lur_ghz_pairs(n: int, k: int):
    xs_left = {q: "X" for q in range(1, k + 1)}
    xs_right = {q: "X" for q in range(k + 1, n + 1)}
    return [
        (_pauli(n, xs_left), _pauli(n, xs_right, -1.0)),
        (_pauli(n, {k: "Z"}), _pauli(n, {k + 1: "Z"}, -1.0)),
    ]


def lur_ghz(rho: State, n: int, k: int) -> LurReport:
    """Two-pair test for the cut after qubit ``k``; linear part is ``1 - S_1 - S_{k+1}``."""
    _check_n(rho, n)
    _check_cut(n, k)
    return lur_report(rho, lur_ghz_pairs(n, k), 1.0, 1.0)


def lur_ghz_three_pairs(n: int, m: int):
    k = m - 1
    _check_cut(n, k)
    pairs = lur_ghz_pairs(n, k)
    a3 = {q: "X" for q in range(1, k)}
    a3[k] = "Y"
    b3 = {q: "X" for q in range(k + 2, n + 1)}
    b3[k + 1] = "Y"
    # positive sign on B_3 makes A_3 B_3 = -S_1 S_m, matching the three-term witness
    pairs.append((_pauli(n, a3), _pauli(n, b3)))
    return pairs


def lur_ghz_three(rho: State, n: int, m: int) -> LurReport:
    """Three-pair test around ``1 - S_1 - S_m - S_1 S_m``; the cut sits after qubit ``m - 1``."""
    _check_n(rho, n)
    return lur_report(rho, lur_ghz_three_pairs(n, m), 2.0, 2.0)


def lur_cluster_pairs(n: int, k: int):
    _check_cut(n, k)
    return [
        (_pauli(n, {k - 1: "Z", k: "X"}), _pauli(n, {k + 1: "Z"}, -1.0)),
        (_pauli(n, {k: "Z"}), _pauli(n, {k + 1: "X", k + 2: "Z"}, -1.0)),
    ]


def lur_cluster(rho: State, n: int, k: int) -> LurReport:
    """Cluster analogue with linear part ``1 - S_k - S_{k+1}``; absent neighbours are dropped."""
    _check_n(rho, n)
    return lur_report(rho, lur_cluster_pairs(n, k), 1.0, 1.0)


def check_anticommuting(ops: Sequence[HermitianOperator], tol: float = 1e-10) -> None:
    for i, a in enumerate(ops):
        da = a.dense
        if np.linalg.norm(da @ da - np.eye(da.shape[0])) >= tol:
            raise ContractError(f"observable {i} does not square to the identity")
        for j in range(i + 1, len(ops)):
            db = ops[j].dense
            if np.linalg.norm(da @ db + db @ da) >= tol:
                raise ContractError(f"observables {i} and {j} do not anticommute")


def anticommuting_mean_bound(ops: Sequence[HermitianOperator], rho: State) -> float:
    """``sum <A_i>^2`` for pairwise anticommuting involutions; never exceeds one."""
    check_anticommuting(ops)
    return float(sum(expectation(a, rho) ** 2 for a in ops))
