"""Stabilizer witnesses, projector witnesses and the Mermin operator.

Qubit and generator indices in this module's public API are 1-based, so
``ghz_two_term(4, m=3)`` is ``1 - S_1 - S_3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .pauli import ConsistencyError, HermitianOperator, expectation
from .stabilizer import (
    cluster_generators,
    count_settings,
    ghz_generators,
    graph_generators,
    w3_stabilizing_ops,
)
from .states import (
    DensityMatrix,
    Graph,
    PureState,
    make_cluster,
    make_ghz,
    make_graph_state,
    make_rho3,
    make_w3,
)

FULL_SEPARABILITY = "rules_out_full_separability"
GENUINE = "genuine_multipartite"
SQRT5 = math.sqrt(5.0)


@dataclass(frozen=True, eq=False)
class Witness:
    name: str
    operator: HermitianOperator
    target: Union[PureState, DensityMatrix]
    detection_class: str
    analytic_noise_threshold: Optional[float]
    claimed_settings: int
    params: dict = field(default_factory=dict)
    # projector witness W~ and alpha with W - alpha W~ >= 0, for genuine witnesses
    reference: Optional[HermitianOperator] = None
    alpha: Optional[float] = None

    @property
    def n_qubits(self) -> int:
        return self.operator.n_qubits

    def expectation(self, state) -> float:
        return expectation(self.operator, state)

    def detects(self, state, slack: float = 1e-12) -> bool:
        return self.expectation(state) < -slack

    @property
    def target_expectation(self) -> float:
        return expectation(self.operator, self.target)


def projector_product(ops: Sequence[HermitianOperator]) -> HermitianOperator:
    """Symbolic expansion of ``prod_k (S_k + 1) / 2``."""
    n = ops[0].n_qubits
    one = HermitianOperator.identity(n)
    return reduce(lambda acc, s: acc * ((s + one) / 2), ops, one)


def _ghz_ops(n: int) -> list[HermitianOperator]:
    return ghz_generators(n).operators()


def _cluster_ops(n: int) -> list[HermitianOperator]:
    return cluster_generators(n).operators()


def _check_index(name: str, value: int, lo: int, hi: int) -> None:
    if not lo <= value <= hi:
        raise ValueError(f"{name}={value} outside {lo}..{hi}")


def ghz_two_term(n: int, m: int = 2) -> Witness:
    _check_index("m", m, 2, n)
    s = _ghz_ops(n)
    op = 1 - s[0] - s[m - 1]
    return Witness("ghz_two_term", op, make_ghz(n), FULL_SEPARABILITY, 0.5, 2, {"n": n, "m": m})


def ghz_three_term(n: int, m: int = 2) -> Witness:
    _check_index("m", m, 2, n)
    s = _ghz_ops(n)
    op = 1 - s[0] - s[m - 1] - s[0] * s[m - 1]
    return Witness("ghz_three_term", op, make_ghz(n), FULL_SEPARABILITY, 2 / 3, 3, {"n": n, "m": m})


def projector_witness(
    target: PureState, c: float, name: str = "projector", claimed_settings: Optional[int] = None, **params
) -> Witness:
    """``c 1 - |psi><psi|``; ``c`` is the largest squared overlap with biseparable states.

    Without ``claimed_settings`` the greedy Pauli-setting count is used.
    """
    psi = target.amplitudes
    dim = psi.shape[0]
    op = HermitianOperator.from_dense(c * np.eye(dim) - np.outer(psi, psi.conj()), target.n_qubits)
    d = 1 << target.n_qubits
    # target value c - 1, mean trace c - 1/d
    threshold = (1 - c) / (1 - 1 / d)
    if claimed_settings is None:
        claimed_settings = count_settings(op)
    return Witness(name, op, target, GENUINE, threshold, claimed_settings, params)


def ghz_projector_witness(n: int) -> Witness:
    return projector_witness(make_ghz(n), 0.5, "ghz_projector", n=n)


def cluster_projector_witness(n: int) -> Witness:
    return projector_witness(make_cluster(n), 0.5, "cluster_projector", n=n)


def w3_projector_witness() -> Witness:
    # five settings need rotated directions, see stabilizer.w3_projector_settings
    return projector_witness(make_w3(), 2 / 3, "w3_projector", claimed_settings=5)


def ghz_projector_as_stabilizer_product(n: int) -> HermitianOperator:
    return projector_product(_ghz_ops(n))


def ghz_genuine_sum(n: int) -> Witness:
    s = _ghz_ops(n)
    op = (n - 1) - reduce(lambda a, b: a + b, s)
    ref = ghz_projector_witness(n).operator
    return Witness("ghz_genuine_sum", op, make_ghz(n), GENUINE, 1 / n, 2, {"n": n}, ref, 2.0)


def _z_string_projector(n: int, sign: int) -> HermitianOperator:
    """``|0..0><0..0|`` (sign +1) or ``|1..1><1..1|`` (sign -1) as a Z-string sum."""
    one = HermitianOperator.identity(n)
    out = one
    for k in range(n):
        z = HermitianOperator.from_pauli("I" * k + "Z" + "I" * (n - k - 1))
        out = out * ((one + sign * z) / 2)
    return out


def ghz_genuine_two_settings_simplified(n: int) -> HermitianOperator:
    """``2 1 - X..X - 2|0..0><0..0| - 2|1..1><1..1|``."""
    xs = HermitianOperator.from_pauli("X" * n)
    return 2 - xs - 2 * _z_string_projector(n, 1) - 2 * _z_string_projector(n, -1)


def ghz_genuine_two_settings(n: int) -> Witness:
    s = _ghz_ops(n)
    op = 3 - 2 * ((s[0] + 1) / 2 + projector_product(s[1:]))
    if not op.allclose(ghz_genuine_two_settings_simplified(n)):
        raise ConsistencyError("two-setting GHZ witness disagrees with its simplified form")
    ref = ghz_projector_witness(n).operator
    threshold = 1 / (3 - 2 ** (2 - n))
    return Witness("ghz_genuine_two_settings", op, make_ghz(n), GENUINE, threshold, 2, {"n": n}, ref, 2.0)


def ghz3_class_shifted() -> HermitianOperator:
    """Three-qubit two-setting witness shifted by ``1/2``.

    Only the constant shift is provided; whether it singles out GHZ-class
    states is not checked here.
    """
    return ghz_genuine_two_settings(3).operator + 0.5


def mermin_operator(n: int) -> HermitianOperator:
    """``S_1 prod_{k>=2} (S_k + 1)/2``, equal to ``|0..0><1..1| + |1..1><0..0|``."""
    s = _ghz_ops(n)
    return s[0] * projector_product(s[1:])


def mermin_flip_operator(n: int) -> np.ndarray:
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    out[0, dim - 1] = out[dim - 1, 0] = 1
    return out


def mermin_witness3() -> Witness:
    op = 2 - 4 * mermin_operator(3)
    ref = ghz_projector_witness(3).operator
    return Witness("mermin3", op, make_ghz(3), GENUINE, 0.5, 4, {"n": 3}, ref, 4.0)


def cluster_two_term(n: int, k: int = 1) -> Witness:
    _check_index("k", k, 1, n - 1)
    s = _cluster_ops(n)
    op = 1 - s[k - 1] - s[k]
    return Witness("cluster_two_term", op, make_cluster(n), FULL_SEPARABILITY, 0.5, 2, {"n": n, "k": k})


def cluster_three_term(n: int, k: int = 1) -> Witness:
    _check_index("k", k, 1, n - 1)
    s = _cluster_ops(n)
    op = 1 - s[k - 1] - s[k] - s[k - 1] * s[k]
    return Witness(
        "cluster_three_term", op, make_cluster(n), FULL_SEPARABILITY, 2 / 3, 3, {"n": n, "k": k}
    )


def cluster_composite_blocks(n: int) -> list[HermitianOperator]:
    """``S_{4j+1} + S_{4j+2} + S_{4j+1} S_{4j+2}`` for ``j < K = floor((N+2)/4)``."""
    if n < 2:
        raise ValueError("cluster composite witness needs N >= 2")
    s = _cluster_ops(n)
    blocks = []
    for j in range((n + 2) // 4):
        a, b = s[4 * j], s[4 * j + 1]
        blocks.append(a + b + a * b)
    supports = [blk.support for blk in blocks]
    for i in range(len(supports)):
        for j in range(i + 1, len(supports)):
            if supports[i] & supports[j]:
                raise ConsistencyError("composite blocks overlap")
    return blocks


def cluster_composite(n: int) -> Witness:
    """``1 - prod_j (1 + O_j) / 2`` over disjoint three-term blocks ``O_j``.

    Each factor has product-state mean in ``[0, 1]``, so the product is at
    most one on product states; on the cluster state it is ``2**K``.
    """
    blocks = cluster_composite_blocks(n)
    one = HermitianOperator.identity(n)
    prod = reduce(lambda acc, o: acc * ((one + o) / 2), blocks, one)
    op = 1 - prod
    K = len(blocks)
    threshold = 2**K / (2**K + 1)
    return Witness(
        "cluster_composite", op, make_cluster(n), FULL_SEPARABILITY, threshold, 3, {"n": n, "K": K}
    )


def cluster_genuine_threshold(n: int) -> float:
    if n % 2 == 0:
        return 1 / (4 - 4 / 2 ** (n / 2))
    return 1 / (4 - 2 * (2 ** (-(n + 1) / 2) + 2 ** (-(n - 1) / 2)))


def cluster_genuine(n: int) -> Witness:
    s = _cluster_ops(n)
    odd = projector_product(s[0::2])
    even = projector_product(s[1::2])
    op = 3 - 2 * (odd + even)
    ref = cluster_projector_witness(n).operator
    return Witness(
        "cluster_genuine", op, make_cluster(n), GENUINE, cluster_genuine_threshold(n), 2, {"n": n}, ref, 2.0
    )


def graph_pair(graph: Graph, k: int, l: int) -> Witness:
    n = graph.n_vertices
    _check_index("k", k, 1, n)
    _check_index("l", l, 1, n)
    if not graph.adjacency[k - 1, l - 1]:
        raise ValueError(f"vertices {k} and {l} are not neighbors")
    s = graph_generators(graph).operators()
    op = 1 - s[k - 1] - s[l - 1]
    return Witness(
        "graph_pair", op, make_graph_state(graph), FULL_SEPARABILITY, 0.5, 2, {"n": n, "k": k, "l": l}
    )


def graph_genuine(graph: Graph, coloring: Optional[Sequence[int]] = None) -> Witness:
    n = graph.n_vertices
    if not graph.is_connected():
        raise ValueError("genuine graph witness needs a connected graph")
    if coloring is None:
        coloring = graph.greedy_coloring()
    else:
        coloring = list(coloring)
        for k, l in graph.edges():
            if coloring[k] == coloring[l]:
                raise ValueError(f"coloring is not proper on edge ({k + 1}, {l + 1})")
    s = graph_generators(graph).operators()
    op = (n - 1) - reduce(lambda a, b: a + b, s)
    target = make_graph_state(graph)
    ref = projector_witness(target, 0.5).operator
    return Witness(
        "graph_genuine", op, target, GENUINE, 1 / n, len(set(coloring)), {"n": n}, ref, 2.0
    )


def rho3_witness() -> Witness:
    op = HermitianOperator.from_terms(3, {"III": 1, "ZZI": -1, "XXZ": -1})
    return Witness("rho3", op, make_rho3(), FULL_SEPARABILITY, 0.5, 2, {})


def w3_witness() -> Witness:
    """Three-setting W witness; the pair sum runs over the three unordered pairs."""
    terms = {"III": 11 / 3, "ZZZ": 2.0}
    for pair in ("XXI", "XIX", "IXX"):
        terms[pair] = -2 / 3
        terms[pair.replace("X", "Y")] = -2 / 3
        terms[pair.replace("X", "Z")] = 1 / 3
    op = HermitianOperator.from_terms(3, terms)
    ref = w3_projector_witness().operator
    return Witness("w3", op, make_w3(), GENUINE, 4 / 15, 3, {}, ref, W3_DOMINANCE_ALPHA)


# the only alpha with W - alpha W~ >= 0 (both sides vanish on |W3>)
W3_DOMINANCE_ALPHA = 4.0


def w3_from_stabilizing_ops(c0: float = 11 / 3, c1: float = 2.0) -> HermitianOperator:
    """``c0 - S1S2 - S2S3 - S1S3 - c1 S1S2S3`` from the nonlocal W stabilizers."""
    s1, s2, s3 = w3_stabilizing_ops()
    return c0 - s1 * s2 - s2 * s3 - s1 * s3 - c1 * (s1 * s2 * s3)


def w3_two_setting_witness() -> Witness:
    terms = {"III": 1 + SQRT5}
    for pair in ("XXI", "XIX", "IXX"):
        terms[pair] = -1.0
        terms[pair.replace("X", "Y")] = -1.0
    op = HermitianOperator.from_terms(3, terms)
    return Witness("w3_two_setting", op, make_w3(), GENUINE, (3 - SQRT5) / 4, 2, {})


def fidelity_bound_operator(family: str, n: int) -> HermitianOperator:
    """``P' = (1 - W) / 2`` for the two-setting genuine witness of the family."""
    if family == "ghz":
        w = ghz_genuine_two_settings(n)
    elif family == "cluster":
        w = cluster_genuine(n)
    else:
        raise ValueError(f"unknown family {family!r}")
    return (1 - w.operator) / 2


def ghz_fidelity_closed_form(n: int, p: float) -> tuple[float, float]:
    """``(F, F')`` of the noisy GHZ state."""
    return 1 - p * (1 - 2.0**-n), 1 - p * (1.5 - 2.0 ** -(n - 1))


# name -> (builder, parameter names besides n)
REGISTRY: dict[str, tuple[Callable[..., Witness], tuple[str, ...]]] = {
    "ghz_two_term": (ghz_two_term, ("n", "m")),
    "ghz_three_term": (ghz_three_term, ("n", "m")),
    "ghz_projector": (ghz_projector_witness, ("n",)),
    "ghz_genuine_sum": (ghz_genuine_sum, ("n",)),
    "ghz_genuine_two_settings": (ghz_genuine_two_settings, ("n",)),
    "mermin3": (lambda: mermin_witness3(), ()),
    "cluster_two_term": (cluster_two_term, ("n", "k")),
    "cluster_three_term": (cluster_three_term, ("n", "k")),
    "cluster_composite": (cluster_composite, ("n",)),
    "cluster_projector": (cluster_projector_witness, ("n",)),
    "cluster_genuine": (cluster_genuine, ("n",)),
    "graph_pair": (graph_pair, ("graph", "k", "l")),
    "graph_genuine": (graph_genuine, ("graph",)),
    "rho3": (lambda: rho3_witness(), ()),
    "w3_projector": (lambda: w3_projector_witness(), ()),
    "w3": (lambda: w3_witness(), ()),
    "w3_two_setting": (lambda: w3_two_setting_witness(), ()),
}


def build(name: str, **kwargs) -> Witness:
    if name not in REGISTRY:
        raise KeyError(f"unknown witness {name!r}; choose from {sorted(REGISTRY)}")
    fn, params = REGISTRY[name]
    args = {p: kwargs[p] for p in params if kwargs.get(p) is not None}
    return fn(**args)
