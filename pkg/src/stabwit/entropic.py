"""Shannon-entropy tests built from stabilizer generator outcome statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .pauli import ConsistencyError, DimensionError, HermitianOperator
from .states import State
from .stabilizer import cluster_generators, ghz_generators

CLUSTER_TOL = 1e-8
PROB_TOL = 1e-10
DETECT_SLACK = 1e-12
LN2 = math.log(2.0)


@dataclass(frozen=True)
class OutcomeDistribution:
    eigenvalues: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self):
        if len(self.eigenvalues) != len(self.probabilities):
            raise ValueError("one probability per outcome")
        if any(p < -PROB_TOL for p in self.probabilities):
            raise ConsistencyError("negative probability")
        if abs(sum(self.probabilities) - 1) > PROB_TOL:
            raise ConsistencyError(f"probabilities sum to {sum(self.probabilities)}")

    def as_dict(self) -> dict[float, float]:
        return dict(zip(self.eigenvalues, self.probabilities))


@lru_cache(maxsize=256)
def spectral_projectors(op: HermitianOperator) -> tuple[tuple[float, ...], tuple[np.ndarray, ...]]:
    """Distinct eigenvalues (clustered within ``CLUSTER_TOL``) and their projectors."""
    vals, vecs = np.linalg.eigh(op.dense)
    groups: list[list[int]] = []
    for i, v in enumerate(vals):
        if groups and abs(v - vals[groups[-1][0]]) < CLUSTER_TOL:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigen = tuple(float(np.mean(vals[g])) for g in groups)
    projs = tuple(vecs[:, g] @ vecs[:, g].conj().T for g in groups)
    return eigen, projs


def outcome_distribution(op: HermitianOperator, rho: State) -> OutcomeDistribution:
    if op.n_qubits != rho.n_qubits:
        raise DimensionError(f"{op.n_qubits} vs {rho.n_qubits} qubits")
    eigen, projs = spectral_projectors(op)
    if hasattr(rho, "amplitudes"):
        psi = rho.amplitudes
        probs = [float(np.real(psi.conj() @ p @ psi)) for p in projs]
    else:
        probs = [float(np.real(np.einsum("ij,ji->", p, rho.matrix))) for p in projs]
    probs = [max(p, 0.0) for p in probs]
    return OutcomeDistribution(eigen, tuple(probs))


def shannon_entropy(d: OutcomeDistribution) -> float:
    """Entropy in nats; zero-probability outcomes contribute nothing."""
    return float(-sum(p * math.log(p) for p in d.probabilities if p > 0))


def eur_bound(m: HermitianOperator, n: HermitianOperator) -> float:
    """``-2 ln max_ij ||P_i Q_j||`` over the spectral projectors of ``m`` and ``n``.

    The factor two is what makes the bound tight for mutually unbiased
    single-qubit observables (``ln 2`` for X and Y); ``||P_i Q_j||`` is the
    spectral norm.
    """
    if m.n_qubits != n.n_qubits:
        raise DimensionError(f"{m.n_qubits} vs {n.n_qubits} qubits")
    _, ps = spectral_projectors(m)
    _, qs = spectral_projectors(n)
    overlap = max(np.linalg.norm(p @ q, 2) for p in ps for q in qs)
    return float(-2 * math.log(min(overlap, 1.0)))


def generator_entropies(ops: Sequence[HermitianOperator], rho: State) -> list[float]:
    return [shannon_entropy(outcome_distribution(op, rho)) for op in ops]


def _criterion(ops, rho) -> tuple[float, bool]:
    lhs = float(sum(generator_entropies(ops, rho)))
    return lhs, lhs < LN2 - DETECT_SLACK


def eur_criterion_ghz(rho: State, n: int) -> tuple[float, bool]:
    """Summed generator entropies; below ``ln 2`` only for genuinely N-partite entangled states."""
    if rho.n_qubits != n:
        raise DimensionError(f"state has {rho.n_qubits} qubits, expected {n}")
    return _criterion(ghz_generators(n).operators(), rho)


def eur_criterion_cluster(rho: State, n: int) -> tuple[float, bool]:
    if rho.n_qubits != n:
        raise DimensionError(f"state has {rho.n_qubits} qubits, expected {n}")
    return _criterion(cluster_generators(n).operators(), rho)


def eur_criterion(family: str, rho: State, n: int) -> tuple[float, bool]:
    if family == "ghz":
        return eur_criterion_ghz(rho, n)
    if family == "cluster":
        return eur_criterion_cluster(rho, n)
    raise ValueError(f"unknown family {family!r}")
