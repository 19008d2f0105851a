"""State factories: GHZ, cluster, graph, W, white-noise mixtures, rho_3."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np

from .pauli import ConsistencyError, DimensionError, HermitianOperator, check_size

STATE_TOL = 1e-12
PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PureState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise DimensionError(f"{amps.shape[0]} amplitudes for {self.n_qubits} qubits")
        norm = np.linalg.norm(amps)
        if abs(norm - 1) > STATE_TOL:
            raise ValueError(f"state norm {norm} is not 1")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex]) -> PureState:
        amps = np.asarray(amplitudes, dtype=complex)
        n = amps.shape[0].bit_length() - 1
        return cls(n, amps / np.linalg.norm(amps))

    def density(self) -> DensityMatrix:
        psi = self.amplitudes
        return DensityMatrix(self.n_qubits, np.outer(psi, psi.conj()))

    def overlap(self, other: PureState) -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, rho: Union[PureState, DensityMatrix]) -> float:
        """``<psi|rho|psi>``."""
        if isinstance(rho, PureState):
            return abs(self.overlap(rho)) ** 2
        psi = self.amplitudes
        return float(np.real(np.vdot(psi, rho.matrix @ psi)))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    n_qubits: int
    matrix: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        dim = 1 << self.n_qubits
        if m.shape != (dim, dim):
            raise DimensionError(f"matrix shape {m.shape} for {self.n_qubits} qubits")
        if self.validate:
            if np.max(np.abs(m - m.conj().T)) > STATE_TOL:
                raise ValueError("density matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1) > STATE_TOL:
                raise ValueError(f"density matrix trace {tr} is not 1")
            lo = np.linalg.eigvalsh(m).min()
            if lo < -PSD_TOL:
                raise ValueError(f"density matrix has negative eigenvalue {lo:.3g}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def maximally_mixed(cls, n: int) -> DensityMatrix:
        return cls(n, np.eye(1 << n) / (1 << n))

    def density(self) -> DensityMatrix:
        return self

    def mix(self, other: DensityMatrix, weight: float) -> DensityMatrix:
        """``weight * self + (1 - weight) * other``."""
        return DensityMatrix(self.n_qubits, weight * self.matrix + (1 - weight) * other.matrix)


State = Union[PureState, DensityMatrix]


def as_density(state: State) -> DensityMatrix:
    return state.density()


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``."""

    n_vertices: int
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.adjacency, dtype=int)
        if a.shape != (self.n_vertices, self.n_vertices):
            raise ValueError("adjacency shape does not match n_vertices")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency matrix must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency matrix must have zero diagonal")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], one_based: bool = True) -> Graph:
        a = np.zeros((n, n), dtype=int)
        off = 1 if one_based else 0
        for k, l in edges:
            k, l = int(k) - off, int(l) - off
            if not (0 <= k < n and 0 <= l < n):
                raise ValueError(f"edge ({k + off}, {l + off}) out of range for {n} vertices")
            if k == l:
                raise ValueError("self-loops are not allowed")
            a[k, l] = a[l, k] = 1
        return cls(n, a)

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, [(k, k + 1) for k in range(n - 1)], one_based=False)

    @classmethod
    def star(cls, n: int, center: int = 0) -> Graph:
        return cls.from_edges(n, [(center, k) for k in range(n) if k != center], one_based=False)

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, np.ones((n, n), dtype=int) - np.eye(n, dtype=int))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, np.zeros((n, n), dtype=int))

    @classmethod
    def load(cls, path: Union[str, Path]) -> Graph:
        """JSON ``{"n": N, "edges": [[k, l], ...]}`` (1-based) or an edge list ``k l`` per line.

        A plain edge list may start with a single-number line giving ``n``;
        otherwise ``n`` is the largest vertex index seen.
        """
        text = Path(path).read_text()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            data = json.loads(text)
            return cls.from_edges(int(data["n"]), data["edges"])
        n = None
        edges = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) == 1 and n is None and not edges:
                n = int(parts[0])
                continue
            if len(parts) != 2:
                raise ValueError(f"bad edge line {line!r}")
            edges.append((int(parts[0]), int(parts[1])))
        if n is None:
            n = max((max(e) for e in edges), default=0)
        return cls.from_edges(n, edges)

    def to_json(self) -> dict:
        return {"n": self.n_vertices, "edges": [[k + 1, l + 1] for k, l in self.edges()]}

    def edges(self) -> list[tuple[int, int]]:
        """0-based edges with ``k < l``."""
        k, l = np.nonzero(np.triu(self.adjacency))
        return list(zip(k.tolist(), l.tolist()))

    def neighbors(self, k: int) -> list[int]:
        return np.nonzero(self.adjacency[k])[0].tolist()

    def is_connected(self) -> bool:
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_vertices

    def greedy_coloring(self) -> list[int]:
        """First-fit proper coloring in vertex order."""
        colors: list[int] = []
        for v in range(self.n_vertices):
            used = {colors[w] for w in self.neighbors(v) if w < v}
            c = 0
            while c in used:
                c += 1
            colors.append(c)
        return colors


def _check_n(n: int, lo: int = 2) -> None:
    if not isinstance(n, (int, np.integer)) or n < lo:
        raise ValueError(f"need an integer N >= {lo}, got {n!r}")
    check_size(int(n))


def make_ghz(n: int) -> PureState:
    _check_n(n)
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return PureState(n, amps)


def stabilized_state(ops: Sequence[HermitianOperator]) -> PureState:
    """Unique common +1 eigenvector of commuting generators.

    The product of ``(S_k + 1) / 2`` must be a rank-one projector; anything
    else means the generators do not pin down a single state.
    """
    n = ops[0].n_qubits
    dim = 1 << n
    proj = np.eye(dim, dtype=complex)
    for op in ops:
        proj = proj @ ((op.dense + np.eye(dim)) / 2)
    tr = np.trace(proj).real
    if abs(tr - 1) > 1e-9:
        raise ConsistencyError(f"stabilizer projector has trace {tr:.6g}, expected 1")
    vals, vecs = np.linalg.eigh((proj + proj.conj().T) / 2)
    psi = vecs[:, -1]
    # fix the global phase so the largest amplitude is real positive
    k = int(np.argmax(np.abs(psi)))
    psi = psi * np.exp(-1j * np.angle(psi[k]))
    return PureState(n, psi / np.linalg.norm(psi))


def make_cluster(n: int) -> PureState:
    from .stabilizer import cluster_generators

    _check_n(n)
    return stabilized_state(cluster_generators(n).operators())


def make_graph_state(graph: Graph) -> PureState:
    from .stabilizer import graph_generators

    _check_n(graph.n_vertices, lo=1)
    return stabilized_state(graph_generators(graph).operators())


def make_w3() -> PureState:
    amps = np.zeros(8, dtype=complex)
    amps[[0b100, 0b010, 0b001]] = 1 / np.sqrt(3)
    return PureState(3, amps)


def make_w3_bar() -> PureState:
    amps = np.zeros(8, dtype=complex)
    amps[[0b011, 0b101, 0b110]] = 1 / np.sqrt(3)
    return PureState(3, amps)


def mix_with_white_noise(state: State, p: float) -> DensityMatrix:
    """``p * 1/2**N + (1 - p) * rho``."""
    if not 0 <= p <= 1:
        raise ValueError(f"noise fraction {p} outside [0, 1]")
    rho = state.density().matrix
    dim = rho.shape[0]
    return DensityMatrix(state.n_qubits, p * np.eye(dim) / dim + (1 - p) * rho)


def make_rho3() -> DensityMatrix:
    """Equal mixture of ``(|00>+|11>)|0>/sqrt2`` and ``(|00>-|11>)|1>/sqrt2``."""
    xi_plus = np.zeros(8, dtype=complex)
    xi_plus[[0b000, 0b110]] = 1 / np.sqrt(2)
    xi_minus = np.zeros(8, dtype=complex)
    xi_minus[0b001] = 1 / np.sqrt(2)
    xi_minus[0b111] = -1 / np.sqrt(2)
    rho = 0.5 * (np.outer(xi_plus, xi_plus.conj()) + np.outer(xi_minus, xi_minus.conj()))
    return DensityMatrix(3, rho)


def make_c4_prime() -> PureState:
    """Locally rotated four-qubit cluster state ``(|0000>+|0011>+|1100>-|1111>)/2``."""
    amps = np.zeros(16, dtype=complex)
    amps[[0b0000, 0b0011, 0b1100]] = 0.5
    amps[0b1111] = -0.5
    return PureState(4, amps)


def product_state(qubit_states: Sequence[Sequence[complex]]) -> PureState:
    psi = np.array([1.0 + 0j])
    for q in qubit_states:
        q = np.asarray(q, dtype=complex)
        psi = np.kron(psi, q / np.linalg.norm(q))
    return PureState(len(qubit_states), psi)


def bloch_to_ket(r: Sequence[float]) -> np.ndarray:
    """Qubit ket with Bloch vector ``r`` (unit length)."""
    x, y, z = r
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.arctan2(y, x)
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)])


def random_ket(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_product_state(n: int, rng: np.random.Generator) -> PureState:
    return product_state([random_ket(2, rng) for _ in range(n)])


def bipartition_state(n: int, part_a: Sequence[int], phi: np.ndarray, chi: np.ndarray) -> PureState:
    """``|phi>_A |chi>_B`` placed on 0-based qubits ``part_a`` and the rest."""
    part_a = sorted(part_a)
    part_b = [k for k in range(n) if k not in part_a]
    psi = np.kron(phi, chi).reshape((2,) * n)
    order = part_a + part_b
    # axis j of psi is qubit order[j]; move it back to position order[j]
    psi = np.moveaxis(psi, list(range(n)), order)
    return PureState(n, psi.reshape(-1))


def random_biseparable_state(
    n: int, rng: np.random.Generator, part_a: Sequence[int] | None = None
) -> PureState:
    """Haar state on each side of a (random, unless given) bipartition."""
    if part_a is None:
        while True:
            mask = rng.integers(0, 2, size=n)
            if 0 < mask.sum() < n:
                break
        part_a = [k for k in range(n) if mask[k]]
    na = len(part_a)
    return bipartition_state(n, part_a, random_ket(1 << na, rng), random_ket(1 << (n - na), rng))
