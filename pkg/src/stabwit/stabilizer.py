"""Stabilizer groups, the GHZ basis and local measurement settings."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .pauli import (
    DimensionError,
    HermitianOperator,
    PauliString,
    commutes,
    commutes_locally,
    pauli_mul,
    to_dense,
)
from .states import Graph, PureState

STABILIZE_TOL = 1e-9


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    rows = list(rows)
    while rows:
        pivot = rows.pop()
        if pivot == 0:
            continue
        rank += 1
        low = pivot & -pivot
        rows = [r ^ pivot if r & low else r for r in rows]
    return rank


@dataclass(frozen=True)
class StabilizerGroup:
    generators: tuple[PauliString, ...]

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("need at least one generator")
        n = gens[0].n_qubits
        for g in gens:
            if g.n_qubits != n:
                raise DimensionError("generators act on different numbers of qubits")
            if not g.is_hermitian:
                raise ValueError(f"generator {g} is not Hermitian")
        for a, b in itertools.combinations(gens, 2):
            if not commutes(a, b):
                raise ValueError(f"generators {a} and {b} do not commute")
        vecs = [(g.x << n) | g.z for g in gens]
        if _gf2_rank(vecs) != len(gens):
            raise ValueError("generators are not independent")

    @classmethod
    def from_strings(cls, strings: Sequence[str]) -> StabilizerGroup:
        return cls(tuple(PauliString.parse(s) for s in strings))

    @property
    def n_qubits(self) -> int:
        return self.generators[0].n_qubits

    def __len__(self) -> int:
        return len(self.generators)

    def operators(self) -> list[HermitianOperator]:
        return [HermitianOperator.from_pauli(g) for g in self.generators]

    def element(self, k: int) -> PauliString:
        """Product of the generators picked out by the binary digits of ``k``.

        The first generator corresponds to the most significant of the
        ``len(self)`` digits, so ``k = 0b110`` selects ``S1 S2`` of three.
        """
        m = len(self.generators)
        out = PauliString.identity(self.n_qubits)
        for l, g in enumerate(self.generators):
            if (k >> (m - 1 - l)) & 1:
                out = pauli_mul(out, g)
        return out

    def __iter__(self) -> Iterator[PauliString]:
        return enumerate_group(self)

    def contains_generators(self, k: int) -> tuple[int, ...]:
        m = len(self.generators)
        return tuple(l for l in range(m) if (k >> (m - 1 - l)) & 1)


def enumerate_group(group: StabilizerGroup) -> Iterator[PauliString]:
    for k in range(1 << len(group.generators)):
        yield group.element(k)


def ghz_generators(n: int) -> StabilizerGroup:
    if n < 2:
        raise ValueError("GHZ needs N >= 2")
    gens = ["X" * n]
    for k in range(1, n):
        gens.append("I" * (k - 1) + "ZZ" + "I" * (n - k - 1))
    return StabilizerGroup.from_strings(gens)


def cluster_generators(n: int) -> StabilizerGroup:
    if n < 2:
        raise ValueError("cluster needs N >= 2")
    return graph_generators(Graph.path(n))


def graph_generators(graph: Graph) -> StabilizerGroup:
    n = graph.n_vertices
    gens = []
    for k in range(n):
        letters = ["I"] * n
        letters[k] = "X"
        for l in graph.neighbors(k):
            letters[l] = "Z"
        gens.append("".join(letters))
    return StabilizerGroup.from_strings(gens)


def w3_stabilizing_ops() -> list[HermitianOperator]:
    third = 1 / 3
    specs = [
        {"ZII": third, "YYZ": 2 * third, "XZX": 2 * third},
        {"IZI": third, "ZYY": 2 * third, "XXZ": 2 * third},
        {"IIZ": third, "YZY": 2 * third, "ZXX": 2 * third},
    ]
    return [HermitianOperator.from_terms(3, s) for s in specs]


def w3_preparation_unitary() -> np.ndarray:
    u = HermitianOperator.from_terms(3, {"XZI": 1, "IXZ": 1, "ZIX": 1}) / np.sqrt(3)
    return u.to_dense()


def verify_stabilizes(
    ops: Sequence[Union[HermitianOperator, PauliString]], psi: PureState, tol: float = STABILIZE_TOL
) -> bool:
    vec = psi.amplitudes
    for op in ops:
        if op.n_qubits != psi.n_qubits:
            raise DimensionError(f"{op.n_qubits} vs {psi.n_qubits} qubits")
        mat = op.dense if isinstance(op, HermitianOperator) else to_dense(op)
        if np.linalg.norm(mat @ vec - vec) >= tol:
            return False
    return True


_PLUS_EIGEN = {
    "I": np.array([1, 0], dtype=complex),
    "Z": np.array([1, 0], dtype=complex),
    "X": np.array([1, 1], dtype=complex) / np.sqrt(2),
    "Y": np.array([1, 1j], dtype=complex) / np.sqrt(2),
}


def common_product_eigenstate(a: PauliString, b: PauliString) -> Optional[PureState]:
    """A product state that is an eigenstate of both strings, if one exists."""
    if not commutes_locally(a, b):
        return None
    psi = np.array([1.0 + 0j])
    for la, lb in zip(a.letters, b.letters):
        letter = la if la != "I" else lb
        psi = np.kron(psi, _PLUS_EIGEN[letter])
    return PureState(a.n_qubits, psi)


def ghz_basis(n: int) -> list[tuple[tuple[int, ...], PureState]]:
    """Common eigenbasis of the GHZ generators.

    Label ``(s_1, ..., s_N)`` means ``S_k`` has eigenvalue ``(-1)**s_k``;
    labels run in binary-counter order with ``s_1`` most significant.
    """
    out = []
    dim = 1 << n
    for label in itertools.product((0, 1), repeat=n):
        bits = [0]
        for s in label[1:]:
            bits.append(bits[-1] ^ s)
        idx = int("".join(map(str, bits)), 2)
        amps = np.zeros(dim, dtype=complex)
        amps[idx] = 1 / np.sqrt(2)
        amps[(dim - 1) ^ idx] = (-1) ** label[0] / np.sqrt(2)
        out.append((label, PureState(n, amps)))
    return out


@dataclass(frozen=True)
class MeasurementSetting:
    """One von Neumann observable per qubit; ``None`` marks an unconstrained qubit."""

    observables: tuple[Optional[str], ...]

    @classmethod
    def free(cls, n: int) -> MeasurementSetting:
        return cls((None,) * n)

    @classmethod
    def parse(cls, text: str) -> MeasurementSetting:
        return cls(tuple(None if ch == "*" else ch for ch in text))

    def measures(self, p: PauliString) -> bool:
        for obs, letter in zip(self.observables, p.letters):
            if letter != "I" and obs is not None and obs != letter:
                return False
        return True

    def extended(self, p: PauliString) -> MeasurementSetting:
        return MeasurementSetting(
            tuple(obs if letter == "I" else letter for obs, letter in zip(self.observables, p.letters))
        )

    def __str__(self) -> str:
        return "".join(o or "*" for o in self.observables)


def partition_into_settings(op: HermitianOperator) -> list[tuple[MeasurementSetting, list[str]]]:
    """Greedy first-fit grouping of Pauli terms into local settings.

    Terms are visited by descending weight, then lexicographically; each goes
    into the first setting that can measure it, fixing that setting's free
    qubits. The identity term rides along with the first setting.
    """
    n = op.n_qubits
    identity = "I" * n
    letters = [l for l, _ in op.terms if l != identity]
    letters.sort(key=lambda l: (-sum(ch != "I" for ch in l), l))
    groups: list[tuple[MeasurementSetting, list[str]]] = []
    for l in letters:
        p = PauliString.from_letters(l)
        for i, (setting, members) in enumerate(groups):
            if setting.measures(p):
                groups[i] = (setting.extended(p), members + [l])
                break
        else:
            groups.append((MeasurementSetting.free(n).extended(p), [l]))
    if identity in op.coefficients:
        if groups:
            groups[0][1].append(identity)
        else:
            groups.append((MeasurementSetting.free(n), [identity]))
    return groups


def count_settings(op: HermitianOperator) -> int:
    return len(partition_into_settings(op))


def max_one_setting_subgroup(group: StabilizerGroup) -> tuple[int, tuple[int, ...]]:
    """Largest generator subset whose generated subgroup commutes locally.

    A subgroup commutes locally iff its generators pairwise do, since a
    site holding only ``I`` and one letter stays that way under products.
    Returns ``(2**len(subset), subset)`` with 0-based generator indices.
    """
    gens = group.generators
    m = len(gens)
    ok = [[commutes_locally(a, b) for b in gens] for a in gens]
    for size in range(m, 0, -1):
        for subset in itertools.combinations(range(m), size):
            if all(ok[i][j] for i, j in itertools.combinations(subset, 2)):
                return 1 << size, subset
    return 1, ()


_LETTER_CODE = {"I": 0, "X": 1, "Y": 2, "Z": 3}


def _letter_codes(strings: Sequence[PauliString]) -> np.ndarray:
    return np.array([[_LETTER_CODE[ch] for ch in s.letters] for s in strings], dtype=np.int8)


def all_settings(n: int) -> np.ndarray:
    """Every fully specified setting as codes 1..3 (X, Y, Z), shape ``(3**n, n)``."""
    return np.array(list(itertools.product((1, 2, 3), repeat=n)), dtype=np.int8)


def compatibility(strings: Sequence[PauliString], settings: np.ndarray) -> np.ndarray:
    """Boolean ``(n_settings, n_strings)``: setting measures string."""
    codes = _letter_codes(strings)
    ok = (codes[None, :, :] == 0) | (codes[None, :, :] == settings[:, None, :])
    return ok.all(axis=2)


def max_setting_compatible_count(group: StabilizerGroup) -> int:
    """Most group elements (identity included) one setting can measure; exhaustive over 3**N settings."""
    elements = list(enumerate_group(group))
    return int(compatibility(elements, all_settings(group.n_qubits)).sum(axis=1).max())


def lemma1_classes(group: StabilizerGroup, l: int) -> list[Optional[int]]:
    """Class 1/2/3 (contains S_l only, S_{l+1} only, both) of every element, else None.

    ``l`` is 0-based, so classes refer to generators ``l`` and ``l + 1``.
    """
    out = []
    for k in range(1 << len(group)):
        has = set(group.contains_generators(k))
        a, b = l in has, (l + 1) in has
        out.append({(True, False): 1, (False, True): 2, (True, True): 3}.get((a, b)))
    return out


def lemma1_violations(n: int) -> list[tuple[int, str]]:
    """Settings that measure cluster elements from two different classes."""
    group = cluster_generators(n)
    elements = list(enumerate_group(group))
    settings = all_settings(n)
    compat = compatibility(elements, settings)
    bad = []
    for l in range(n - 1):
        classes = np.array([c or 0 for c in lemma1_classes(group, l)])
        for s_idx in range(settings.shape[0]):
            seen = set(classes[compat[s_idx]].tolist()) - {0}
            if len(seen) > 1:
                bad.append((l, "".join("XYZ"[c - 1] for c in settings[s_idx])))
    return bad


def ghz_setting_subgroups(n: int) -> tuple[list[PauliString], list[PauliString]]:
    """The two locally commuting subgroups ``{S1, 1}`` and ``<S2..SN>``."""
    g = ghz_generators(n)
    first = [PauliString.identity(n), g.generators[0]]
    second = list(enumerate_group(StabilizerGroup(g.generators[1:])))
    return first, second


def cluster_setting_subgroups(n: int) -> tuple[list[PauliString], list[PauliString]]:
    """``<S1, S3, ...>`` and ``<S2, S4, ...>``."""
    g = cluster_generators(n)
    odd = StabilizerGroup(g.generators[0::2])
    even = StabilizerGroup(g.generators[1::2])
    return list(enumerate_group(odd)), list(enumerate_group(even))


_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class DirectionalSetting:
    """One measurement direction (unit Bloch vector) per qubit."""

    directions: tuple[tuple[float, float, float], ...]

    @classmethod
    def uniform(cls, n: int, direction: Sequence[float]) -> DirectionalSetting:
        v = np.asarray(direction, dtype=float)
        v = v / np.linalg.norm(v)
        return cls((tuple(v.tolist()),) * n)

    @property
    def n_qubits(self) -> int:
        return len(self.directions)

    def observable(self, k: int) -> np.ndarray:
        return sum(c * s for c, s in zip(self.directions[k], _SIGMA))

    def correlation(self, subset: Sequence[int]) -> np.ndarray:
        """Dense product of the setting's observables on ``subset``, identity elsewhere."""
        out = np.ones((1, 1), dtype=complex)
        for k in range(self.n_qubits):
            out = np.kron(out, self.observable(k) if k in subset else np.eye(2))
        return out


def local_decomposition(
    op: HermitianOperator, settings: Sequence[DirectionalSetting]
) -> tuple[dict[tuple[int, tuple[int, ...]], float], float]:
    """Least-squares expansion of ``op`` in correlations the settings measure.

    Returns coefficients keyed by ``(setting index, qubit subset)`` and the
    Frobenius norm of the residual; a zero residual means ``op`` can be
    evaluated from these settings alone.
    """
    n = op.n_qubits
    subsets = [s for r in range(n + 1) for s in itertools.combinations(range(n), r)]
    keys, cols = [], []
    for i, setting in enumerate(settings):
        if setting.n_qubits != n:
            raise DimensionError(f"{setting.n_qubits} vs {n} qubits")
        for s in subsets:
            if not s and i > 0:
                continue
            keys.append((i, s))
            cols.append(setting.correlation(s).reshape(-1))
    a = np.array(cols).T
    b = op.dense.reshape(-1)
    # real coefficients: stack real and imaginary parts
    a_r = np.vstack([a.real, a.imag])
    b_r = np.concatenate([b.real, b.imag])
    coef, *_ = np.linalg.lstsq(a_r, b_r, rcond=None)
    residual = float(np.linalg.norm(a_r @ coef - b_r))
    return {k: float(c) for k, c in zip(keys, coef) if abs(c) > 1e-12}, residual


def w3_projector_settings() -> list[DirectionalSetting]:
    """Five uniform settings: Z and the four tilts of Z towards +-X and +-Y."""
    dirs = [(0, 0, 1), (1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)]
    return [DirectionalSetting.uniform(3, d) for d in dirs]
