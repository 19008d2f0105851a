"""Phased Pauli strings and real-weighted sums of them.

Letters are stored symplectically: two integer bitmasks ``x`` and ``z`` where
qubit ``k`` (0-based, qubit 1 of the paper being ``k = 0``) lives at bit
``n - 1 - k``. That way the bit layout of a mask matches the computational
basis index, with qubit 1 the most significant tensor factor everywhere.

A string is ``i**phase_exp`` times the tensor product of its letters, with
``Y`` the usual Pauli ``Y`` (``Y = i X Z``).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union

import numpy as np

DEFAULT_MAX_QUBITS = 12
HERMITICITY_TOL = 1e-12
IMAG_TOL = 1e-10
PRUNE_TOL = 1e-14

_PHASE_TEXT = {0: "", 1: "i", 2: "-", 3: "-i"}
_PHASE_VALUE = {0: 1, 1: 1j, 2: -1, 3: -1j}
_STRING_RE = re.compile(r"^([+-]?)(i?)([IXYZ]+)$")


class DimensionError(ValueError):
    """Operands act on different numbers of qubits."""


class SizeError(ValueError):
    """Requested dense object exceeds the configured qubit limit."""


class ConsistencyError(RuntimeError):
    """A numerical result violated an internal invariant."""


def max_qubits() -> int:
    return int(os.environ.get("STABWIT_MAX_QUBITS", DEFAULT_MAX_QUBITS))


def check_size(n: int) -> None:
    if n > max_qubits():
        raise SizeError(
            f"{n} qubits exceeds the dense limit of {max_qubits()} "
            "(set STABWIT_MAX_QUBITS to raise it)"
        )


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    x: int = 0
    z: int = 0
    phase_exp: int = 0

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        full = (1 << self.n_qubits) - 1
        if self.x & ~full or self.z & ~full:
            raise ValueError("letter masks exceed n_qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def from_letters(cls, letters: str, phase: complex = 1) -> PauliString:
        n = len(letters)
        x = z = 0
        for k, ch in enumerate(letters):
            bit = 1 << (n - 1 - k)
            if ch in "XY":
                x |= bit
            if ch in "ZY":
                z |= bit
            if ch not in "IXYZ":
                raise ValueError(f"bad Pauli letter {ch!r}")
        exps = {v: k for k, v in _PHASE_VALUE.items()}
        if phase not in exps:
            raise ValueError("phase must be one of +1, -1, +i, -i")
        return cls(n, x, z, exps[phase])

    @classmethod
    def parse(cls, text: str) -> PauliString:
        """Parse ``"-YXY"``, ``"XXIZ"``, ``"+iZ"`` or ``"-iXY"``."""
        m = _STRING_RE.match(text.strip())
        if not m:
            raise ValueError(f"cannot parse Pauli string {text!r}")
        sign, imag, letters = m.groups()
        exp = (2 if sign == "-" else 0) + (1 if imag else 0)
        return cls.from_letters(letters)._with_phase(exp)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> PauliString:
        """``letter`` on 0-based ``qubit``, identity elsewhere."""
        letters = ["I"] * n
        letters[qubit] = letter
        return cls.from_letters("".join(letters))

    def _with_phase(self, exp: int) -> PauliString:
        return PauliString(self.n_qubits, self.x, self.z, exp)

    @property
    def letters(self) -> str:
        out = []
        for k in range(self.n_qubits):
            bit = 1 << (self.n_qubits - 1 - k)
            out.append("IXZY"[bool(self.x & bit) + 2 * bool(self.z & bit)])
        return "".join(out)

    @property
    def phase(self) -> complex:
        return _PHASE_VALUE[self.phase_exp]

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def is_hermitian(self) -> bool:
        return self.phase_exp % 2 == 0

    @property
    def unsigned(self) -> PauliString:
        return self._with_phase(0)

    def __neg__(self) -> PauliString:
        return self._with_phase(self.phase_exp + 2)

    def __mul__(self, other: PauliString) -> PauliString:
        return pauli_mul(self, other)

    def __str__(self) -> str:
        return _PHASE_TEXT[self.phase_exp] + self.letters

    def __repr__(self) -> str:
        return f"PauliString({str(self)!r})"

    def to_dense(self) -> np.ndarray:
        return to_dense(self)


def _check_same(a, b) -> None:
    if a.n_qubits != b.n_qubits:
        raise DimensionError(f"{a.n_qubits} vs {b.n_qubits} qubits")


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    _check_same(a, b)
    x = a.x ^ b.x
    z = a.z ^ b.z
    # reorder Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1, then refold i^{x.z} into the letters
    exp = (
        a.phase_exp
        + b.phase_exp
        + _popcount(a.x & a.z)
        + _popcount(b.x & b.z)
        + 2 * _popcount(a.z & b.x)
        - _popcount(x & z)
    )
    return PauliString(a.n_qubits, x, z, exp)


def commutes(a: PauliString, b: PauliString) -> bool:
    _check_same(a, b)
    return _popcount((a.x & b.z) ^ (a.z & b.x)) % 2 == 0


def commutes_locally(a: PauliString, b: PauliString) -> bool:
    _check_same(a, b)
    both = (a.x | a.z) & (b.x | b.z)
    differ = (a.x ^ b.x) | (a.z ^ b.z)
    return both & differ == 0


def _dense_pauli(n: int, x: int, z: int, phase_exp: int) -> np.ndarray:
    dim = 1 << n
    cols = np.arange(dim)
    rows = cols ^ x
    parity = np.zeros(dim, dtype=np.int64)
    zc = cols & z
    for k in range(n):
        parity ^= (zc >> k) & 1
    phase = _PHASE_VALUE[(phase_exp + _popcount(x & z)) % 4]
    out = np.zeros((dim, dim), dtype=complex)
    out[rows, cols] = phase * (1 - 2 * parity)
    return out


def to_dense(op: Union[HermitianOperator, PauliString]) -> np.ndarray:
    """Dense ``2**n x 2**n`` matrix with qubit 1 as the most significant factor."""
    check_size(op.n_qubits)
    if isinstance(op, PauliString):
        return _dense_pauli(op.n_qubits, op.x, op.z, op.phase_exp)
    return op.dense.copy()


@dataclass(frozen=True)
class HermitianOperator:
    """Real linear combination of unphased Pauli strings.

    ``terms`` is a sorted tuple of ``(letters, coefficient)`` pairs; build one
    with :meth:`from_terms` or the arithmetic operators instead of by hand.
    """

    n_qubits: int
    terms: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        for letters, c in self.terms:
            if len(letters) != self.n_qubits:
                raise DimensionError(f"term {letters} does not act on {self.n_qubits} qubits")
            if not np.isfinite(c):
                raise ValueError("coefficients must be finite")

    @classmethod
    def from_terms(
        cls,
        n_qubits: int,
        terms: Union[Mapping[str, complex], Iterable[tuple[Union[str, PauliString], complex]]],
    ) -> HermitianOperator:
        """Collect terms, folding string phases into coefficients.

        Raises :class:`ConsistencyError` if the collected sum is not Hermitian.
        """
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[str, complex] = {}
        for key, c in items:
            p = PauliString.parse(key) if isinstance(key, str) else key
            if p.n_qubits != n_qubits:
                raise DimensionError(f"term {p} does not act on {n_qubits} qubits")
            acc[p.letters] = acc.get(p.letters, 0) + complex(c) * p.phase
        out = []
        for letters, c in acc.items():
            if abs(c.imag) > IMAG_TOL:
                raise ConsistencyError(f"non-Hermitian coefficient {c} on {letters}")
            if abs(c.real) > PRUNE_TOL:
                out.append((letters, float(c.real)))
        return cls(n_qubits, tuple(sorted(out)))

    @classmethod
    def identity(cls, n: int, scale: float = 1.0) -> HermitianOperator:
        return cls.from_terms(n, {"I" * n: scale})

    @classmethod
    def from_pauli(cls, p: Union[PauliString, str], coeff: float = 1.0) -> HermitianOperator:
        p = PauliString.parse(p) if isinstance(p, str) else p
        if not p.is_hermitian:
            raise ConsistencyError(f"{p} is anti-Hermitian")
        return cls.from_terms(p.n_qubits, [(p, coeff)])

    @classmethod
    def from_dense(cls, matrix: np.ndarray, n: int | None = None) -> HermitianOperator:
        return pauli_decompose(matrix, n)

    @property
    def coefficients(self) -> dict[str, float]:
        return dict(self.terms)

    def strings(self) -> list[tuple[PauliString, float]]:
        return [(PauliString.from_letters(l), c) for l, c in self.terms]

    @property
    def constant(self) -> float:
        return self.coefficients.get("I" * self.n_qubits, 0.0)

    @property
    def trace_per_dim(self) -> float:
        """``Tr(op) / 2**n``."""
        return self.constant

    @property
    def support(self) -> set[int]:
        """0-based qubits touched by some non-identity term."""
        out = set()
        for letters, _ in self.terms:
            out.update(k for k, ch in enumerate(letters) if ch != "I")
        return out

    @cached_property
    def dense(self) -> np.ndarray:
        check_size(self.n_qubits)
        dim = 1 << self.n_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for p, c in self.strings():
            out += c * _dense_pauli(p.n_qubits, p.x, p.z, 0)
        return out

    def to_dense(self) -> np.ndarray:
        return to_dense(self)

    def _combine(self, other: HermitianOperator, sign: float) -> HermitianOperator:
        _check_same(self, other)
        acc = dict(self.terms)
        for l, c in other.terms:
            acc[l] = acc.get(l, 0.0) + sign * c
        return HermitianOperator.from_terms(self.n_qubits, acc)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return self + HermitianOperator.identity(self.n_qubits, float(other))
        return self._combine(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            return self + (-float(other))
        return self._combine(other, -1.0)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self * -1.0

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return HermitianOperator.from_terms(
                self.n_qubits, [(l, c * float(other)) for l, c in self.terms]
            )
        if isinstance(other, PauliString):
            other = HermitianOperator.from_pauli(other)
        return operator_product(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self * other
        return NotImplemented

    def __truediv__(self, other: float):
        return self * (1.0 / other)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for l, c in self.terms:
            parts.append(f"{c:+.12g}*{l}")
        return " ".join(parts)

    def allclose(self, other: HermitianOperator, atol: float = 1e-12) -> bool:
        diff = self - other
        return all(abs(c) <= atol for _, c in diff.terms)


def operator_product(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """Exact product; the intermediate ±i phases must cancel."""
    _check_same(a, b)
    pa = a.strings()
    pb = b.strings()
    acc: list[tuple[PauliString, complex]] = []
    for p, c in pa:
        for q, d in pb:
            acc.append((pauli_mul(p, q), c * d))
    return HermitianOperator.from_terms(a.n_qubits, acc)


def _fwht(a: np.ndarray, n: int) -> np.ndarray:
    """Unnormalised Walsh-Hadamard transform along axis 0."""
    shape = a.shape
    out = a.reshape((2,) * n + shape[1:]).astype(complex)
    for k in range(n):
        lo = np.take(out, 0, axis=k)
        hi = np.take(out, 1, axis=k)
        out = np.stack([lo + hi, lo - hi], axis=k)
    return out.reshape(shape)


def pauli_decompose(matrix: np.ndarray, n: int | None = None, tol: float = PRUNE_TOL) -> HermitianOperator:
    """Pauli coefficients ``Tr(P M) / 2**n`` of a Hermitian matrix."""
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0]
    if n is None:
        n = dim.bit_length() - 1
    if matrix.shape != (1 << n, 1 << n):
        raise DimensionError("matrix is not 2**n square")
    check_size(n)
    if np.max(np.abs(matrix - matrix.conj().T)) > 1e-10:
        raise ConsistencyError("matrix is not Hermitian")
    cols = np.arange(dim)
    # v[x, c] = M[c ^ x, c]; then Tr(X^x Z^z M) = sum_c (-1)^{z.c} M[c ^ x, c]
    v = matrix[cols[None, :] ^ cols[:, None], cols[None, :]]
    w = _fwht(v.T, n).T  # w[x, z]
    terms = []
    for x in range(dim):
        for z in np.nonzero(np.abs(w[x]) > tol * dim)[0]:
            z = int(z)
            # letter(x,z) = i^{popcount(x&z)} X^x Z^z
            coeff = w[x, z] * (1j) ** (-_popcount(x & z)) / dim
            terms.append((PauliString(n, x, z), coeff))
    return HermitianOperator.from_terms(n, terms)


def expectation(op: Union[HermitianOperator, PauliString], state) -> float:
    """``Tr(op rho)`` for a density matrix or ``<psi|op|psi>`` for a pure state."""
    if op.n_qubits != state.n_qubits:
        raise DimensionError(f"{op.n_qubits} vs {state.n_qubits} qubits")
    mat = op.dense if isinstance(op, HermitianOperator) else to_dense(op)
    if hasattr(state, "amplitudes"):
        psi = state.amplitudes
        val = np.vdot(psi, mat @ psi)
    else:
        val = np.einsum("ij,ji->", mat, state.matrix)
    if abs(val.imag) > IMAG_TOL:
        raise ConsistencyError(f"expectation has imaginary part {val.imag:.3g}")
    return float(val.real)
