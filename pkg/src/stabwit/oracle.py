"""Numerical cross-checks: product and biseparable optima, PSD certificates, noise thresholds.

Optima come from multistart alternating maximization. Every reported value
is attained by an explicit feasible state, so it is a lower bound on the
true maximum; agreement with analytic bounds is what the tests check.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .pauli import ConsistencyError, HermitianOperator, SizeError, check_size, expectation
from .states import DensityMatrix, State, bloch_to_ket, mix_with_white_noise, random_ket

DEFAULT_SEED = 0xC0FFEE
PRODUCT_RESTARTS = 64
BISEP_RESTARTS = 32
CONVERGENCE_TOL = 1e-10
PSD_SLACK = 1e-9
OPTIMIZER_MAX_QUBITS = 10
MAX_SWEEPS = 10_000

_CODE = {"I": 0, "X": 1, "Y": 2, "Z": 3}


class ThresholdError(ValueError):
    """The noise threshold is undefined for this witness and target."""


@dataclass
class OptimizationResult:
    value: float
    argmax_description: dict
    restarts_used: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "argmax_description": self.argmax_description,
            "restarts_used": self.restarts_used,
            "converged": self.converged,
        }


def _check_optimizer_size(n: int) -> None:
    check_size(n)
    if n > OPTIMIZER_MAX_QUBITS:
        raise SizeError(f"optimizers support at most {OPTIMIZER_MAX_QUBITS} qubits, got {n}")


def _run(jobs: Sequence, fn: Callable, workers: int) -> list:
    if workers <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


# ---------------------------------------------------------------- product states


def _term_arrays(op: HermitianOperator) -> tuple[np.ndarray, np.ndarray]:
    codes = np.array([[_CODE[ch] for ch in letters] for letters, _ in op.terms], dtype=np.intp)
    coeffs = np.array([c for _, c in op.terms], dtype=float)
    return codes.reshape(len(op.terms), op.n_qubits), coeffs


def _random_bloch(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def product_value(op: HermitianOperator, bloch: np.ndarray) -> float:
    """``<op>`` on the product state with the given ``(N, 3)`` Bloch vectors."""
    codes, coeffs = _term_arrays(op)
    return _product_value(codes, coeffs, bloch)


def _product_value(codes: np.ndarray, coeffs: np.ndarray, bloch: np.ndarray) -> float:
    ext = np.hstack([np.ones((bloch.shape[0], 1)), bloch])
    factors = ext[np.arange(bloch.shape[0])[None, :], codes]
    return float(coeffs @ factors.prod(axis=1))


def _ascend_product(codes, coeffs, bloch, sign):
    """Exact single-qubit updates until the gain drops below tolerance."""
    n = bloch.shape[0]
    ext = np.hstack([np.ones((n, 1)), bloch])
    cols = np.arange(n)[None, :]
    value = sign * float(coeffs @ ext[cols, codes].prod(axis=1))
    for _ in range(MAX_SWEEPS):
        for j in range(n):
            factors = ext[cols, codes]
            factors[:, j] = 1.0
            weights = sign * coeffs * factors.prod(axis=1)
            # <op> = const + b . r_j, maximized by r_j = b / |b|
            b = np.array([weights[codes[:, j] == a].sum() for a in (1, 2, 3)])
            norm = np.linalg.norm(b)
            if norm > 0:
                ext[j, 1:] = b / norm
        new = sign * float(coeffs @ ext[cols, codes].prod(axis=1))
        if new - value < CONVERGENCE_TOL:
            return max(new, value), ext[:, 1:], True
        value = new
    return value, ext[:, 1:], False


def max_over_product_states(
    op: HermitianOperator,
    restarts: int = PRODUCT_RESTARTS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    minimize: bool = False,
) -> OptimizationResult:
    """Largest (or smallest) expectation over pure product states.

    Separable mixtures cannot do better, since the set is convex and the
    objective linear.
    """
    n = op.n_qubits
    _check_optimizer_size(n)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    codes, coeffs = _term_arrays(op)
    sign = -1.0 if minimize else 1.0

    def job(idx):
        rng = np.random.default_rng([seed, idx])
        return _ascend_product(codes, coeffs, _random_bloch(n, rng), sign)

    results = _run(range(restarts), job, workers)
    best = max(range(restarts), key=lambda i: (results[i][0], -i))
    value, bloch, _ = results[best]
    # recompute from the returned point so the value is attained exactly
    attained = _product_value(codes, coeffs, bloch)
    return OptimizationResult(
        attained,
        {"bloch_vectors": bloch.tolist()},
        restarts,
        all(r[2] for r in results),
    )


def grid_scan_product_max(op: HermitianOperator, points: int = 12) -> float:
    """Brute-force product maximum for small N.

    The first ``N - 1`` qubits run over polar angles ``k pi / points``
    (``k = 0..points``, so both poles and the equator are included) and
    azimuths ``2 pi k / points``; the last qubit is optimized exactly.
    """
    n = op.n_qubits
    if n > 4:
        raise SizeError("grid scan is limited to N <= 4")
    theta = np.linspace(0, np.pi, points + 1)
    phi = 2 * np.pi * np.arange(points) / points
    t, f = np.meshgrid(theta, phi, indexing="ij")
    grid = np.stack(
        [np.ones(t.size), (np.sin(t) * np.cos(f)).ravel(), (np.sin(t) * np.sin(f)).ravel(), np.cos(t).ravel()],
        axis=1,
    )
    tensor = np.zeros((4,) * n)
    for letters, c in op.terms:
        tensor[tuple(_CODE[ch] for ch in letters)] = c
    if n == 1:
        return float(tensor[0] + np.linalg.norm(tensor[1:]))
    best = -np.inf
    # chunk over the first qubit to bound memory
    for row in grid:
        part = np.tensordot(row, tensor, axes=(0, 0)).reshape(1, -1)
        for _ in range(n - 2):
            part = np.einsum("ga,mar->mgr", grid, part.reshape(part.shape[0], 4, -1))
            part = part.reshape(-1, part.shape[-1])
        vals = part[:, 0] + np.linalg.norm(part[:, 1:], axis=1)
        best = max(best, float(vals.max()))
    return best


# ---------------------------------------------------------------- biseparable states


def bipartitions(n: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All ``2**(n-1) - 1`` cuts ``A|B``; qubit 0 always sits in ``A``."""
    out = []
    rest = range(1, n)
    for r in range(0, n - 1):
        for extra in itertools.combinations(rest, r):
            a = (0,) + extra
            b = tuple(k for k in range(n) if k not in a)
            out.append((a, b))
    return out


def _split_tensor(matrix: np.ndarray, n: int, part_a, part_b) -> np.ndarray:
    order = list(part_a) + list(part_b)
    t = matrix.reshape((2,) * (2 * n))
    t = t.transpose(order + [n + k for k in order])
    da, db = 1 << len(part_a), 1 << len(part_b)
    return t.reshape(da, db, da, db)


def _top_vector(mat: np.ndarray) -> tuple[float, np.ndarray]:
    vals, vecs = np.linalg.eigh((mat + mat.conj().T) / 2)
    return float(vals[-1]), vecs[:, -1]


def _alternate(t: np.ndarray, chi: np.ndarray):
    value = -np.inf
    for _ in range(MAX_SWEEPS):
        eff_a = np.einsum("aibj,i,j->ab", t, chi.conj(), chi)
        _, phi = _top_vector(eff_a)
        eff_b = np.einsum("aibj,a,b->ij", t, phi.conj(), phi)
        new, chi = _top_vector(eff_b)
        if new - value < CONVERGENCE_TOL:
            return new, phi, chi, True
        value = new
    return value, phi, chi, False


def max_over_biseparable(
    op: HermitianOperator,
    restarts: int = BISEP_RESTARTS,
    seed: int = DEFAULT_SEED,
    workers: int = 1,
    minimize: bool = False,
) -> OptimizationResult:
    """Largest (or smallest) expectation over pure states product across some cut.

    Mixed biseparable states are convex combinations of these, so the pure
    optimum is the biseparable optimum.
    """
    n = op.n_qubits
    _check_optimizer_size(n)
    if n < 2:
        raise ValueError("biseparability needs N >= 2")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    sign = -1.0 if minimize else 1.0
    matrix = sign * op.dense
    cuts = bipartitions(n)
    tensors = [_split_tensor(matrix, n, a, b) for a, b in cuts]
    jobs = [(ci, r) for ci in range(len(cuts)) for r in range(restarts)]

    def job(key):
        ci, r = key
        rng = np.random.default_rng([seed, ci, r])
        chi = random_ket(tensors[ci].shape[1], rng)
        return _alternate(tensors[ci], chi)

    results = _run(jobs, job, workers)
    best = max(range(len(jobs)), key=lambda i: (results[i][0], -i))
    _, phi, chi, _ = results[best]
    a, b = cuts[jobs[best][0]]
    attained = float(np.real(np.einsum("aibj,a,i,b,j->", tensors[jobs[best][0]], phi.conj(), chi.conj(), phi, chi)))
    return OptimizationResult(
        sign * attained,
        {
            "part_a": [k + 1 for k in a],
            "part_b": [k + 1 for k in b],
            "phi": [[z.real, z.imag] for z in phi],
            "chi": [[z.real, z.imag] for z in chi],
        },
        len(jobs),
        all(r[3] for r in results),
    )


def min_over_biseparable(op: HermitianOperator, **kwargs) -> OptimizationResult:
    return max_over_biseparable(op, minimize=True, **kwargs)


def w3_two_setting_lower_envelope(x: float, y: float) -> float:
    """Closed-form smallest eigenvalue of the reduced two-qubit operator.

    With one qubit's Bloch components ``(x, y)`` fixed, the remaining
    two-qubit operator has smallest eigenvalue ``sqrt5 - sqrt(1 + 4 (x^2 + y^2))``,
    which is nonnegative on the unit disk.
    """
    r2 = x * x + y * y
    if r2 > 1 + 1e-12:
        raise ValueError("(x, y) must lie in the unit disk")
    return math.sqrt(5) - math.sqrt(1 + 4 * r2)


def w3_two_setting_reduced(x: float, y: float) -> np.ndarray:
    """Two-qubit operator left after fixing qubit 1 of the two-setting W witness."""
    from .witnesses import w3_two_setting_witness

    t = _split_tensor(w3_two_setting_witness().operator.dense, 3, (0,), (1, 2))
    z = math.sqrt(max(0.0, 1 - x * x - y * y))
    ket = bloch_to_ket((x, y, z))
    return np.einsum("aibj,a,b->ij", t, ket.conj(), ket)


def min_over_biseparable_w3(op: HermitianOperator, **kwargs) -> float:
    return min_over_biseparable(op, **kwargs).value


# ---------------------------------------------------------------- certificates


def min_eigenvalue(op: HermitianOperator | np.ndarray) -> float:
    mat = op.dense if isinstance(op, HermitianOperator) else np.asarray(op)
    return float(np.linalg.eigvalsh(mat)[0])


@dataclass(frozen=True)
class DominanceCertificate:
    alpha: float
    min_eigenvalue: float
    holds: bool

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "min_eigenvalue": self.min_eigenvalue, "holds": self.holds}


def check_dominance(w: HermitianOperator, w_ref: HermitianOperator, alpha: float) -> DominanceCertificate:
    """Certificate for ``W - alpha W_ref >= 0``, which carries W_ref's bound over to W."""
    lam = min_eigenvalue(w.dense - alpha * w_ref.dense)
    return DominanceCertificate(float(alpha), lam, lam >= -PSD_SLACK)


# ---------------------------------------------------------------- thresholds


def noise_threshold_analytic(witness) -> float:
    """Largest white-noise weight at which the witness still fires on its target."""
    target_val = expectation(witness.operator, witness.target)
    denom = witness.operator.trace_per_dim - target_val
    if target_val >= 0 or denom <= 0:
        raise ThresholdError(f"threshold undefined: target value {target_val}, denominator {denom}")
    return -target_val / denom


def noise_threshold_empirical(
    criterion: Callable[[DensityMatrix], bool],
    target: State,
    width: float = 1e-4,
    monotonicity_samples: int = 21,
) -> float:
    """Bisection for the noise level where ``criterion`` stops detecting.

    Detection must be monotone along the noise family; a sampled check
    raises ``ConsistencyError`` if it is not.
    """
    detect = lambda p: bool(criterion(mix_with_white_noise(target, p)))
    samples = [detect(p) for p in np.linspace(0, 1, monotonicity_samples)]
    if not samples[0]:
        raise ThresholdError("criterion does not detect the noiseless target")
    first_miss = samples.index(False) if False in samples else len(samples)
    if any(samples[first_miss:]):
        raise ConsistencyError("detection is not monotone in the noise level")
    if first_miss == len(samples):
        return 1.0
    step = 1 / (monotonicity_samples - 1)
    lo, hi = (first_miss - 1) * step, first_miss * step
    while hi - lo > width:
        mid = (lo + hi) / 2
        if detect(mid):
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def witness_criterion(witness) -> Callable[[DensityMatrix], bool]:
    return lambda rho: witness.detects(rho)


def optimal_two_setting_noise(d1: float, d2: float) -> float:
    """Best two-setting noise tolerance for subgroups spanning dimensions ``d1`` and ``d2``."""
    if d1 < 1 or d2 < 1:
        raise ValueError("dimensions must be >= 1")
    return 1 / (4 - 2 / d1 - 2 / d2)


def ghz_two_setting_dims(n: int) -> tuple[int, int]:
    return 2, 2 ** (n - 1)


def cluster_two_setting_dims(n: int) -> tuple[int, int]:
    if n % 2 == 0:
        return 2 ** (n // 2), 2 ** (n // 2)
    return 2 ** ((n + 1) // 2), 2 ** ((n - 1) // 2)
