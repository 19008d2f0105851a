import numpy as np
import pytest

from stabwit import nonlinear as NL
from stabwit import witnesses as W
from stabwit.pauli import DimensionError, HermitianOperator
from stabwit.states import (
    DensityMatrix,
    PureState,
    bipartition_state,
    make_cluster,
    make_ghz,
    mix_with_white_noise,
    product_state,
    random_ket,
    random_product_state,
)

H = HermitianOperator.from_pauli


def test_variance_basics():
    zero = PureState(1, np.array([1, 0]))
    assert NL.variance(H("Z"), zero) == pytest.approx(0)
    assert NL.variance(H("X"), zero) == pytest.approx(1)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_lur_ghz_on_ghz(n):
    for k in range(1, n):
        rep = NL.lur_ghz(make_ghz(n), n, k)
        assert rep.linear_part == pytest.approx(-1) and rep.correction == pytest.approx(0, abs=1e-12)
        assert rep.detected
        three = NL.lur_ghz_three(make_ghz(n), n, k + 1)
        assert three.linear_part == pytest.approx(-2) and three.correction == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4])
def test_linear_parts_equal_witnesses(n, rng):
    for _ in range(5):
        rho = DensityMatrix(n, mix_with_white_noise(random_product_state(n, rng), 0.3).matrix)
        psi = PureState(n, random_ket(2**n, rng))
        for state in (rho, psi):
            for k in range(1, n):
                assert NL.lur_ghz(state, n, k).linear_part == pytest.approx(W.ghz_two_term(n, k + 1).expectation(state))
                assert NL.lur_ghz_three(state, n, k + 1).linear_part == pytest.approx(
                    W.ghz_three_term(n, k + 1).expectation(state)
                )
                assert NL.lur_cluster(state, n, k).linear_part == pytest.approx(
                    W.cluster_two_term(n, k).expectation(state)
                )


def test_lur_at_white_noise_threshold():
    for n in (3, 4):
        rho = mix_with_white_noise(make_ghz(n), 0.5)
        assert NL.lur_ghz(rho, n, 1).total == pytest.approx(0, abs=1e-12)


def test_lur_product_and_plus_states():
    for n in (3, 4):
        zeros = product_state([[1, 0]] * n)
        plus = product_state([[1, 1]] * n)
        for k in range(1, n):
            assert NL.lur_ghz(zeros, n, k).total >= 0
            assert NL.lur_ghz_three(plus, n, k + 1).total >= 0


@pytest.mark.parametrize("n", [3, 4, 5])
def test_lur_cluster(n):
    for k in range(1, n):
        assert NL.lur_cluster(make_cluster(n), n, k).total <= -1 + 1e-12
        assert NL.lur_cluster(DensityMatrix.maximally_mixed(n), n, k).total == pytest.approx(1)


def test_lur_sound_on_cut_product_mixtures(rng):
    # separable across the cut, including mixtures
    for _ in range(500):
        n = int(rng.integers(3, 5))
        k = int(rng.integers(1, n))
        states = [bipartition_state(n, list(range(k)), random_ket(2**k, rng), random_ket(2 ** (n - k), rng)) for _ in range(3)]
        weights = rng.dirichlet(np.ones(3))
        rho = DensityMatrix(n, sum(w * s.density().matrix for w, s in zip(weights, states)))
        for rep in (NL.lur_ghz(rho, n, k), NL.lur_ghz_three(rho, n, k + 1), NL.lur_cluster(rho, n, k)):
            assert rep.total >= -1e-9
            assert rep.correction >= 0
            assert rep.total <= rep.linear_part + 1e-15


def test_fixture_detected_only_by_lur(lur_fixture_state):
    rho = lur_fixture_state
    assert not W.ghz_two_term(3, 2).detects(rho)
    assert NL.lur_ghz(rho, 3, 1).detected


def test_variance_sum_bounds(rng):
    n = 3
    for k in (1, 2):
        pairs = NL.lur_ghz_three_pairs(n, k + 1)
        a_ops = [a for a, _ in pairs]
        NL.check_anticommuting(a_ops)
        NL.check_anticommuting([b for _, b in pairs])
        for _ in range(5_000):
            psi = PureState(n, random_ket(2**n, rng))
            assert sum(NL.variance(a, psi) for a in a_ops) >= 2 - 1e-9
            assert sum(NL.variance(a, psi) for a in a_ops[:2]) >= 1 - 1e-9


def test_anticommuting_bound():
    zero = PureState(1, np.array([1, 0]))
    assert NL.anticommuting_mean_bound([H("X"), H("Y"), H("Z")], zero) == pytest.approx(1)
    with pytest.raises(NL.ContractError):
        NL.anticommuting_mean_bound([H("X"), H("X")], zero)
    with pytest.raises(NL.ContractError):
        NL.anticommuting_mean_bound([HermitianOperator.from_terms(1, {"Z": 2.0})], zero)


def test_argument_checks():
    with pytest.raises(ValueError):
        NL.lur_ghz(make_ghz(3), 3, 3)
    with pytest.raises(DimensionError):
        NL.lur_ghz(make_ghz(3), 4, 1)
