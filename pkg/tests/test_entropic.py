import math

import numpy as np
import pytest

from stabwit import entropic as E
from stabwit.pauli import ConsistencyError, HermitianOperator
from stabwit.stabilizer import enumerate_group, ghz_generators
from stabwit.states import DensityMatrix, PureState, make_cluster, make_ghz, random_biseparable_state

H = HermitianOperator.from_pauli
LN2 = math.log(2)


def test_outcome_distribution_examples():
    zero = PureState(1, np.array([1, 0]))
    assert E.outcome_distribution(H("Z"), zero).as_dict() == pytest.approx({-1.0: 0.0, 1.0: 1.0})
    d = E.outcome_distribution(H("XX"), DensityMatrix.maximally_mixed(2))
    assert d.eigenvalues == pytest.approx((-1, 1)) and d.probabilities == pytest.approx((0.5, 0.5))


def test_stabilizer_elements_have_point_mass():
    ghz = make_ghz(3)
    for e in enumerate_group(ghz_generators(3)):
        letters = e.letters
        op = HermitianOperator.from_terms(3, [(e, 1.0)])
        d = E.outcome_distribution(op, ghz).as_dict()
        assert d.get(1.0, 0) == pytest.approx(1), letters


def test_degenerate_eigenvalues_merge():
    op = HermitianOperator.from_terms(2, {"ZI": 1, "IZ": 1})
    assert len(E.outcome_distribution(op, DensityMatrix.maximally_mixed(2)).eigenvalues) == 3


def test_distribution_validation():
    with pytest.raises(ConsistencyError):
        E.OutcomeDistribution((1.0, -1.0), (0.7, 0.7))


def test_shannon_entropy():
    assert E.shannon_entropy(E.OutcomeDistribution((1.0,), (1.0,))) == 0
    assert E.shannon_entropy(E.OutcomeDistribution((1.0, -1.0), (0.5, 0.5))) == pytest.approx(LN2)
    expected = 0.75 * math.log(4 / 3) + 0.25 * math.log(4)
    assert E.shannon_entropy(E.OutcomeDistribution((1.0, -1.0), (0.75, 0.25))) == pytest.approx(expected)


def test_eur_bounds():
    assert E.eur_bound(H("X"), H("Y")) == pytest.approx(LN2, abs=1e-10)
    assert E.eur_bound(H("XZX"), H("IIY")) == pytest.approx(LN2, abs=1e-10)
    assert E.eur_bound(H("XZ"), H("XZ")) == pytest.approx(0, abs=1e-12)


def test_eur_single_qubit_holds(rng):
    from stabwit.states import random_ket

    for _ in range(200):
        psi = PureState(1, random_ket(2, rng))
        hx = E.shannon_entropy(E.outcome_distribution(H("X"), psi))
        hy = E.shannon_entropy(E.outcome_distribution(H("Y"), psi))
        assert hx + hy >= LN2 - 1e-9


@pytest.mark.parametrize("n", [3, 4, 5])
def test_criterion_on_pure_and_mixed(n):
    lhs, det = E.eur_criterion_ghz(make_ghz(n), n)
    assert lhs == pytest.approx(0, abs=1e-12) and det
    lhs, det = E.eur_criterion_cluster(make_cluster(n), n)
    assert lhs == pytest.approx(0, abs=1e-12) and det
    lhs, det = E.eur_criterion_ghz(DensityMatrix.maximally_mixed(n), n)
    assert lhs == pytest.approx(n * LN2) and not det


def test_criterion_sound_on_all_bipartitions(rng):
    from stabwit.oracle import bipartitions

    for n in (3, 4):
        for part_a, _ in bipartitions(n):
            for _ in range(40):
                psi = random_biseparable_state(n, rng, part_a=list(part_a))
                assert E.eur_criterion_ghz(psi, n)[0] >= LN2 - 1e-9
                assert E.eur_criterion_cluster(psi, n)[0] >= LN2 - 1e-9


def test_entropy_concave_under_mixing(rng):
    for _ in range(100):
        a = random_biseparable_state(3, rng).density()
        b = random_biseparable_state(3, rng).density()
        w = rng.uniform()
        mix = a.mix(b, w)
        lhs_mix = E.eur_criterion_ghz(mix, 3)[0]
        assert lhs_mix >= w * E.eur_criterion_ghz(a, 3)[0] + (1 - w) * E.eur_criterion_ghz(b, 3)[0] - 1e-12


def test_unknown_family():
    with pytest.raises(ValueError):
        E.eur_criterion("w", make_ghz(3), 3)
