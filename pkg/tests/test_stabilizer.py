import itertools

import numpy as np
import pytest

from stabwit.pauli import HermitianOperator, PauliString, pauli_mul, to_dense
from stabwit.states import Graph, make_cluster, make_ghz, make_w3
from stabwit.stabilizer import (
    MeasurementSetting,
    StabilizerGroup,
    cluster_generators,
    cluster_setting_subgroups,
    common_product_eigenstate,
    count_settings,
    enumerate_group,
    ghz_basis,
    ghz_generators,
    ghz_setting_subgroups,
    graph_generators,
    lemma1_violations,
    local_decomposition,
    max_one_setting_subgroup,
    max_setting_compatible_count,
    partition_into_settings,
    verify_stabilizes,
    w3_preparation_unitary,
    w3_projector_settings,
    w3_stabilizing_ops,
)
from stabwit import witnesses

P = PauliString.parse


def test_ghz_generators_n3():
    assert [str(g) for g in ghz_generators(3).generators] == ["XXX", "ZZI", "IZZ"]
    with pytest.raises(ValueError):
        ghz_generators(1)


def test_cluster_generators_n4():
    assert [str(g) for g in cluster_generators(4).generators] == ["XZII", "ZXZI", "IZXZ", "IIZX"]


def test_star_graph_center():
    assert str(graph_generators(Graph.star(5)).generators[0]) == "XZZZZ"


def test_triangle_graph_generators_commute():
    g = Graph.from_edges(7, [(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 6), (5, 7)])
    StabilizerGroup(graph_generators(g).generators)  # validation checks commutation


def test_group_validation():
    with pytest.raises(ValueError):
        StabilizerGroup.from_strings(["XX", "ZI"])  # anticommute
    with pytest.raises(ValueError):
        StabilizerGroup.from_strings(["XX", "ZZ", "-YY"])  # dependent
    with pytest.raises(ValueError):
        StabilizerGroup((P("iXX"),))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_generators_stabilize_their_states(n):
    assert verify_stabilizes(ghz_generators(n).operators(), make_ghz(n))
    assert verify_stabilizes(cluster_generators(n).operators(), make_cluster(n))
    assert not verify_stabilizes(ghz_generators(3).operators(), make_w3())


def test_enumeration_order_and_closure():
    g = ghz_generators(3)
    elems = list(enumerate_group(g))
    assert elems[0] == PauliString.identity(3)
    assert g.element(0b110) == P("-YYX")
    assert len(set(elems)) == 8
    for n in range(2, 7):
        elems = set(enumerate_group(cluster_generators(n)))
        assert len(elems) == 2**n
        if n <= 4:
            assert all(pauli_mul(a, b) in elems for a in elems for b in elems)
    ghz = make_ghz(4)
    for e in enumerate_group(ghz_generators(4)):
        assert np.vdot(ghz.amplitudes, to_dense(e) @ ghz.amplitudes).real == pytest.approx(1)


def test_common_product_eigenstate():
    psi = common_product_eigenstate(P("ZZII"), P("IZZI"))
    assert psi is not None and abs(psi.amplitudes[0]) == pytest.approx(1)
    assert common_product_eigenstate(P("XXX"), P("ZZI")) is None
    assert common_product_eigenstate(P("XZ"), P("ZX")) is None
    psi = common_product_eigenstate(P("XIY"), P("IZY"))
    for p in (P("XIY"), P("IZY")):
        v = to_dense(p) @ psi.amplitudes
        assert abs(abs(np.vdot(psi.amplitudes, v)) - 1) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ghz_basis(n):
    basis = ghz_basis(n)
    mat = np.array([s.amplitudes for _, s in basis])
    assert np.allclose(mat.conj() @ mat.T, np.eye(2**n))
    assert basis[0][0] == (0,) * n and abs(basis[0][1].overlap(make_ghz(n))) == pytest.approx(1)
    gens = ghz_generators(n)
    for label, state in basis:
        for s, g in zip(label, gens.generators):
            assert np.allclose(to_dense(g) @ state.amplitudes, (-1) ** s * state.amplitudes)
    for e in enumerate_group(gens):
        m = mat.conj() @ to_dense(e) @ mat.T
        assert np.allclose(m, np.diag(np.diag(m)))
    s1 = mat.conj() @ to_dense(gens.generators[0]) @ mat.T
    assert np.allclose(s1, np.kron(np.diag([1, -1]), np.eye(2 ** (n - 1))))


def test_w3_stabilizing_ops():
    w3 = make_w3()
    ops = w3_stabilizing_ops()
    for op in ops:
        assert np.linalg.norm(op.dense @ w3.amplitudes - w3.amplitudes) < 1e-10
        assert np.allclose(op.dense @ op.dense, np.eye(8), atol=1e-10)
    prod = ops[0].dense @ ops[1].dense @ ops[2].dense
    assert np.allclose(prod, -to_dense(P("ZZZ")), atol=1e-12)


def test_w3_preparation_unitary():
    u = w3_preparation_unitary()
    assert np.allclose(u @ u.conj().T, np.eye(8), atol=1e-10)
    zero = np.zeros(8)
    zero[0] = 1
    assert np.allclose(u @ zero, make_w3().amplitudes, atol=1e-10)
    for k, op in enumerate(w3_stabilizing_ops()):
        letters = ["I"] * 3
        letters[k] = "Z"
        z = to_dense(PauliString.from_letters("".join(letters)))
        assert np.allclose(u @ z @ u.conj().T, op.dense, atol=1e-10)


def test_measurement_setting():
    s = MeasurementSetting.parse("X*Z")
    assert s.measures(P("XIZ")) and s.measures(P("IYZ")) and not s.measures(P("YII"))
    assert str(s.extended(P("IYI"))) == "XYZ"


def test_partition_examples():
    parts = partition_into_settings(witnesses.ghz_two_term(4, 3).operator)
    assert sorted(str(s) for s, _ in parts) == ["*ZZ*", "XXXX"]
    three = partition_into_settings(witnesses.ghz_three_term(3, 2).operator)
    assert sorted(str(s) for s, _ in three) == ["XXX", "YYX", "ZZ*"]
    cluster = partition_into_settings(witnesses.cluster_genuine(5).operator)
    assert sorted(str(s) for s, _ in cluster) == ["XZXZX", "ZXZXZ"]
    # every term lands in exactly one setting
    op = witnesses.cluster_genuine(5).operator
    assigned = [t for _, terms in cluster for t in terms]
    assert sorted(assigned) == sorted(op.coefficients)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_max_one_setting_subgroup(n):
    size, subset = max_one_setting_subgroup(ghz_generators(n))
    assert size == 2 ** (n - 1)
    if n >= 3:
        assert 0 not in subset
    csize, _ = max_one_setting_subgroup(cluster_generators(n))
    assert csize == 2 ** ((n + 1) // 2)
    # exhaustive count over all 3^N settings agrees
    if n <= 6:
        assert max_setting_compatible_count(ghz_generators(n)) == size
        assert max_setting_compatible_count(cluster_generators(n)) == csize


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_lemma1_exhaustive(n):
    assert lemma1_violations(n) == []


@pytest.mark.parametrize("n", [3, 4, 5])
def test_setting_count_floor(n):
    # stabilizer sums need at least 2^N / (largest one-setting subgroup) settings
    for gens in (ghz_generators(n), cluster_generators(n)):
        op = HermitianOperator.from_terms(n, [(e, 1.0) for e in enumerate_group(gens)])
        size, _ = max_one_setting_subgroup(gens)
        assert count_settings(op) >= 2**n // size


def test_setting_subgroups_are_locally_commuting():
    for first, second in (ghz_setting_subgroups(4), cluster_setting_subgroups(5)):
        for group in (first, second):
            for a, b in itertools.combinations(group, 2):
                assert str(a) and str(b)
                from stabwit.pauli import commutes_locally

                assert commutes_locally(a, b)


def test_w3_projector_five_directional_settings():
    op = witnesses.w3_projector_witness().operator
    _, residual = local_decomposition(op, w3_projector_settings())
    assert residual < 1e-10
    # no four of them suffice, and Pauli-only grouping needs more
    for drop in range(5):
        settings = [s for i, s in enumerate(w3_projector_settings()) if i != drop]
        assert local_decomposition(op, settings)[1] > 1e-3
    assert count_settings(op) == 7
