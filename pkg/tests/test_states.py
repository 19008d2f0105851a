import numpy as np
import pytest

from stabwit.pauli import expectation, HermitianOperator
from stabwit.states import (
    DensityMatrix,
    Graph,
    PureState,
    bipartition_state,
    make_c4_prime,
    make_cluster,
    make_ghz,
    make_graph_state,
    make_rho3,
    make_w3,
    mix_with_white_noise,
    random_biseparable_state,
)


def test_ghz_amplitudes():
    amps = make_ghz(3).amplitudes
    assert amps[0] == pytest.approx(2**-0.5) and amps[7] == pytest.approx(2**-0.5)
    assert np.count_nonzero(np.abs(amps) > 1e-12) == 2


def test_w3_amplitudes():
    assert np.allclose(make_w3().amplitudes * np.sqrt(3), [0, 1, 1, 0, 1, 0, 0, 0])


def test_pure_state_rejects_unnormalized():
    with pytest.raises(ValueError):
        PureState(1, np.array([1, 1]))


@pytest.mark.parametrize(
    "matrix",
    [
        np.array([[1, 1], [0, 0]]),  # not Hermitian
        np.eye(2),  # trace 2
        np.diag([1.5, -0.5]),  # negative eigenvalue
    ],
)
def test_density_matrix_validation(matrix):
    with pytest.raises(ValueError):
        DensityMatrix(1, matrix)


def test_white_noise_mixture():
    rho = mix_with_white_noise(make_ghz(2), 1.0)
    assert np.allclose(rho.matrix, np.eye(4) / 4)
    with pytest.raises(ValueError):
        mix_with_white_noise(make_ghz(2), 1.5)


def test_cluster_matches_path_graph_state():
    for n in range(2, 6):
        a, b = make_cluster(n), make_graph_state(Graph.path(n))
        assert abs(a.overlap(b)) == pytest.approx(1.0)


def test_c4_prime_is_normalized_and_local_equivalent_in_entanglement():
    c4p = make_c4_prime()
    c4 = make_cluster(4)
    # same Schmidt spectrum across the middle cut
    s1 = np.linalg.svd(c4p.amplitudes.reshape(4, 4), compute_uv=False)
    s2 = np.linalg.svd(c4.amplitudes.reshape(4, 4), compute_uv=False)
    assert np.allclose(sorted(s1), sorted(s2))


def test_rho3_stabilizing_expectations():
    rho = make_rho3()
    assert expectation(HermitianOperator.from_pauli("ZZI"), rho) == pytest.approx(1)
    assert expectation(HermitianOperator.from_pauli("XXZ"), rho) == pytest.approx(1)


def test_bipartition_state_places_qubits():
    zero, one = np.array([1, 0]), np.array([0, 1])
    psi = bipartition_state(3, [1], one, np.kron(zero, zero))
    assert psi.amplitudes[0b010] == pytest.approx(1)


def test_random_biseparable_is_product_across_some_cut(rng):
    psi = random_biseparable_state(4, rng, part_a=[0, 2])
    t = psi.amplitudes.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    assert np.linalg.matrix_rank(t, tol=1e-10) == 1


def test_graph_load_formats(tmp_path):
    j = tmp_path / "g.json"
    j.write_text('{"n": 3, "edges": [[1, 2], [2, 3]]}')
    e = tmp_path / "g.txt"
    e.write_text("3\n1 2\n2 3  # comment\n")
    a, b = Graph.load(j), Graph.load(e)
    assert a.edges() == b.edges() == [(0, 1), (1, 2)]
    assert Graph.from_edges(3, [(1, 2)]).is_connected() is False


def test_graph_rejects_self_loop():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(1, 1)])


def test_greedy_coloring_is_proper():
    g = Graph.from_edges(7, [(1, 2), (2, 3), (3, 1), (3, 4), (4, 5), (5, 6), (5, 7)])
    c = g.greedy_coloring()
    assert all(c[k] != c[l] for k, l in g.edges())
    assert len(set(c)) == 3
