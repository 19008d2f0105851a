import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabwit.pauli import (
    ConsistencyError,
    DimensionError,
    HermitianOperator,
    PauliString,
    SizeError,
    check_size,
    commutes,
    commutes_locally,
    expectation,
    pauli_decompose,
    pauli_mul,
    to_dense,
)
from stabwit.states import make_ghz

P = PauliString.parse
letters = st.integers(1, 4).flatmap(lambda n: st.tuples(st.text("IXYZ", min_size=n, max_size=n), st.text("IXYZ", min_size=n, max_size=n)))


def test_single_qubit_products():
    assert pauli_mul(P("X"), P("Y")) == P("iZ")
    assert pauli_mul(P("Y"), P("X")) == P("-iZ")
    assert pauli_mul(P("Z"), P("X")) == P("iY")


def test_ghz_generator_products():
    assert P("XXX") * P("ZZI") * P("IZZ") == P("-YXY")
    assert P("XXX") * P("ZZI") == P("-YYX")


def test_dense_rendering_of_y_and_ordering():
    y = np.array([[0, -1j], [1j, 0]])
    assert np.allclose(to_dense(P("Y")), y)
    # qubit 1 is the most significant tensor factor
    assert np.allclose(to_dense(P("XI")), np.kron([[0, 1], [1, 0]], np.eye(2)))


@pytest.mark.parametrize("text", ["-YXY", "+iZ", "-iXY", "XXIZ", "I"])
def test_parse_round_trip(text):
    p = P(text)
    assert P(str(p)) == p


@pytest.mark.parametrize("bad", ["", "XQ", "--X", "i"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        P(bad)


@given(letters)
@settings(max_examples=200, deadline=None)
def test_mul_matches_dense(pair):
    a, b = (PauliString.from_letters(s) for s in pair)
    assert np.allclose(to_dense(a * b), to_dense(a) @ to_dense(b))


@given(letters)
@settings(max_examples=200, deadline=None)
def test_commutation_matches_dense(pair):
    a, b = (PauliString.from_letters(s) for s in pair)
    da, db = to_dense(a), to_dense(b)
    assert commutes(a, b) == np.allclose(da @ db, db @ da)
    # local commutation implies global commutation
    if commutes_locally(a, b):
        assert commutes(a, b)


def test_local_vs_global_commutation():
    assert commutes(P("XX"), P("ZZ"))
    assert not commutes_locally(P("XX"), P("ZZ"))
    assert commutes_locally(P("ZZI"), P("IZZ"))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        pauli_mul(P("X"), P("XX"))


def test_size_guard(monkeypatch):
    monkeypatch.setenv("STABWIT_MAX_QUBITS", "4")
    with pytest.raises(SizeError):
        check_size(5)
    check_size(4)


def test_operator_from_terms_rejects_non_hermitian():
    with pytest.raises(ConsistencyError):
        HermitianOperator.from_terms(1, {"iZ": 1.0})


def test_operator_product_cancels_phases():
    x = HermitianOperator.from_pauli("X")
    y = HermitianOperator.from_pauli("Y")
    # (X + Y)^2 = 2: the iZ and -iZ cross terms cancel
    assert ((x + y) * (x + y)).allclose(HermitianOperator.identity(1, 2.0))
    with pytest.raises(ConsistencyError):
        x * y


def test_mermin_spectrum_and_decomposition():
    w = HermitianOperator.from_terms(3, {"III": 2, "XXX": -1, "XYY": 1, "YXY": 1, "YYX": 1})
    vals = np.linalg.eigvalsh(w.dense)
    assert np.allclose(vals, [-2] + [2] * 6 + [6])
    assert pauli_decompose(w.dense).allclose(w)


@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_decompose_round_trip(n, seed):
    r = np.random.default_rng(seed)
    a = r.normal(size=(2**n, 2**n)) + 1j * r.normal(size=(2**n, 2**n))
    h = a + a.conj().T
    assert np.allclose(pauli_decompose(h).dense, h)


def test_expectation_pure_and_mixed_agree():
    ghz = make_ghz(3)
    op = HermitianOperator.from_pauli("XXX") + HermitianOperator.from_pauli("ZZI")
    assert expectation(op, ghz) == pytest.approx(2.0)
    assert expectation(op, ghz.density()) == pytest.approx(2.0)


def test_trace_and_support():
    op = HermitianOperator.from_terms(3, {"III": 1.5, "IZI": 2.0})
    assert op.trace_per_dim == pytest.approx(1.5)
    assert op.support == {1}
