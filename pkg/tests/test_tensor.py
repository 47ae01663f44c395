import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import FROZEN, entropy_bits, partial_trace_loops
from qpoly.states import ghz, haar_random_pure, random_mixed
from qpoly.tensor import (DensityOperator, StateVector, SystemLayout, conditional_entropy, eig_hermitian,
                          mutual_information, partial_trace, permute, purify, rank, tensor_product,
                          von_neumann_entropy)

dims_strategy = st.lists(st.integers(2, 3), min_size=2, max_size=3)


def test_layout_validation():
    with pytest.raises(ValueError):
        SystemLayout((("A", 2), ("A", 2)))
    with pytest.raises(ValueError):
        SystemLayout((("A", 1),))
    with pytest.raises(ValueError):
        SystemLayout.from_dims([4, 4, 4, 4, 2])
    lay = SystemLayout.from_dims([2, 3])
    assert lay.labels == ("A", "B1")
    assert lay.dim_of(("A", "B1")) == 6
    with pytest.raises(ValueError, match="unknown subsystem"):
        lay.index("Z")


def test_state_validation():
    lay = SystemLayout.from_dims([2, 2])
    with pytest.raises(ValueError, match="norm"):
        StateVector(lay, [1, 1, 0, 0])
    with pytest.raises(ValueError, match="amplitudes"):
        StateVector(lay, [1, 0, 0])
    with pytest.raises(ValueError, match="Hermitian"):
        DensityOperator(lay, np.array([[0.5, 1, 0, 0], [0, 0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]))
    with pytest.raises(ValueError, match="trace"):
        DensityOperator(lay, np.eye(4) / 2)
    with pytest.raises(ValueError, match="positive"):
        DensityOperator(lay, np.diag([1.5, -0.5, 0, 0]))


def test_ghz3_partial_trace_matches_loop_oracle():
    psi = ghz(3)
    red = partial_trace(psi, ("A", "B1"))
    expected = np.diag([0.5, 0, 0, 0.5])
    assert np.allclose(red.matrix, expected, atol=1e-12)
    oracle = partial_trace_loops(psi.density().matrix, [2, 2, 2], [0, 1])
    assert np.allclose(red.matrix, oracle, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 10**6), data=st.data())
def test_partial_trace_matches_loop_oracle(dims, seed, data):
    rho = random_mixed(dims, seed)
    keep = data.draw(st.lists(st.sampled_from(range(len(dims))), min_size=1, unique=True))
    labels = [rho.layout.labels[i] for i in keep]
    oracle = partial_trace_loops(rho.matrix, dims, keep)
    assert np.allclose(partial_trace(rho, labels).matrix, oracle, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 10**6))
def test_pure_and_mixed_partial_trace_agree(dims, seed):
    psi = haar_random_pure(dims, seed)
    labels = psi.layout.labels[1:]
    a = partial_trace(psi, labels).matrix
    b = partial_trace(psi.density(), labels).matrix
    assert np.allclose(a, b, atol=1e-12)


def test_partial_trace_keeps_layout_order():
    psi = haar_random_pure([2, 3, 2], 1)
    assert partial_trace(psi, ("B2", "A")).layout.labels == ("A", "B2")


def test_permute_roundtrip():
    psi = haar_random_pure([2, 3, 2], 4)
    back = permute(permute(psi, ("B2", "A", "B1")), ("A", "B1", "B2"))
    assert np.array_equal(back.amplitudes, psi.amplitudes)
    rho = psi.density()
    sw = permute(rho, ("B1", "A", "B2"))
    assert np.allclose(partial_trace(sw, "A").matrix, partial_trace(rho, "A").matrix)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 10**6))
def test_eig_hermitian_reconstructs(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m = z + z.conj().T
    w, v = eig_hermitian(m)
    assert np.all(np.diff(w) <= 1e-12)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, m, atol=1e-8)
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)


def test_eig_hermitian_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_entropy_of_one_third_two_thirds():
    lay = SystemLayout.from_dims([2])
    rho = DensityOperator(lay, np.diag([1 / 3, 2 / 3]))
    assert abs(von_neumann_entropy(rho) - FROZEN["h_one_third"]) <= 1e-6
    assert abs(von_neumann_entropy(rho) - entropy_bits([1 / 3, 2 / 3])) <= 1e-12


@settings(max_examples=25, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 10**6))
def test_entropy_bounds_and_pure_symmetry(dims, seed):
    rho = random_mixed(dims, seed)
    s = von_neumann_entropy(rho)
    assert -1e-12 <= s <= math.log2(rho.layout.total_dim) + 1e-9
    psi = haar_random_pure(dims, seed)
    first = psi.layout.labels[:1]
    rest = psi.layout.labels[1:]
    assert abs(von_neumann_entropy(partial_trace(psi, first)) - von_neumann_entropy(partial_trace(psi, rest))) < 1e-9


def test_conditional_entropy_negative_for_bell():
    bell = ghz(2)
    assert abs(conditional_entropy(bell, "A", "B1") + 1) < 1e-12
    with pytest.raises(ValueError):
        conditional_entropy(bell, "A", "A")


def test_mutual_information():
    bell = ghz(2)
    assert abs(mutual_information(bell, ("A", "B1")) - 2) < 1e-12
    prod = tensor_product(haar_random_pure([2], 1, ["A"]), haar_random_pure([3], 2, ["B1"]))
    assert abs(mutual_information(prod, "A")) < 1e-10


@settings(max_examples=20, deadline=None)
@given(dims=dims_strategy, seed=st.integers(0, 10**6))
def test_purify_recovers_state(dims, seed):
    assume(np.prod(dims) ** 2 <= 256)
    rho = random_mixed(dims, seed)
    psi = purify(rho)
    assert psi.layout.labels[-1] == "C*"
    assert np.allclose(partial_trace(psi, rho.layout.labels).matrix, rho.matrix, atol=1e-10)


def test_purify_label_collision_and_rank():
    lay = SystemLayout((("C*", 2), ("B", 2)))
    rho = DensityOperator(lay, np.diag([0.5, 0.5, 0, 0]))
    psi = purify(rho)
    assert psi.layout.labels[-1] == "C**"
    assert psi.layout.dims[-1] == 2
    assert rank(rho) == 2
