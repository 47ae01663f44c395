"""The frozen reference values reproduce from their oracles."""

import math

import oracles
from oracles import FROZEN


def test_binary_entropy_value():
    assert oracles.h2(1 / 3) == FROZEN["h_one_third"]


def test_classical_marginal_sweep():
    lo, hi = oracles.classical_ghz_marginal_sweep(steps=61)
    assert abs(lo - FROZEN["classical_marginal_min"]) < 1e-12
    assert abs(hi - FROZEN["classical_marginal_max"]) < 1e-12


def test_werner_values():
    c, e = oracles.werner_eof(0.9)
    assert abs(c - FROZEN["werner_0.9_concurrence"]) < 1e-12
    assert abs(e - FROZEN["werner_0.9_eof"]) < 1e-12


def test_w3_projective_bound():
    assert abs(oracles.w3_eoa_projective_lower_bound(steps=61) - FROZEN["w3_eoa_lower_bound"]) < 1e-12


def test_haar_purity_monte_carlo():
    assert abs(oracles.haar_marginal_purity_mean() - FROZEN["haar_2x2_purity"]) < 0.02


def test_ghz4_chain_by_hand():
    # every A+X marginal of GHZ4 is (|0..0><0..0| + |1..1><1..1|)/2, EoA 1
    n = 3
    norm = 1 / (2 ** (n - 1) - 1)
    subsets = 2 ** n - 2
    assert FROZEN["ghz4_subset_sum"] == subsets * 1.0
    assert FROZEN["ghz4_chain"] == (1.0, norm * subsets, float(n))
    assert math.isclose(norm * subsets, 2.0)
