import logging

import pytest

from oracles import FROZEN
from qpoly.polygamy import (FAIL, INCONCLUSIVE, PASS, combine_bounds, enumerate_subsets, identity_suite,
                            strong_polygamy_discord, strong_polygamy_entanglement, verdict)
from qpoly.roof import OptimizerConfig
from qpoly.states import ghz, haar_random_pure, product, random_mixed, w
from qpoly.tensor import partial_trace, von_neumann_entropy


@pytest.mark.parametrize("n", [2, 3, 4])
def test_enumeration_counts_and_closure(n):
    labels = tuple(f"B{i}" for i in range(1, n + 1))
    fam = enumerate_subsets(labels)
    assert len(fam) == 2 ** n - 2
    assert len(set(fam.subsets)) == len(fam)
    for x, c in zip(fam.subsets, fam.complements):
        assert set(x) | set(c) == set(labels) and not set(x) & set(c)
        assert c in fam.subsets
    sizes = [len(x) for x in fam.subsets]
    assert sizes == sorted(sizes)


def test_enumeration_order_and_errors():
    fam = enumerate_subsets(("B1", "B2", "B3"))
    assert fam.subsets[:4] == (("B1",), ("B2",), ("B3",), ("B1", "B2"))
    assert fam.complement_of(("B2",)) == ("B1", "B3")
    with pytest.raises(ValueError):
        enumerate_subsets(("B1",))


def test_verdict_policy():
    assert verdict(-5e-4, 1e-3, "exact", "lower") == PASS
    assert verdict(-2e-3, 1e-3, "exact", "lower") == INCONCLUSIVE
    assert verdict(-2e-3, 1e-3, "exact", "upper") == FAIL
    assert verdict(-2e-3, 1e-3, "lower", "exact") == FAIL
    assert verdict(-2e-3, 1e-3, "upper", "exact") == INCONCLUSIVE
    assert combine_bounds(["exact", "lower"]) == "lower"
    assert combine_bounds(["upper", "lower"]) == "mixed"
    assert combine_bounds(["exact"]) == "exact"


def test_ghz4_entanglement_chain():
    rep = strong_polygamy_entanglement(ghz(4), "A")
    lhs, middle, rhs = FROZEN["ghz4_chain"]
    assert abs(rep.lhs - lhs) <= 2e-3
    assert abs(rep.middle - middle) <= 2e-3
    assert abs(rep.rhs - rhs) <= 2e-3
    assert rep.passed and rep.escalations == 0
    for v in rep.per_subset.values():
        assert abs(v.value - 1.0) <= 1e-4


def test_ghz3_degenerate_chain():
    rep = strong_polygamy_entanglement(ghz(3), "A")
    assert rep.normalization == 1.0
    assert abs(rep.middle - 2) <= 1e-4 and abs(rep.rhs - 2) <= 1e-4
    assert rep.passed


def test_product_chain_is_all_zero():
    rep = strong_polygamy_entanglement(product(4), "A")
    assert rep.lhs == rep.middle == rep.rhs == 0.0
    assert rep.middle_bound == "exact" and rep.passed


def test_w3_chain(fast_cfg):
    rep = strong_polygamy_entanglement(w(3), "A", fast_cfg)
    assert abs(rep.lhs - FROZEN["h_one_third"]) <= 1e-9
    assert rep.middle >= rep.lhs
    for v in rep.per_single.values():
        assert v.value >= FROZEN["w3_eoa_lower_bound"] - 1e-6


def test_report_consistency_and_lhs(fast_cfg):
    psi = haar_random_pure([2, 2, 2], 14)
    rep = strong_polygamy_entanglement(psi, "A", fast_cfg)
    recomputed = rep.normalization * sum(v.value for v in rep.per_subset.values())
    assert abs(recomputed - rep.middle) <= 1e-12
    assert abs(rep.lhs - von_neumann_entropy(partial_trace(psi, "A"))) <= 1e-9
    assert rep.lhs_bound == "exact"
    d = rep.to_dict()
    assert d["per_subset"]["B1"]["kind"] == "EoA"
    assert set(d["verdicts"]) == {"lhs<=middle", "middle<=rhs", "lhs<=rhs"}


def test_monotone_tightening():
    psi = haar_random_pure([2, 2, 2], 15)
    small = OptimizerConfig(restarts=1, max_evals_per_restart=20)
    a = strong_polygamy_entanglement(psi, "A", small, escalate=False)
    b = strong_polygamy_entanglement(psi, "A", small.escalated(4), escalate=False)
    assert b.middle >= a.middle - 1e-12
    assert b.rhs >= a.rhs - 1e-12


def test_ghz4_discord_chain():
    rep = strong_polygamy_discord(ghz(4), "A")
    assert abs(rep.lhs - 1) <= 2e-3 and abs(rep.middle - 2) <= 2e-3
    assert list(rep.verdicts) == ["lhs<=middle"]
    assert rep.per_subset[("B1", "B2")].kind == "UD"


def test_mixed_input_needs_flag(fast_cfg):
    rho = random_mixed([2, 2, 2], 3)
    with pytest.raises(ValueError, match="pure"):
        strong_polygamy_entanglement(rho, "A", fast_cfg)
    with pytest.raises(ValueError):
        strong_polygamy_discord(rho, "A", fast_cfg)
    rep = strong_polygamy_entanglement(rho, "A", fast_cfg, allow_mixed=True)
    assert rep.lhs_bound == "lower"
    assert FAIL not in rep.verdicts.values()


def test_many_parties_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="qpoly.polygamy"):
        rep = strong_polygamy_entanglement(product(6), "A")
    assert "subset optimisations" in caplog.text
    assert rep.passed


def test_identity_suite_names_and_passes(fast_cfg):
    checks = identity_suite(haar_random_pure([2, 2, 2], 16), "A", fast_cfg)
    names = [c.name for c in checks]
    assert "conditional_entropy_sum" in names and "eoa_ud_sum" in names
    assert any(n.startswith("koashi_winter[") for n in names)
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_identity_suite_rejects_mixed():
    with pytest.raises(ValueError):
        identity_suite(random_mixed([2, 2, 2], 1), "A")
