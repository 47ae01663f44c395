"""Strong polygamy chains over subsets of the non-focus parties.

For a state on ``A, B_1, ..., B_n`` the entanglement chain is

    E_a(A|B) <= (1 / (2^(n-1) - 1)) sum_X E_a(rho_AX) <= sum_i E_a(rho_AB_i)

over the nonempty proper subsets ``X`` of ``B``. The discord chain puts the
unlocalizable discord in place of ``E_a`` in the first inequality.

Verdicts follow the bound metadata. A negative slack is reported as ``FAIL``
only when the bound directions certify a violation. When the searched side
may simply be under-optimised the verdict is ``INCONCLUSIVE``.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .measures import eoa, eof, one_way_classical_correlation, unlocalizable_discord, unlocalizable_entanglement
from .roof import OptimizerConfig
from .tensor import (DensityOperator, StateVector, as_density, conditional_entropy, mutual_information,
                     partial_trace, tensor_product, SystemLayout, von_neumann_entropy)
from .ensembles import average_branch_entropy, spectral_ensemble

log = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-3
EXACT_IDENTITY_TOL = 1e-8
SEARCH_IDENTITY_TOL = 5e-4
SUM_IDENTITY_TOL = 3e-3
MAX_PARTIES = 4

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"


@dataclass(frozen=True)
class SubsetFamily:
    """All nonempty proper subsets of ``b_labels``, each with its complement."""

    b_labels: tuple
    subsets: tuple
    complements: tuple

    def __len__(self):
        return len(self.subsets)

    def complement_of(self, subset):
        return self.complements[self.subsets.index(tuple(subset))]


def enumerate_subsets(b_labels):
    """Nonempty proper subsets ordered by size, then lexicographically by position."""
    b_labels = tuple(b_labels)
    n = len(b_labels)
    if n < 2:
        raise ValueError(f"need at least two non-focus parties, got {n}")
    subsets = tuple(c for k in range(1, n) for c in itertools.combinations(b_labels, k))
    complements = tuple(tuple(b for b in b_labels if b not in s) for s in subsets)
    return SubsetFamily(b_labels, subsets, complements)


def combine_bounds(bounds):
    """Bound direction of a sum of terms with the given directions."""
    bounds = set(bounds)
    if bounds <= {"exact"}:
        return "exact"
    if bounds <= {"exact", "lower"}:
        return "lower"
    if bounds <= {"exact", "upper"}:
        return "upper"
    return "mixed"


def verdict(slack, tolerance, small_bound, big_bound):
    """Verdict on ``small <= big`` given ``slack = big - small`` as computed.

    A violation is certified only when the computed ``small`` cannot exceed the
    true one and the computed ``big`` cannot fall below the true one.
    """
    if slack >= -tolerance:
        return PASS
    if small_bound in ("exact", "lower") and big_bound in ("exact", "upper"):
        return FAIL
    return INCONCLUSIVE


@dataclass
class PolygamyReport:
    kind: str
    focus: str
    lhs: float
    middle: float
    rhs: float
    per_subset: dict
    per_single: dict
    normalization: float
    tolerance: float
    lhs_bound: str
    middle_bound: str
    rhs_bound: str
    verdicts: dict = field(default_factory=dict)
    escalations: int = 0
    notes: list = field(default_factory=list)

    @property
    def slack_lhs_middle(self):
        return self.middle - self.lhs

    @property
    def slack_middle_rhs(self):
        return self.rhs - self.middle

    @property
    def passed(self):
        return all(v == PASS for v in self.verdicts.values())

    def to_dict(self):
        return {
            "kind": self.kind,
            "focus": self.focus,
            "lhs": self.lhs,
            "middle": self.middle,
            "rhs": self.rhs,
            "slack_lhs_middle": self.slack_lhs_middle,
            "slack_middle_rhs": self.slack_middle_rhs,
            "normalization": self.normalization,
            "tolerance": self.tolerance,
            "bounds": {"lhs": self.lhs_bound, "middle": self.middle_bound, "rhs": self.rhs_bound},
            "per_subset": {",".join(k): v.to_dict() for k, v in self.per_subset.items()},
            "per_single": {k: v.to_dict() for k, v in self.per_single.items()},
            "verdicts": dict(self.verdicts),
            "escalations": self.escalations,
            "notes": list(self.notes),
        }


def _setup(state, focus, allow_mixed):
    if isinstance(state, DensityOperator) and not allow_mixed:
        raise ValueError("chain verification needs a pure global state (pass allow_mixed=True "
                         "for a best-effort mixed-state run)")
    layout = state.layout
    layout.index(focus)
    b_labels = layout.complement((focus,))
    family = enumerate_subsets(b_labels)
    if len(b_labels) > MAX_PARTIES:
        log.warning("%d non-focus parties means %d subset optimisations per chain",
                    len(b_labels), len(family))
    return family


def _subset_values(state, focus, family, compute, cfg):
    return {x: compute(partial_trace(state, (focus,) + x), x, cfg) for x in family.subsets}


def _merge_lower(old, new):
    # both are lower bounds (or exact); keep the larger per subset
    return {x: new[x] if new[x].value >= old[x].value else old[x] for x in old}


def _assemble(kind, state, focus, family, values, lhs_value, cfg, tolerance, with_rhs):
    norm = 1.0 / (2 ** (len(family.b_labels) - 1) - 1)
    middle = norm * sum(v.value for v in values.values())
    singles = {x[0]: values[x] for x in family.subsets if len(x) == 1}
    rhs = sum(v.value for v in singles.values())
    report = PolygamyReport(
        kind=kind, focus=focus, lhs=lhs_value.value, middle=middle, rhs=rhs,
        per_subset=values, per_single=singles, normalization=norm, tolerance=tolerance,
        lhs_bound=lhs_value.bound,
        middle_bound=combine_bounds(v.bound for v in values.values()),
        rhs_bound=combine_bounds(v.bound for v in singles.values()),
    )
    report.verdicts["lhs<=middle"] = verdict(report.slack_lhs_middle, tolerance,
                                             report.lhs_bound, report.middle_bound)
    if with_rhs:
        report.verdicts["middle<=rhs"] = verdict(report.slack_middle_rhs, tolerance,
                                                 report.middle_bound, report.rhs_bound)
        report.verdicts["lhs<=rhs"] = verdict(report.rhs - report.lhs, tolerance,
                                              report.lhs_bound, report.rhs_bound)
    return report


def _chain(kind, state, focus, cfg, tolerance, escalate, allow_mixed, lhs_fn, compute, with_rhs):
    cfg = cfg or OptimizerConfig()
    family = _setup(state, focus, allow_mixed)
    lhs_value = lhs_fn(state, focus, cfg)
    values = _subset_values(state, focus, family, compute, cfg)
    report = _assemble(kind, state, focus, family, values, lhs_value, cfg, tolerance, with_rhs)
    slacks = [report.slack_lhs_middle] + ([report.slack_middle_rhs] if with_rhs else [])
    if escalate and min(slacks) < 0:
        bigger = cfg.escalated(4)
        values = _merge_lower(values, _subset_values(state, focus, family, compute, bigger))
        if lhs_value.bound != "exact":
            lhs_value = lhs_fn(state, focus, bigger)
        report = _assemble(kind, state, focus, family, values, lhs_value, cfg, tolerance, with_rhs)
        report.escalations = 1
    slacks = [report.slack_lhs_middle] + ([report.slack_middle_rhs] if with_rhs else [])
    if min(slacks) < 0:
        note = f"optimizer-limited: negative slack {min(slacks):.3g} after {report.escalations} escalation(s)"
        report.notes.append(note)
        log.warning("%s chain, focus %s: %s", kind, focus, note)
    return report


def _eoa_lhs(state, focus, cfg):
    rest = state.layout.complement((focus,))
    return eoa(state, ((focus,), rest), cfg)


def _eoa_subset(rho, x, cfg):
    return eoa(rho, (rho.layout.complement(x), x), cfg)


def _ud_lhs(state, focus, cfg):
    rest = state.layout.complement((focus,))
    return unlocalizable_discord(state, rest, cfg)


def _ud_subset(rho, x, cfg):
    return unlocalizable_discord(rho, x, cfg)


def strong_polygamy_entanglement(psi, focus, cfg=None, tolerance=DEFAULT_TOLERANCE, escalate=True,
                                 allow_mixed=False):
    """Evaluate the strong polygamy chain of entanglement of assistance.

    Parameters
    ----------
    psi : StateVector
        Global state. A DensityOperator is accepted only with
        ``allow_mixed=True``. Its left-hand side is then a search lower bound,
        so a negative slack can at most be ``INCONCLUSIVE``.
    focus : str
        Label of the single party ``A``.
    cfg : OptimizerConfig, optional
        Shared by every subset computation.
    tolerance : float
        A slack at or above ``-tolerance`` passes.
    escalate : bool
        On any negative slack, rerun all subsets once with four times the
        restarts and step budget.

    Returns
    -------
    PolygamyReport
    """
    return _chain("entanglement", psi, focus, cfg, tolerance, escalate, allow_mixed,
                  _eoa_lhs, _eoa_subset, with_rhs=True)


def strong_polygamy_discord(psi, focus, cfg=None, tolerance=DEFAULT_TOLERANCE, escalate=True):
    """Evaluate the strong polygamy inequality of unlocalizable discord.

    Only ``lhs <= middle`` is a claim; ``rhs`` (the sum over single parties)
    is reported for reference.
    """
    return _chain("discord", psi, focus, cfg, tolerance, escalate, False,
                  _ud_lhs, _ud_subset, with_rhs=False)


class IdentityCheck(NamedTuple):
    name: str
    lhs: float
    rhs: float
    residual: float
    passed: bool
    tolerance: float

    def to_dict(self):
        return self._asdict()


def _check(name, lhs, rhs, tolerance):
    residual = float(lhs - rhs)
    return IdentityCheck(name, float(lhs), float(rhs), residual, abs(residual) <= tolerance, tolerance)


def identity_suite(psi, focus, cfg=None, chain=None):
    """Evaluate the identities behind the chains on a pure state.

    Each identity has its two sides computed separately. Exact linear-algebra
    identities use tolerance 1e-8; identities mediated by the search use 5e-4,
    or 3e-3 for the subset sum. ``chain`` may carry an entanglement report
    whose per-subset values are reused.
    """
    if not isinstance(psi, StateVector):
        raise ValueError("identity_suite needs a pure state")
    cfg = cfg or OptimizerConfig()
    layout = psi.layout
    family = enumerate_subsets(layout.complement((focus,)))
    a = (focus,)
    s_a = von_neumann_entropy(partial_trace(psi, a))
    checks = []

    marg = {x: von_neumann_entropy(partial_trace(psi, a + x)) for x in family.subsets}
    closed = all(c in family.subsets for c in family.complements)
    checks.append(_check("complement_sum", sum(marg[c] for c in family.complements),
                         sum(marg.values()), EXACT_IDENTITY_TOL))
    checks.append(_check("complement_closure", float(closed), 1.0, 0.0))

    cond = {x: conditional_entropy(psi, a, x) for x in family.subsets}
    pair = max(abs(cond[x] + cond[c]) for x, c in zip(family.subsets, family.complements))
    checks.append(_check("conditional_entropy_pairs", pair, 0.0, EXACT_IDENTITY_TOL))
    checks.append(_check("conditional_entropy_sum", sum(cond.values()), 0.0, EXACT_IDENTITY_TOL))

    # unlocalizable discord of the pure state from its definition: mutual
    # information minus (S(A) - E_a(rho_A x |0><0|)) on a product purification
    rest = layout.complement(a)
    anc = SystemLayout(((layout.fresh_label("C*"), 2),))
    product = tensor_product(psi, StateVector(anc, [1.0, 0.0]))
    rho_ac = partial_trace(product, a + anc.labels)
    ue = s_a - eoa(rho_ac, (a, anc.labels), cfg).value
    checks.append(_check("pure_ud_equals_entropy", mutual_information(psi, (a, rest)) - ue, s_a,
                         EXACT_IDENTITY_TOL))
    checks.append(_check("pure_eoa_equals_entropy",
                         average_branch_entropy(spectral_ensemble(as_density(psi)), a), s_a,
                         EXACT_IDENTITY_TOL))

    if chain is not None and chain.kind == "entanglement":
        ea = dict(chain.per_subset)
    else:
        ea = {x: _eoa_subset(partial_trace(psi, a + x), x, cfg) for x in family.subsets}
    for x, c in zip(family.subsets, family.complements):
        tag = ",".join(x)
        rho_ax = partial_trace(psi, a + x)
        rho_ac = partial_trace(psi, a + c)
        j = one_way_classical_correlation(rho_ax, x, cfg, route="direct")
        ef = eof(rho_ac, (a, c), cfg)
        checks.append(_check(f"koashi_winter[{tag}]", j.value + ef.value, s_a, SEARCH_IDENTITY_TOL))
        eu = unlocalizable_entanglement(rho_ax, x, cfg, route="direct")
        checks.append(_check(f"dual_ue_eoa[{tag}]", eu.value + ea[c].value, s_a, SEARCH_IDENTITY_TOL))
        ud_c = unlocalizable_discord(rho_ac, c, cfg, route="direct")
        checks.append(_check(f"eoa_ud_relation[{tag}]", ea[x].value, ud_c.value + cond[c],
                             SEARCH_IDENTITY_TOL))
    ud = {x: _ud_subset(partial_trace(psi, a + x), x, cfg) for x in family.subsets}
    checks.append(_check("eoa_ud_sum", sum(v.value for v in ea.values()),
                         sum(v.value for v in ud.values()), SUM_IDENTITY_TOL))
    return checks
