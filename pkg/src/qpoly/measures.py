"""Bipartite correlation measures with bound-direction metadata.

Values from the roof search are one-sided: a minimum found by search is an
upper bound on the true minimum, and a maximum found is a lower bound on the
true maximum. Every :class:`CorrelationValue` records which side it sits on
(``bound``) and how it was obtained (``route``). Downstream inequality checks
use this to tell a certified violation from an unconverged search.
"""

from dataclasses import asdict, dataclass

import numpy as np

from .roof import OptimizerConfig, optimize_rank1_measurement, optimize_roof
from .tensor import (as_density, as_labels, mutual_information, partial_trace, purify, rank,
                     spectrum, split_cut, von_neumann_entropy)

KINDS = ("EoF", "EoA", "J_cc", "UE", "Discord", "UD", "Entropy", "MutualInfo")
BOUNDS = ("exact", "lower", "upper")
ROUTES = ("direct", "dual", "pure-shortcut", "closed-form")
# a marginal whose top eigenvalue is within this of 1 is treated as pure
PURE_TOL = 1e-10


@dataclass(frozen=True)
class CorrelationValue:
    kind: str
    value: float
    bound: str
    route: str
    converged: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.bound not in BOUNDS:
            raise ValueError(f"unknown bound {self.bound!r}")
        if self.route not in ROUTES:
            raise ValueError(f"unknown route {self.route!r}")
        # every kind here is nonnegative; clipping keeps a lower bound valid
        object.__setattr__(self, "value", max(0.0, float(self.value)))

    def to_dict(self):
        return asdict(self)


def _is_pure(state):
    return spectrum(state)[0] > 1.0 - PURE_TOL


def _negate_bound(bound):
    return {"exact": "exact", "lower": "upper", "upper": "lower"}[bound]


def entropy(rho, side=None):
    """Entropy of ``rho`` or of its marginal on ``side``."""
    state = rho if side is None else partial_trace(rho, side)
    return CorrelationValue("Entropy", von_neumann_entropy(as_density(state)), "exact", "direct")


def mutual_info(rho, cut):
    return CorrelationValue("MutualInfo", mutual_information(rho, cut), "exact", "direct")


def _roof(kind, sense, rho, cut, cfg):
    rho = as_density(rho)
    a, c = split_cut(rho.layout, cut)
    if rank(rho) == 1:
        return CorrelationValue(kind, von_neumann_entropy(partial_trace(rho, a)), "exact", "pure-shortcut")
    if _is_pure(partial_trace(rho, a)) or _is_pure(partial_trace(rho, c)):
        # a pure marginal forces a product state, so every branch is a product
        return CorrelationValue(kind, 0.0, "exact", "pure-shortcut")
    res = optimize_roof(rho, a, sense, cfg or OptimizerConfig())
    return CorrelationValue(kind, res.value, "upper" if sense == "min" else "lower", "direct", res.converged)


def eof(rho, cut, cfg=None):
    """Entanglement of formation across ``cut`` (minimum average branch entropy)."""
    return _roof("EoF", "min", rho, cut, cfg)


def eoa(rho, cut, cfg=None):
    """Entanglement of assistance across ``cut`` (maximum average branch entropy)."""
    return _roof("EoA", "max", rho, cut, cfg)


def _one_way_setup(rho_ab, measured_side):
    rho = as_density(rho_ab)
    # a list, so a two-label side is not read as a bipartition
    measured, kept = split_cut(rho.layout, list(as_labels(measured_side)))
    return rho, kept, measured


def _complement_state(rho, kept):
    psi = purify(rho)
    ancilla = psi.layout.labels[-1]
    return partial_trace(psi, kept + (ancilla,)), (kept, (ancilla,))


def one_way_classical_correlation(rho_ab, measured_side, cfg=None, route="koashi-winter"):
    """Classical correlation extractable by measuring ``measured_side``.

    ``route="koashi-winter"`` evaluates ``S(rho_A) - E_f(rho_AC)`` on a
    purification; ``route="direct"`` searches rank-1 measurements. Either
    way the result is a lower bound.
    """
    rho, kept, measured = _one_way_setup(rho_ab, measured_side)
    s_a = von_neumann_entropy(partial_trace(rho, kept))
    if rank(rho) == 1:
        return CorrelationValue("J_cc", s_a, "exact", "pure-shortcut")
    if route == "koashi-winter":
        rho_ac, cut = _complement_state(rho, kept)
        e = eof(rho_ac, cut, cfg)
        return CorrelationValue("J_cc", s_a - e.value, _negate_bound(e.bound), "dual", e.converged)
    if route == "direct":
        res = optimize_rank1_measurement(rho, measured, "max", cfg, mode="direct")
        return CorrelationValue("J_cc", res.value, "lower", "direct", res.converged)
    raise ValueError(f"route must be 'koashi-winter' or 'direct', got {route!r}")


def unlocalizable_entanglement(rho_ab, measured_side, cfg=None, route="dual"):
    """One-way unlocalizable entanglement: the minimum of the same functional.

    ``route="dual"`` evaluates ``S(rho_A) - E_a(rho_AC)`` on a purification;
    ``route="direct"`` searches rank-1 measurements. Either way the result is
    an upper bound.
    """
    rho, kept, measured = _one_way_setup(rho_ab, measured_side)
    s_a = von_neumann_entropy(partial_trace(rho, kept))
    if rank(rho) == 1:
        return CorrelationValue("UE", s_a, "exact", "pure-shortcut")
    if route == "dual":
        rho_ac, cut = _complement_state(rho, kept)
        e = eoa(rho_ac, cut, cfg)
        return CorrelationValue("UE", s_a - e.value, _negate_bound(e.bound), "dual", e.converged)
    if route == "direct":
        res = optimize_rank1_measurement(rho, measured, "min", cfg, mode="direct")
        return CorrelationValue("UE", res.value, "upper", "direct", res.converged)
    raise ValueError(f"route must be 'dual' or 'direct', got {route!r}")


def quantum_discord(rho_ab, measured_side, cfg=None, route="koashi-winter"):
    """Mutual information minus one-way classical correlation (an upper bound)."""
    rho, kept, measured = _one_way_setup(rho_ab, measured_side)
    j = one_way_classical_correlation(rho, measured, cfg, route)
    info = mutual_information(rho, (kept, measured))
    return CorrelationValue("Discord", info - j.value, _negate_bound(j.bound), j.route, j.converged)


def unlocalizable_discord(rho_ab, measured_side, cfg=None, route="dual"):
    """Mutual information minus unlocalizable entanglement (a lower bound)."""
    rho, kept, measured = _one_way_setup(rho_ab, measured_side)
    ue = unlocalizable_entanglement(rho, measured, cfg, route)
    info = mutual_information(rho, (kept, measured))
    return CorrelationValue("UD", info - ue.value, _negate_bound(ue.bound), ue.route, ue.converged)


_SIGMA_YY = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])


def concurrence(rho):
    """Two-qubit concurrence from the spin-flipped spectrum."""
    rho = as_density(rho)
    if rho.layout.dims != (2, 2):
        raise ValueError(f"concurrence needs dims (2, 2), got {rho.layout.dims}")
    m = rho.matrix
    flipped = _SIGMA_YY @ m.conj() @ _SIGMA_YY
    w, v = np.linalg.eigh(m)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    lam = np.sqrt(np.clip(np.linalg.eigvalsh(root @ flipped @ root), 0.0, None))[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def binary_entropy(x):
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))


def wootters_eof_two_qubit(rho):
    """Closed-form two-qubit entanglement of formation."""
    c = concurrence(rho)
    return CorrelationValue("EoF", binary_entropy((1 + np.sqrt(max(0.0, 1 - c * c))) / 2),
                            "exact", "closed-form")
