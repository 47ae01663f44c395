"""Pure-state decompositions, rank-1 measurements and the map between them."""

from dataclasses import dataclass

import numpy as np

from .tensor import (DensityOperator, StateVector, as_density, as_labels, partial_trace, permute,
                     spectral_data, split_cut, von_neumann_entropy)

PROB_TOL = 1e-9
RECONSTRUCTION_TOL = 1e-8
COMPLETENESS_TOL = 1e-8
# branches or outcomes with probability below this are carried but ignored
NEGLIGIBLE = 1e-12


def _placeholder(layout):
    amps = np.zeros(layout.total_dim, dtype=complex)
    amps[0] = 1.0
    return StateVector(layout, amps)


@dataclass(frozen=True, eq=False)
class Isometry:
    """``N x r`` complex matrix with orthonormal columns."""

    matrix: np.ndarray

    def __post_init__(self):
        v = np.array(self.matrix, dtype=complex)
        if v.ndim != 2:
            raise ValueError("isometry must be a matrix")
        if v.shape[0] < v.shape[1]:
            raise ValueError(f"isometry needs rows >= cols, got {v.shape}")
        err = np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1])))
        if err > RECONSTRUCTION_TOL:
            raise ValueError(f"columns are not orthonormal (deviation {err:.3g})")
        v.setflags(write=False)
        object.__setattr__(self, "matrix", v)

    @property
    def rows(self):
        return self.matrix.shape[0]

    @property
    def cols(self):
        return self.matrix.shape[1]


@dataclass(frozen=True, eq=False)
class PureEnsemble:
    """Probabilities and pure branches whose mixture is ``target``."""

    target: DensityOperator
    branches: tuple

    def __post_init__(self):
        branches = tuple((float(p), phi) for p, phi in self.branches)
        object.__setattr__(self, "branches", branches)
        if not branches:
            raise ValueError("an ensemble needs at least one branch")
        probs = np.array([p for p, _ in branches])
        if np.any(probs < 0):
            raise ValueError("negative branch probability")
        if abs(probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"branch probabilities sum to {probs.sum()!r}")
        for _, phi in branches:
            if phi.layout != self.target.layout:
                raise ValueError("branch layout differs from the target layout")
        err = np.max(np.abs(self.mixture() - self.target.matrix))
        if err > RECONSTRUCTION_TOL:
            raise ValueError(f"branches do not reconstruct the target (deviation {err:.3g})")

    def mixture(self):
        out = np.zeros_like(self.target.matrix)
        for p, phi in self.branches:
            out = out + p * np.outer(phi.amplitudes, phi.amplitudes.conj())
        return out

    @property
    def probabilities(self):
        return np.array([p for p, _ in self.branches])

    def __len__(self):
        return len(self.branches)


@dataclass(frozen=True, eq=False)
class Rank1Measurement:
    """Measurement with elements ``|m_x><m_x|``; rows of ``outcome_vectors`` are the ``m_x``."""

    outcome_vectors: np.ndarray

    def __post_init__(self):
        m = np.array(self.outcome_vectors, dtype=complex)
        if m.ndim != 2:
            raise ValueError("outcome vectors must form a matrix (outcomes x dim)")
        err = np.max(np.abs(m.T @ m.conj() - np.eye(m.shape[1])))
        if err > COMPLETENESS_TOL:
            raise ValueError(f"measurement is not complete (deviation {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "outcome_vectors", m)

    @classmethod
    def from_isometry(cls, v):
        """Outcome ``x`` is the conjugate of row ``x`` of an ``N x d`` isometry."""
        v = v.matrix if isinstance(v, Isometry) else np.asarray(v)
        return cls(np.conj(v))

    @classmethod
    def from_basis(cls, unitary):
        """Projective measurement onto the columns of ``unitary``."""
        return cls(np.asarray(unitary, dtype=complex).T)

    @classmethod
    def computational(cls, dim):
        return cls(np.eye(dim))

    @property
    def dim(self):
        return self.outcome_vectors.shape[1]

    def __len__(self):
        return self.outcome_vectors.shape[0]


@dataclass(frozen=True, eq=False)
class MeasurementOutcomeSet:
    """Outcome probabilities with the conditional states of the unmeasured side."""

    outcomes: tuple

    def __post_init__(self):
        outcomes = tuple((float(p), rho) for p, rho in self.outcomes)
        object.__setattr__(self, "outcomes", outcomes)
        total = sum(p for p, _ in outcomes)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"outcome probabilities sum to {total!r}")

    @property
    def probabilities(self):
        return np.array([p for p, _ in self.outcomes])

    def average_entropy(self):
        return sum(p * von_neumann_entropy(rho) for p, rho in self.outcomes if p > NEGLIGIBLE)


def hjw_ensemble(rho, v):
    """Decomposition ``sqrt(p_i)|phi_i> = sum_j V_ij sqrt(lambda_j)|e_j>``.

    ``v`` must have as many columns as ``rho`` has nonzero eigenvalues. Rows of
    ``v`` that give a zero vector become branches with ``p = 0``.
    """
    rho = as_density(rho)
    v = v if isinstance(v, Isometry) else Isometry(v)
    values, vectors = spectral_data(rho)
    if v.cols != len(values):
        raise ValueError(f"isometry has {v.cols} columns but rank(rho) = {len(values)}")
    rows = v.matrix @ (np.sqrt(values)[:, None] * vectors.T)
    return _ensemble_from_rows(rho, rows)


def _ensemble_from_rows(rho, rows):
    weights = np.sum(np.abs(rows) ** 2, axis=1)
    weights = weights / weights.sum()
    branches = []
    for w, row in zip(weights, rows):
        if w > NEGLIGIBLE:
            branches.append((w, StateVector.normalized(rho.layout, row)))
        else:
            branches.append((0.0, _placeholder(rho.layout)))
    return PureEnsemble(rho, tuple(branches))


def spectral_ensemble(rho):
    """Eigen-decomposition as an ensemble, one branch per nonzero eigenvalue."""
    values, _ = spectral_data(rho)
    return hjw_ensemble(rho, Isometry(np.eye(len(values))))


def average_branch_entropy(ens, side):
    """sum_i p_i S(tr_rest |phi_i><phi_i|) for the subsystems in ``side``."""
    layout = ens.target.layout
    side = layout.ordered(as_labels(side))
    if not side or len(side) == len(layout.labels):
        raise ValueError(f"side {side} must be a nonempty proper subset of {layout.labels}")
    return float(sum(p * von_neumann_entropy(partial_trace(phi, side))
                     for p, phi in ens.branches if p > NEGLIGIBLE))


def measure_rank1(rho, measured, m):
    """Outcome probabilities and post-measurement states of the unmeasured side."""
    rho = as_density(rho)
    layout = rho.layout
    measured = layout.ordered(as_labels(measured))
    kept = layout.complement(measured)
    if not measured or not kept:
        raise ValueError("need a nonempty measured side and a nonempty remainder")
    if not isinstance(m, Rank1Measurement):
        m = Rank1Measurement(m)
    db = layout.dim_of(measured)
    if m.dim != db:
        raise ValueError(f"measurement acts on dimension {m.dim}, measured side has {db}")
    da = layout.dim_of(kept)
    t = permute(rho, kept + measured).matrix.reshape(da, db, da, db)
    sub = layout.select(kept)
    outcomes = []
    for vec in m.outcome_vectors:
        sigma = np.einsum("abcd,b,d->ac", t, vec.conj(), vec)
        p = float(np.trace(sigma).real)
        if p > NEGLIGIBLE:
            outcomes.append((p, DensityOperator.from_unnormalized(sub, sigma)))
        else:
            outcomes.append((max(p, 0.0), DensityOperator.maximally_mixed(sub)))
    return MeasurementOutcomeSet(tuple(outcomes))


def _bipartite_amplitudes(psi, cut):
    kept, assisting = split_cut(psi.layout, cut)
    dk = psi.layout.dim_of(kept)
    da = psi.layout.dim_of(assisting)
    mat = permute(psi, kept + assisting).amplitudes.reshape(dk, da)
    return kept, assisting, mat


def ensemble_measurement_duality(psi, cut, m):
    """Ensemble of the kept side induced by measuring the assisting side of ``psi``.

    Outcome ``x`` gives the branch ``(1 x <m_x|)|psi>``, normalised, with its
    squared norm as probability.
    """
    if not isinstance(psi, StateVector):
        raise TypeError("ensemble_measurement_duality needs a pure state")
    kept, assisting, mat = _bipartite_amplitudes(psi, cut)
    if not isinstance(m, Rank1Measurement):
        m = Rank1Measurement(m)
    if m.dim != mat.shape[1]:
        raise ValueError(f"measurement acts on dimension {m.dim}, assisting side has {mat.shape[1]}")
    target = partial_trace(psi, kept)
    rows = m.outcome_vectors.conj() @ mat.T
    return _ensemble_from_rows(target, rows)


def _complete_columns(v, total):
    """Append orthonormal columns to ``v`` until it has ``total`` of them."""
    n, r = v.shape
    if total == r:
        return v
    u, _, _ = np.linalg.svd(v, full_matrices=True)
    return np.hstack([v, u[:, r:total]])


def measurement_from_ensemble(psi, cut, ens):
    """Rank-1 measurement on the assisting side that induces ``ens``.

    The converse of :func:`ensemble_measurement_duality`. When the ensemble has
    fewer branches than the assisting dimension, zero-probability outcomes are
    appended so the measurement is complete.
    """
    kept, assisting, mat = _bipartite_amplitudes(psi, cut)
    values, vectors = spectral_data(ens.target)
    da = mat.shape[1]
    schmidt = (mat.T @ vectors.conj()) / np.sqrt(values)
    basis = _complete_columns(schmidt, da)
    rows = np.array([np.sqrt(p) * phi.amplitudes for p, phi in ens.branches])
    v = (rows @ vectors.conj()) / np.sqrt(values)
    n = max(v.shape[0], da)
    if n > v.shape[0]:
        v = np.vstack([v, np.zeros((n - v.shape[0], v.shape[1]))])
    w = _complete_columns(v, da)
    return Rank1Measurement(w.conj() @ basis.T)
