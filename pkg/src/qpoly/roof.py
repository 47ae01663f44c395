"""Multi-restart search over pure-state decompositions and rank-1 measurements.

A decomposition with ``N`` branches of a rank-``r`` state is fixed by an
``N x r`` isometry acting on the spectral decomposition. The search mixes rows
of the current decomposition with two-row Givens rotations (see
:mod:`qpoly.kernels`), starting from the spectral decomposition on restart 0
and from Haar-random isometries on the other restarts.

Restart ``k`` draws its randomness from ``numpy.random.Generator(Philox([seed,
k]))``, so a run with more restarts reruns the first ones unchanged, and a
larger step budget only extends each trajectory.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .ensembles import Isometry, Rank1Measurement
from .tensor import (as_density, as_labels, partial_trace, permute, purify, spectral_data,
                     von_neumann_entropy)

SENSES = ("min", "max")


@dataclass(frozen=True)
class OptimizerConfig:
    """Search budget.

    ``max_evals_per_restart`` counts one-dimensional line searches (one per
    Givens coordinate visited). ``branch_count`` overrides the default
    ``N = r**2`` branches for a rank-``r`` state.
    """

    restarts: int = 8
    max_evals_per_restart: int = 20000
    tol: float = 1e-6
    branch_count: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_evals_per_restart < 1:
            raise ValueError("restarts and max_evals_per_restart must be positive")
        if not 0 < self.tol < 1e-2:
            raise ValueError("tol must lie in (0, 1e-2)")
        if self.branch_count is not None and self.branch_count < 1:
            raise ValueError("branch_count must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def escalated(self, factor=4):
        return replace(self, restarts=self.restarts * factor,
                       max_evals_per_restart=self.max_evals_per_restart * factor)

    def to_dict(self):
        return {"restarts": self.restarts, "max_evals_per_restart": self.max_evals_per_restart,
                "tol": self.tol, "branch_count": self.branch_count, "seed": self.seed}


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    value: float
    best_isometry: Isometry
    evals_used: int
    converged: bool
    sense: str


def restart_rng(seed, restart):
    return np.random.Generator(np.random.Philox([int(seed), int(restart)]))


def haar_unitary(n, rng):
    """Haar-distributed ``n x n`` unitary (QR of a complex Ginibre matrix)."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def unitary_from_params(params, n):
    """Map ``n**2`` real parameters onto U(n).

    The first ``n`` entries are diagonal phases. The remaining ``n(n-1)`` come
    in ``(theta, phi)`` pairs, one per ``i < j`` in row-major order, each
    giving the rotation ``[[cos, -e^{-i phi} sin], [e^{i phi} sin, cos]]`` on
    rows ``i, j``. The product runs in that order, and every unitary is
    reached. Zero parameters give the identity.
    """
    params = np.asarray(params, dtype=float).reshape(-1)
    if params.size != n * n:
        raise ValueError(f"need {n * n} parameters for U({n}), got {params.size}")
    u = np.diag(np.exp(1j * params[:n]))
    k = n
    for i in range(n):
        for j in range(i + 1, n):
            theta, phi = params[k], params[k + 1]
            k += 2
            c, s = np.cos(theta), np.sin(theta)
            g = np.eye(n, dtype=complex)
            g[i, i] = c
            g[j, j] = c
            g[i, j] = -np.exp(-1j * phi) * s
            g[j, i] = np.exp(1j * phi) * s
            u = u @ g
    return u


def _sense_sign(sense):
    if sense not in SENSES:
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    return 1.0 if sense == "min" else -1.0


def _run_restarts(initial_stack, width, sense, cfg, n_rows):
    """Search from ``cfg.restarts`` starting points and keep the best.

    ``initial_stack(v)`` builds the row stack for an ``n_rows x width``
    isometry ``v``. Ties go to the lowest restart index.
    """
    sign = _sense_sign(sense)
    best = None
    used = 0
    for k in range(cfg.restarts):
        if k == 0:
            v = np.eye(n_rows, width, dtype=complex)
        else:
            v = haar_unitary(n_rows, restart_rng(cfg.seed, k))[:, :width]
        v = np.ascontiguousarray(v)
        stack = np.ascontiguousarray(initial_stack(v))
        value, steps, converged = kernels.coordinate_search(stack, v, sign, cfg.max_evals_per_restart, cfg.tol)
        used += steps
        if best is None or sign * value < sign * best[0]:
            best = (value, v, converged)
    value, v, converged = best
    return OptimizationResult(value=float(value), best_isometry=Isometry(_reorthonormalize(v)),
                              evals_used=used, converged=converged, sense=sense)


def _reorthonormalize(v):
    # rotations accumulate rounding; polar projection restores V^H V = I
    u, _, wh = np.linalg.svd(v, full_matrices=False)
    return u @ wh


def optimize_roof(rho, side, sense, cfg=None):
    """Extremise the average entanglement entropy over decompositions of ``rho``.

    Parameters
    ----------
    rho : DensityOperator or StateVector
    side : label or labels
        Subsystems whose branch entropies are averaged; the rest of ``rho``
        forms the other side.
    sense : {"min", "max"}
        ``"min"`` gives an upper bound on the entanglement of formation,
        ``"max"`` a lower bound on the entanglement of assistance.
    cfg : OptimizerConfig, optional

    Returns
    -------
    OptimizationResult
        ``best_isometry`` reproduces the best decomposition through
        :func:`qpoly.ensembles.hjw_ensemble`.
    """
    cfg = cfg or OptimizerConfig()
    _sense_sign(sense)
    rho = as_density(rho)
    layout = rho.layout
    side = layout.ordered(as_labels(side))
    rest = layout.complement(side)
    if not side or not rest:
        raise ValueError(f"side {side} must be a nonempty proper subset of {layout.labels}")
    values, vectors = spectral_data(rho)
    r = len(values)
    if r == 1:
        return OptimizationResult(value=von_neumann_entropy(partial_trace(rho, side)),
                                  best_isometry=Isometry(np.eye(1)), evals_used=0,
                                  converged=True, sense=sense)
    n_rows = cfg.branch_count or r * r
    if n_rows < r:
        raise ValueError(f"branch_count {n_rows} is below rank {r}")
    da, dc = layout.dim_of(side), layout.dim_of(rest)
    scaled = np.sqrt(values)[:, None] * permute_columns(vectors, layout, side + rest).T

    def initial_stack(v):
        return (v @ scaled).reshape(n_rows, da, dc)

    return _run_restarts(initial_stack, r, sense, cfg, n_rows)


def optimize_rank1_measurement(rho_ab, measured, sense, cfg=None, mode="duality"):
    """Extremise ``S(rho_A) - sum_x p_x S(rho_A^x)`` over rank-1 measurements on ``measured``.

    ``mode="duality"`` purifies ``rho_ab`` with an ancilla ``C*`` and searches
    decompositions of ``rho_AC*`` instead: maximising the functional is
    minimising the average branch entropy there, and vice versa. The returned
    isometry is then the decomposition isometry. ``mode="direct"`` searches
    measurements directly; the isometry ``V`` gives outcome vectors
    ``conj(V[x])`` (see :meth:`Rank1Measurement.from_isometry`).
    """
    cfg = cfg or OptimizerConfig()
    _sense_sign(sense)
    rho = as_density(rho_ab)
    layout = rho.layout
    measured = layout.ordered(as_labels(measured))
    kept = layout.complement(measured)
    if not measured or not kept:
        raise ValueError("need a nonempty measured side and a nonempty remainder")
    s_a = von_neumann_entropy(partial_trace(rho, kept))
    if mode == "duality":
        psi = purify(rho)
        ancilla = psi.layout.labels[-1]
        rho_ac = partial_trace(psi, kept + (ancilla,))
        roof = optimize_roof(rho_ac, kept, "min" if sense == "max" else "max", cfg)
        return OptimizationResult(value=s_a - roof.value, best_isometry=roof.best_isometry,
                                  evals_used=roof.evals_used, converged=roof.converged, sense=sense)
    if mode != "direct":
        raise ValueError(f"mode must be 'duality' or 'direct', got {mode!r}")
    values, vectors = spectral_data(rho)
    r = len(values)
    da, db = layout.dim_of(kept), layout.dim_of(measured)
    n_rows = cfg.branch_count or db * db
    if n_rows < db:
        raise ValueError(f"branch_count {n_rows} is below the measured dimension {db}")
    cols = permute_columns(vectors, layout, kept + measured).reshape(da, db, r)
    # per basis vector k of the measured side: (1 x <k|) sqrt(lambda_j) e_j
    basis_ops = np.ascontiguousarray((cols * np.sqrt(values)).transpose(1, 0, 2))

    def initial_stack(v):
        return np.tensordot(v, basis_ops, axes=1)

    # the kernel works on sum_x p_x S(rho_A^x); maximising the functional minimises that sum
    inner = _run_restarts(initial_stack, db, "min" if sense == "max" else "max", cfg, n_rows)
    return OptimizationResult(value=s_a - inner.value, best_isometry=inner.best_isometry,
                              evals_used=inner.evals_used, converged=inner.converged, sense=sense)


def permute_columns(vectors, layout, order):
    """Reorder the tensor factors of each column vector to follow ``order``."""
    dims = layout.dims
    perm = [layout.index(label) for label in order]
    n = vectors.shape[1]
    t = vectors.reshape(dims + (n,)).transpose(perm + [len(dims)])
    return t.reshape(-1, n)


def measurement_of(result):
    """Rank-1 measurement encoded by a ``mode="direct"`` result."""
    return Rank1Measurement.from_isometry(result.best_isometry)
