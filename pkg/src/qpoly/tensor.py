"""Dense linear algebra for small composite quantum systems.

States carry a :class:`SystemLayout` naming each tensor factor, so reduced
states are requested by label rather than by axis index. Entropies are in
bits.
"""

from dataclasses import dataclass

import numpy as np

MAX_TOTAL_DIM = 256
HERMITIAN_TOL = 1e-9
TRACE_TOL = 1e-9
PSD_TOL = 1e-9
NORM_TOL = 1e-9
# eigenvalues at or below this count as zero when taking ranks
RANK_TOL = 1e-10
# normalised eigenvalues below this contribute nothing to an entropy
ENTROPY_CLAMP = 1e-12


def as_labels(labels):
    """Normalise a label or an iterable of labels to a tuple of strings."""
    if isinstance(labels, str):
        return (labels,)
    return tuple(labels)


@dataclass(frozen=True)
class SystemLayout:
    """Ordered subsystem labels with their dimensions."""

    parts: tuple

    def __post_init__(self):
        parts = tuple((str(label), int(dim)) for label, dim in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise ValueError("a layout needs at least one subsystem")
        labels = [label for label, _ in parts]
        if any(not label for label in labels):
            raise ValueError("subsystem labels must be nonempty")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels in {labels}")
        for label, dim in parts:
            if dim < 2:
                raise ValueError(f"subsystem {label!r} has dimension {dim}; need at least 2")
        if self.total_dim > MAX_TOTAL_DIM:
            raise ValueError(f"total dimension {self.total_dim} exceeds {MAX_TOTAL_DIM}")

    @classmethod
    def from_dims(cls, dims, labels=None):
        dims = [int(d) for d in dims]
        if labels is None:
            labels = default_labels(len(dims))
        labels = as_labels(labels)
        if len(labels) != len(dims):
            raise ValueError("labels and dims differ in length")
        return cls(tuple(zip(labels, dims)))

    @property
    def labels(self):
        return tuple(label for label, _ in self.parts)

    @property
    def dims(self):
        return tuple(dim for _, dim in self.parts)

    @property
    def total_dim(self):
        return int(np.prod(self.dims))

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValueError(f"unknown subsystem label {label!r}; layout has {self.labels}") from None

    def dim_of(self, labels):
        """Product of the dimensions of ``labels``."""
        return int(np.prod([self.dims[self.index(label)] for label in as_labels(labels)]))

    def select(self, labels):
        """Sub-layout holding ``labels`` in the order given."""
        labels = as_labels(labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"repeated labels in {labels}")
        return SystemLayout(tuple((label, self.dims[self.index(label)]) for label in labels))

    def ordered(self, labels):
        """The labels in ``labels`` sorted into layout order."""
        labels = set(as_labels(labels))
        for label in labels:
            self.index(label)
        return tuple(label for label in self.labels if label in labels)

    def complement(self, labels):
        labels = set(as_labels(labels))
        for label in labels:
            self.index(label)
        return tuple(label for label in self.labels if label not in labels)

    def fresh_label(self, base):
        """``base`` with ``*`` appended until it does not collide."""
        label = base
        while label in self.labels:
            label += "*"
        return label

    def concat(self, other):
        clash = set(self.labels) & set(other.labels)
        if clash:
            raise ValueError(f"label collision between layouts: {sorted(clash)}")
        return SystemLayout(self.parts + other.parts)


def default_labels(n):
    """``A, B1, ..., B{n-1}``: a focus party followed by the rest."""
    return ("A",) + tuple(f"B{i}" for i in range(1, n))


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StateVector:
    layout: SystemLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.layout.total_dim,):
            raise ValueError(f"state has {amps.size} amplitudes, layout needs {self.layout.total_dim}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state vector norm {norm!r} is not 1")

    @classmethod
    def normalized(cls, layout, amplitudes):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalise the zero vector")
        return cls(layout, amps / norm)

    def density(self):
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))

    @property
    def labels(self):
        return self.layout.labels


@dataclass(frozen=True, eq=False)
class DensityOperator:
    layout: SystemLayout
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        n = self.layout.total_dim
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match layout dimension {n}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValueError(f"matrix is not Hermitian (deviation {herm:.3g})")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr!r} is not 1")
        low = np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0]
        if low < -PSD_TOL:
            raise ValueError(f"matrix is not positive semidefinite (eigenvalue {low:.3g})")

    @classmethod
    def from_unnormalized(cls, layout, matrix):
        m = np.asarray(matrix, dtype=complex)
        m = 0.5 * (m + m.conj().T)
        return cls(layout, m / np.trace(m).real)

    @classmethod
    def maximally_mixed(cls, layout):
        return cls(layout, np.eye(layout.total_dim) / layout.total_dim)

    def density(self):
        return self

    @property
    def labels(self):
        return self.layout.labels


def as_density(state):
    """Density operator of a pure or mixed state."""
    return state.density()


def tensor_product(a, b):
    """Kronecker product of two states of the same kind; layouts are concatenated."""
    layout = a.layout.concat(b.layout)
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(layout, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(layout, np.kron(a.matrix, b.matrix))
    raise TypeError("tensor_product needs two StateVectors or two DensityOperators")


def _kept_first(layout, keep):
    keep = layout.ordered(keep)
    rest = layout.complement(keep)
    perm = [layout.index(label) for label in keep + rest]
    return keep, rest, perm


def partial_trace(state, keep):
    """Reduced density operator on the ``keep`` subsystems (in layout order).

    Parameters
    ----------
    state : StateVector or DensityOperator
    keep : str or iterable of str
        Labels to keep; must be nonempty.

    Returns
    -------
    DensityOperator
    """
    keep = as_labels(keep)
    if not keep:
        raise ValueError("partial_trace needs at least one label to keep")
    layout = state.layout
    keep, rest, perm = _kept_first(layout, keep)
    dims = layout.dims
    dk = layout.dim_of(keep)
    dr = layout.dim_of(rest) if rest else 1
    if isinstance(state, StateVector):
        psi = state.amplitudes.reshape(dims).transpose(perm).reshape(dk, dr)
        reduced = psi @ psi.conj().T
    else:
        n = len(dims)
        t = state.matrix.reshape(dims + dims)
        t = t.transpose(perm + [p + n for p in perm]).reshape(dk, dr, dk, dr)
        reduced = np.einsum("ajbj->ab", t)
    reduced = 0.5 * (reduced + reduced.conj().T)
    return DensityOperator(layout.select(keep), reduced)


def permute(state, labels):
    """Reorder the tensor factors of ``state`` to follow ``labels``."""
    labels = as_labels(labels)
    layout = state.layout
    if sorted(labels) != sorted(layout.labels):
        raise ValueError(f"{labels} is not a reordering of {layout.labels}")
    perm = [layout.index(label) for label in labels]
    new = layout.select(labels)
    dims = layout.dims
    if isinstance(state, StateVector):
        return StateVector(new, state.amplitudes.reshape(dims).transpose(perm).reshape(-1))
    n = len(dims)
    t = state.matrix.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    return DensityOperator(new, t.reshape(new.total_dim, new.total_dim))


def eig_hermitian(m):
    """Eigenvalues in descending order with orthonormal eigenvector columns.

    Raises ``ValueError`` when ``m`` deviates from Hermitian by more than
    ``HERMITIAN_TOL``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"need a square matrix, got shape {m.shape}")
    if m.size and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian")
    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    return values[::-1].copy(), vectors[:, ::-1].copy()


def spectrum(state):
    if isinstance(state, StateVector):
        return np.array([1.0])
    return np.linalg.eigvalsh(state.matrix)[::-1]


def rank(state, tol=RANK_TOL):
    return int(np.sum(spectrum(state) > tol))


def entropy_of_spectrum(values):
    values = np.asarray(values, dtype=float)
    values = values[values >= ENTROPY_CLAMP]
    return float(max(0.0, -np.sum(values * np.log2(values))))


def von_neumann_entropy(rho):
    """S(rho) = -sum lambda log2 lambda, in bits."""
    return entropy_of_spectrum(spectrum(rho))


def _subsystem_entropy(state, labels):
    labels = as_labels(labels)
    if not labels:
        return 0.0
    return von_neumann_entropy(partial_trace(state, labels))


def conditional_entropy(rho, target, condition):
    """S(target | condition) = S(target, condition) - S(condition); can be negative."""
    target, condition = as_labels(target), as_labels(condition)
    if not target or not condition:
        raise ValueError("target and condition must be nonempty")
    if set(target) & set(condition):
        raise ValueError(f"target {target} and condition {condition} overlap")
    joint = tuple(target) + tuple(condition)
    return _subsystem_entropy(rho, joint) - _subsystem_entropy(rho, condition)


def split_cut(layout, cut):
    """Resolve ``cut`` into two disjoint, covering label tuples in layout order.

    A 2-tuple is an explicit bipartition ``(first, second)``, each side a label
    or a collection of labels. Anything else (a label, a list, a set) names the
    first side and the second side is everything else.
    """
    if isinstance(cut, tuple) and len(cut) == 2:
        first = layout.ordered(as_labels(cut[0]))
        second = layout.ordered(as_labels(cut[1]))
    else:
        first = layout.ordered(as_labels(cut))
        second = layout.complement(first)
    if not first or not second:
        raise ValueError("both sides of a cut must be nonempty")
    if set(first) & set(second):
        raise ValueError(f"cut sides {first} and {second} overlap")
    if set(first) | set(second) != set(layout.labels):
        raise ValueError(f"cut {first}|{second} does not cover {layout.labels}")
    return first, second


def mutual_information(rho, cut):
    """I(A:B) = S(A) + S(B) - S(AB) for a bipartition of the state's labels."""
    a, b = split_cut(rho.layout, cut)
    value = _subsystem_entropy(rho, a) + _subsystem_entropy(rho, b) - von_neumann_entropy(as_density(rho))
    return value


def purify(rho, label="C*"):
    """Purification on the layout extended by one ancilla of dimension max(rank, 2).

    The ancilla label is ``label`` with ``*`` appended as needed to avoid a
    collision.
    """
    rho = as_density(rho)
    values, vectors = eig_hermitian(rho.matrix)
    keep = values > RANK_TOL
    values, vectors = values[keep], vectors[:, keep]
    r = len(values)
    anc = max(r, 2)
    amps = np.zeros((rho.layout.total_dim, anc), dtype=complex)
    amps[:, :r] = vectors * np.sqrt(values)
    ancilla = SystemLayout(((rho.layout.fresh_label(label), anc),))
    return StateVector.normalized(rho.layout.concat(ancilla), amps.reshape(-1))


def spectral_data(rho, tol=RANK_TOL):
    """Nonzero eigenvalues (descending) and their eigenvectors as columns."""
    values, vectors = eig_hermitian(as_density(rho).matrix)
    keep = values > tol
    return values[keep], vectors[:, keep]
