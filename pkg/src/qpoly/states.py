"""Named and random test states.

Random states use ``numpy.random.Generator(numpy.random.Philox(seed))``.
A Haar-random pure state on total dimension ``D`` takes ``D`` standard
normals for the real parts, then ``D`` for the imaginary parts, and
normalises. Philox is counter-based, so any implementation of the same
generator reproduces the states. Seed 0 is used by the test fixtures.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .tensor import DensityOperator, StateVector, SystemLayout, default_labels

NAMED = ("ghz", "w", "dicke", "product", "bell")
RANDOM = ("haar", "mixed")


def _qubits(n):
    if n < 2:
        raise ValueError(f"party count must be at least 2, got {n}")
    return SystemLayout.from_dims([2] * n)


def dicke(n, k):
    """Uniform superposition of the n-qubit basis states of Hamming weight ``k``."""
    layout = _qubits(n)
    if not 0 <= k <= n:
        raise ValueError(f"Dicke weight {k} outside [0, {n}]")
    amps = np.zeros(2 ** n, dtype=complex)
    for ones in itertools.combinations(range(n), k):
        amps[sum(1 << (n - 1 - i) for i in ones)] = 1.0
    return StateVector.normalized(layout, amps)


def ghz(n):
    layout = _qubits(n)
    amps = np.zeros(2 ** n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return StateVector(layout, amps)


def w(n):
    return dicke(n, 1)


def product(n):
    return dicke(n, 0)


def bell():
    return ghz(2)


def _haar_amplitudes(d, seed):
    rng = np.random.Generator(np.random.Philox(int(seed)))
    re = rng.standard_normal(d)
    im = rng.standard_normal(d)
    z = re + 1j * im
    return z / np.linalg.norm(z)


def haar_random_pure(dims, seed, labels=None):
    """Haar-random pure state on ``dims`` (see the module docstring for the draw order)."""
    layout = SystemLayout.from_dims(dims, labels)
    return StateVector.normalized(layout, _haar_amplitudes(layout.total_dim, seed))


def random_mixed(dims, seed, labels=None):
    """Marginal of a Haar-random pure state on ``dims`` plus an ancilla of the same total dimension.

    The pure state is drawn as in :func:`haar_random_pure` on dimension
    ``D * D`` (system first), and the ancilla is traced out directly, so the
    ancilla never needs a layout of its own.
    """
    layout = SystemLayout.from_dims(dims, labels)
    d = layout.total_dim
    m = _haar_amplitudes(d * d, seed).reshape(d, d)
    return DensityOperator.from_unnormalized(layout, m @ m.conj().T)


@dataclass(frozen=True)
class StateSpec:
    """A named or random state, written ``kind,args`` on the command line.

    Examples: ``ghz,4``, ``w,3``, ``dicke,4,2``, ``product,3``, ``bell``,
    ``haar,2x2x2``, ``mixed,2x2``. Random kinds take their seed from ``seed``.
    """

    kind: str
    args: tuple = ()
    seed: int = 0

    @classmethod
    def parse(cls, text, seed=0):
        parts = [p.strip() for p in text.strip().lower().split(",") if p.strip()]
        if not parts:
            raise ValueError("empty state spec")
        kind, rest = parts[0], parts[1:]
        if kind not in NAMED + RANDOM:
            raise ValueError(f"unknown state kind {kind!r}; expected one of {NAMED + RANDOM}")
        try:
            if kind in RANDOM:
                if len(rest) != 1:
                    raise ValueError(f"{kind} needs dims like 2x2x2")
                args = tuple(int(d) for d in rest[0].split("x"))
            else:
                args = tuple(int(a) for a in rest)
        except ValueError as exc:
            raise ValueError(f"bad state spec {text!r}: {exc}") from None
        spec = cls(kind, args, int(seed))
        spec.build()  # validate eagerly
        return spec

    def build(self):
        k, a = self.kind, self.args
        arity = {"ghz": 1, "w": 1, "dicke": 2, "product": 1, "bell": 0}
        if k in arity and len(a) != arity[k]:
            raise ValueError(f"{k} takes {arity[k]} integer argument(s), got {len(a)}")
        if k == "ghz":
            return ghz(*a)
        if k == "w":
            return w(*a)
        if k == "dicke":
            return dicke(*a)
        if k == "product":
            return product(*a)
        if k == "bell":
            return bell()
        if len(a) < 2:
            raise ValueError(f"{k} needs at least two subsystems")
        if k == "haar":
            return haar_random_pure(a, self.seed, default_labels(len(a)))
        if k == "mixed":
            return random_mixed(a, self.seed, default_labels(len(a)))
        raise ValueError(f"unknown state kind {k!r}")

    @property
    def is_random(self):
        return self.kind in RANDOM

    def to_dict(self):
        out = {"kind": self.kind, "args": list(self.args)}
        if self.is_random:
            out["seed"] = self.seed
        return out

    def __str__(self):
        if self.kind in RANDOM:
            return f"{self.kind},{'x'.join(map(str, self.args))}"
        return ",".join([self.kind] + [str(a) for a in self.args])


def gen_named_state(spec):
    """Build a named state from a :class:`StateSpec` or a string such as ``"ghz,4"``."""
    if isinstance(spec, str):
        spec = StateSpec.parse(spec)
    if spec.kind not in NAMED:
        raise ValueError(f"{spec.kind!r} is not a named state")
    return spec.build()

