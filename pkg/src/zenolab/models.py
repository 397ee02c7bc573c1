"""Example systems: Pauli strings, the bit-flip model and seeded random models.

Randomness comes from ``numpy.random.Generator(PCG64(seed))``; draws are
taken in a fixed order so a seed always produces the same instance.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import BadSymbol
from .linalg import _frozen, check_same_dim, expm_hermitian, require_hermitian, require_unitary

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(spec: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis, e.g. ``"XI"`` is sigma_x (x) I."""
    if not spec:
        raise BadSymbol("empty Pauli string")
    try:
        factors = [PAULI[c] for c in spec.upper()]
    except KeyError as exc:
        raise BadSymbol(f"unknown Pauli symbol {exc.args[0]!r} in {spec!r}") from None
    return reduce(np.kron, factors)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    g = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    return 0.5 * (g + g.conj().T)


@dataclass(frozen=True)
class ModelInstance:
    H: np.ndarray
    U1: np.ndarray
    label: str
    seed: int | None = None

    def __post_init__(self):
        h = require_hermitian(self.H, name="H")
        u = require_unitary(self.U1, name="U1")
        check_same_dim(h, u)
        object.__setattr__(self, "H", _frozen(h))
        object.__setattr__(self, "U1", _frozen(u))

    @property
    def dim(self) -> int:
        return self.H.shape[0]


def bitflip_model(bath_dim: int, seed: int) -> ModelInstance:
    """``H = sigma_x (x) B`` with random Hermitian bath operator ``B``; kick ``sigma_z (x) I``."""
    if bath_dim < 1:
        raise ValueError("bath_dim must be >= 1")
    b = random_hermitian(bath_dim, _rng(seed))
    h = np.kron(PAULI["X"], b)
    u1 = np.kron(PAULI["Z"], np.eye(bath_dim))
    return ModelInstance(h, u1, label=f"bitflip(bath_dim={bath_dim})", seed=seed)


def random_model(dim: int, seed: int) -> ModelInstance:
    """Random Hermitian ``H`` and kick ``U1 = exp(-i G)`` with ``G`` random Hermitian."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rng = _rng(seed)
    h = random_hermitian(dim, rng)
    u1 = expm_hermitian(random_hermitian(dim, rng), 1.0)
    return ModelInstance(h, u1, label=f"random(dim={dim})", seed=seed)
