r"""Zeno subspaces of bang-bang kick sequences.

A kick ``U1`` with spectral decomposition ``sum_mu exp(-i lam_mu) P_mu``
projects a Hamiltonian onto its centralizer,

.. math:: H_Z = \sum_\mu P_\mu H P_\mu ,

and ``N`` kicks interleaved with free evolution over a total time ``t``
approach ``U1^N exp(-i H_Z t)``. For a cycle of ``g`` kicks the product
``U_g ... U_1`` plays the role of ``U1`` and the cycle-averaged
Hamiltonian ``H_bar`` that of ``H``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, FirstElementNotIdentity
from .linalg import (
    DEFAULT_CLUSTER_TOL,
    SpectralDecomposition,
    _frozen,
    check_same_dim,
    dagger,
    default_tol,
    expm_hermitian,
    require_hermitian,
    require_unitary,
    spectral_decompose,
    unitarity_error,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ZenoStructure:
    decomposition: SpectralDecomposition
    HZ: np.ndarray
    source_H: np.ndarray

    @property
    def dim(self) -> int:
        return self.HZ.shape[0]

    @property
    def kick(self) -> np.ndarray:
        return self.decomposition.reconstruct()

    def intertwining_error(self) -> float:
        worst = 0.0
        for p in self.decomposition.projectors:
            php = p @ self.source_H @ p
            worst = max(worst, np.linalg.norm(self.HZ @ p - php), np.linalg.norm(p @ self.HZ - php))
        return float(worst)

    def centralizer_error(self) -> float:
        u = self.kick
        return float(np.linalg.norm(self.HZ @ u - u @ self.HZ))


@dataclass(frozen=True, init=False)
class KickCycle:
    """Ordered kicks ``U_1, ..., U_g`` applied within one cycle."""

    kicks: tuple[np.ndarray, ...]
    product: np.ndarray

    def __init__(self, kicks: Sequence[np.ndarray], tol: float | None = None):
        if len(kicks) == 0:
            raise ValueError("a kick cycle needs at least one kick")
        ks = [require_unitary(k, tol, name=f"U_{i + 1}") for i, k in enumerate(kicks)]
        check_same_dim(*ks)
        prod = np.eye(ks[0].shape[0], dtype=complex)
        for k in ks:
            prod = k @ prod
        object.__setattr__(self, "kicks", tuple(_frozen(k) for k in ks))
        object.__setattr__(self, "product", _frozen(prod))

    @property
    def g(self) -> int:
        return len(self.kicks)

    @property
    def dim(self) -> int:
        return self.product.shape[0]


def _as_cycle(cycle) -> KickCycle:
    if isinstance(cycle, KickCycle):
        return cycle
    if isinstance(cycle, np.ndarray) and cycle.ndim == 2:
        return KickCycle([cycle])
    return KickCycle(list(cycle))


def _structure(decomp: SpectralDecomposition, source: np.ndarray) -> ZenoStructure:
    hz = decomp.project(source)
    hz = 0.5 * (hz + dagger(hz))
    return ZenoStructure(decomp, _frozen(hz), _frozen(source))


def zeno_structure(H, U1, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> ZenoStructure:
    h = require_hermitian(H)
    u = require_unitary(U1, name="U1")
    check_same_dim(h, u)
    return _structure(spectral_decompose(u, cluster_tol), h)


def ergodic_average(H, U1, N: int) -> np.ndarray:
    """``(1/N) sum_{k<N} U1^{+k} H U1^k`` by direct summation."""
    if N < 1:
        raise ValueError("N must be >= 1")
    h = np.asarray(H, dtype=complex)
    u = np.asarray(U1, dtype=complex)
    if h.shape != u.shape:
        raise DimensionMismatch(f"H has shape {h.shape}, U1 has shape {u.shape}")
    acc = np.zeros_like(h)
    term = h.copy()
    for _ in range(N):
        acc += term
        term = dagger(u) @ term @ u
    acc /= N
    return 0.5 * (acc + dagger(acc))


def bb_evolve(H, cycle, t: float, N: int) -> np.ndarray:
    """``[U_g U(t/gN) ... U_1 U(t/gN)]^N`` with ``U(s) = exp(-i H s)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    cyc = _as_cycle(cycle)
    h = require_hermitian(H)
    if h.shape != cyc.product.shape:
        raise DimensionMismatch(f"H has shape {h.shape}, kicks have shape {cyc.product.shape}")
    free = expm_hermitian(h, t / (cyc.g * N))
    one = np.eye(h.shape[0], dtype=complex)
    for k in cyc.kicks:
        one = k @ free @ one
    out = np.linalg.matrix_power(one, N)
    drift = unitarity_error(out)
    if drift > 10 * default_tol(h.shape[0]):
        log.warning("bb_evolve: unitarity drift %.3e after %d cycles", drift, N)
    return out


def zeno_limit_evolution(zs: ZenoStructure, t: float, N: int) -> np.ndarray:
    """``exp(-i sum_mu (N lam_mu P_mu + P_mu H P_mu t))`` assembled block by block."""
    if N < 0:
        raise ValueError("N must be >= 0")
    out = np.zeros((zs.dim, zs.dim), dtype=complex)
    for lam, v in zip(zs.decomposition.phases, zs.decomposition.bases):
        block = dagger(v) @ zs.source_H @ v
        energies, w = np.linalg.eigh(0.5 * (block + dagger(block)))
        vw = v @ w
        phase = np.exp(-1j * N * lam)
        out += (vw * (phase * np.exp(-1j * energies * t))) @ dagger(vw)
    return out


def cycle_average_hamiltonian(H, cycle) -> np.ndarray:
    """``H_bar = (1/g) sum_{k<g} W_k^+ H W_k`` with ``W_0 = I``, ``W_k = U_k ... U_1``."""
    cyc = _as_cycle(cycle)
    h = np.asarray(H, dtype=complex)
    if h.shape != cyc.product.shape:
        raise DimensionMismatch(f"H has shape {h.shape}, kicks have shape {cyc.product.shape}")
    w = np.eye(h.shape[0], dtype=complex)
    acc = np.zeros_like(h)
    for k in range(cyc.g):
        acc += dagger(w) @ h @ w
        w = cyc.kicks[k] @ w
    acc /= cyc.g
    return 0.5 * (acc + dagger(acc))


def cycle_zeno(H, cycle, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> ZenoStructure:
    cyc = _as_cycle(cycle)
    hbar = cycle_average_hamiltonian(require_hermitian(H), cyc)
    return _structure(spectral_decompose(cyc.product, cluster_tol), hbar)


def symmetrization_cycle(group: Sequence[np.ndarray], tol: float | None = None) -> KickCycle:
    """Kicks ``U_r = V_{r+1} V_r^+`` (r < g) and ``U_g = V_g^+`` for a list with ``V_1 = I``."""
    vs = [require_unitary(v, tol, name=f"V_{i + 1}") for i, v in enumerate(group)]
    if not vs:
        raise ValueError("empty group")
    dim = check_same_dim(*vs)
    tol = default_tol(dim) if tol is None else tol
    if np.linalg.norm(vs[0] - np.eye(dim)) > tol:
        raise FirstElementNotIdentity("the first group element must be the identity")
    kicks = [vs[r + 1] @ dagger(vs[r]) for r in range(len(vs) - 1)]
    kicks.append(dagger(vs[-1]))
    return KickCycle(kicks, tol)


def group_average(H, group: Sequence[np.ndarray]) -> np.ndarray:
    h = np.asarray(H, dtype=complex)
    vs = [require_unitary(v, name=f"V_{i + 1}") for i, v in enumerate(group)]
    if any(v.shape != h.shape for v in vs):
        raise DimensionMismatch("group elements and H must share one dimension")
    acc = sum(dagger(v) @ h @ v for v in vs) / len(vs)
    return 0.5 * (acc + dagger(acc))


def offblock_norm(decomp: SpectralDecomposition, a: np.ndarray) -> float:
    """Frobenius norm of ``a - sum_mu P_mu a P_mu``."""
    return float(np.linalg.norm(a - decomp.project(a)))
