"""Dense complex linear algebra for small operators.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; this module
only adds validation, unitary propagators of Hermitian generators and a
spectral decomposition of unitaries with merged (clustered) eigenphases.

Phase convention: a unitary is written ``U = sum_mu exp(-1j*lam_mu) P_mu``,
so the eigenphase of an eigenvalue ``u`` is ``-angle(u)`` folded into
``(-pi, pi]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ClusterAmbiguity,
    DimensionMismatch,
    NonHermitianInput,
    NonUnitaryInput,
)

DEFAULT_CLUSTER_TOL = 1e-8


def default_tol(dim: int) -> float:
    return 1e-9 * dim


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite square complex matrix or raise."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def check_same_dim(*mats: np.ndarray) -> int:
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise DimensionMismatch(f"operator dimensions differ: {sorted(dims)}")
    return dims.pop()


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def frobenius_distance(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return float(np.linalg.norm(a - b))


def hermiticity_error(h: np.ndarray) -> float:
    return float(np.linalg.norm(h - dagger(h)))


def unitarity_error(u: np.ndarray) -> float:
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0])))


def require_hermitian(h, tol: float | None = None, name: str = "H") -> np.ndarray:
    h = as_matrix(h, name)
    tol = default_tol(h.shape[0]) if tol is None else tol
    err = hermiticity_error(h)
    if err > tol:
        raise NonHermitianInput(f"{name} is not Hermitian: |{name} - {name}^+|_F = {err:.3e} > {tol:.1e}")
    return h


def require_unitary(u, tol: float | None = None, name: str = "U") -> np.ndarray:
    u = as_matrix(u, name)
    tol = default_tol(u.shape[0]) if tol is None else tol
    err = unitarity_error(u)
    if err > tol:
        raise NonUnitaryInput(f"{name} is not unitary: |{name}^+ {name} - I|_F = {err:.3e} > {tol:.1e}")
    return u


def expm_hermitian(h, t: float, tol: float | None = None) -> np.ndarray:
    """Return ``exp(-1j * h * t)`` for Hermitian ``h``, built on its eigenbasis."""
    h = require_hermitian(h, tol)
    energies, vecs = np.linalg.eigh(0.5 * (h + dagger(h)))
    return (vecs * np.exp(-1j * energies * t)) @ dagger(vecs)


def canonical_phase(phi):
    """Fold angles into ``(-pi, pi]``."""
    folded = np.pi - np.mod(np.pi - np.asarray(phi, dtype=float), 2 * np.pi)
    return folded if np.ndim(folded) else float(folded)


def circular_gap(a: float, b: float) -> float:
    d = abs(a - b) % (2 * np.pi)
    return min(d, 2 * np.pi - d)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenphases ``phases[mu]`` with eigenprojections ``projectors[mu]``.

    ``bases[mu]`` holds orthonormal columns spanning the range of
    ``projectors[mu]``; it is what blockwise computations use.
    """

    phases: tuple[float, ...]
    projectors: tuple[np.ndarray, ...]
    bases: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.projectors[0].shape[0]

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.bases)

    def __len__(self) -> int:
        return len(self.phases)

    def reconstruct(self) -> np.ndarray:
        return sum(np.exp(-1j * lam) * p for lam, p in zip(self.phases, self.projectors))

    def project(self, h: np.ndarray) -> np.ndarray:
        """Block-diagonal part ``sum_mu P_mu h P_mu``."""
        return sum(p @ h @ p for p in self.projectors)


def _cluster_on_circle(phases: np.ndarray, cluster_tol: float) -> list[list[int]]:
    order = np.argsort(phases, kind="stable")
    s = phases[order]
    n = len(s)
    gaps = np.empty(n)
    gaps[:-1] = np.diff(s)
    gaps[-1] = s[0] + 2 * np.pi - s[-1]
    ambiguous = (gaps > cluster_tol) & (gaps <= 10 * cluster_tol)
    if np.any(ambiguous):
        g = gaps[ambiguous].min()
        raise ClusterAmbiguity(
            f"eigenphase gap {g:.3e} lies between cluster_tol={cluster_tol:.1e} and 10*cluster_tol"
        )
    breaks = np.flatnonzero(gaps > cluster_tol)
    if len(breaks) == 0:
        return [list(order)]
    clusters = []
    for a, b in zip(breaks, np.roll(breaks, -1)):
        idx = [(a + 1 + k) % n for k in range((b - a) % n or n)]
        clusters.append([int(order[i]) for i in idx])
    return clusters


def spectral_decompose(u, cluster_tol: float = DEFAULT_CLUSTER_TOL, tol: float | None = None) -> SpectralDecomposition:
    """Eigenphases and orthogonal eigenprojections of a unitary.

    Eigenvalues whose phases lie within ``cluster_tol`` of each other on
    the circle share one projector. The complex Schur form of a normal
    matrix is diagonal, so its unitary factor supplies exactly orthonormal
    eigenvector blocks even for degenerate spectra.
    """
    u = require_unitary(u, tol)
    tri, z = scipy.linalg.schur(u, output="complex")
    raw = canonical_phase(-np.angle(np.diag(tri)))
    raw = np.atleast_1d(raw)
    clusters = _cluster_on_circle(raw, cluster_tol)
    # sort blocks by representative phase for a deterministic layout
    blocks = []
    for members in clusters:
        lam = canonical_phase(-np.angle(np.mean(np.exp(-1j * raw[members]))))
        blocks.append((float(lam), sorted(members)))
    blocks.sort(key=lambda b: b[0])
    phases, projectors, bases = [], [], []
    for lam, members in blocks:
        v = z[:, members]
        p = v @ dagger(v)
        phases.append(lam)
        projectors.append(_frozen(0.5 * (p + dagger(p))))
        bases.append(_frozen(v))
    return SpectralDecomposition(tuple(phases), tuple(projectors), tuple(bases))


def hermitian_eigenprojections(h, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> tuple[np.ndarray, list[np.ndarray]]:
    """Distinct eigenvalues of a Hermitian matrix and their eigenprojections."""
    h = require_hermitian(h)
    energies, vecs = np.linalg.eigh(0.5 * (h + dagger(h)))
    groups = [[0]]
    for k in range(1, len(energies)):
        if energies[k] - energies[groups[-1][-1]] > cluster_tol:
            groups.append([k])
        else:
            groups[-1].append(k)
    values = np.array([energies[g].mean() for g in groups])
    projs = [vecs[:, g] @ dagger(vecs[:, g]) for g in groups]
    return values, projs
