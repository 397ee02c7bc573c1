r"""Pulsed versus continuous strong coupling.

A rectangular pulse train interpolates between strong continuous coupling
``H + K H1`` and instantaneous kicks ``exp(-i tau1 H1)``:

.. math::

    H_{tot}(s) = H + K H_1 \sum_n g\Big(\frac{s - s_n}{\tau_1 / K}\Big),
    \qquad g = \chi_{[-1/2, 1/2)} .

Each period is an idle stretch of length ``tau2`` followed by a pulse of
width ``tau1 / K``. Removing idle time (``tau2 -> 0``) gives continuous
coupling and narrowing the pulses (``K -> oo``) gives kicks; both limits
should end in the Zeno dynamics generated by ``H_Z = sum_mu P_mu H P_mu``
with ``P_mu`` the eigenprojections of ``H1``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import ZenoStructure, zeno_structure
from .errors import DegenerateSpec, DimensionMismatch, PhaseCollision
from .linalg import (
    DEFAULT_CLUSTER_TOL,
    circular_gap,
    dagger,
    expm_hermitian,
    hermitian_eigenprojections,
    require_hermitian,
)

log = logging.getLogger(__name__)

_PERIOD_SLACK = 1e-9


def rect(x):
    """Rectangular pulse shape on ``[-1/2, 1/2)``; half-open so translates tile the line."""
    x = np.asarray(x, dtype=float)
    return ((x >= -0.5) & (x < 0.5)).astype(float)


@dataclass(frozen=True)
class PulseTrainSpec:
    K: float
    tau1: float
    tau2: float
    t: float
    shape: str = "rectangular"

    def __post_init__(self):
        if self.shape != "rectangular":
            raise ValueError("only the rectangular pulse shape is supported")
        if not self.K > 0 or not self.tau1 > 0 or not self.t > 0:
            raise ValueError("K, tau1 and t must be > 0")
        if self.tau2 < 0:
            raise ValueError("tau2 must be >= 0")
        if self.period <= 0:
            raise DegenerateSpec("pulse period tau1/K + tau2 is zero")

    @property
    def kicked(self) -> bool:
        return math.isinf(self.K)

    @property
    def continuous(self) -> bool:
        return self.tau2 == 0

    @property
    def width(self) -> float:
        return 0.0 if self.kicked else self.tau1 / self.K

    @property
    def period(self) -> float:
        return self.width + self.tau2

    def layout(self) -> tuple[int, float]:
        """Whole periods inside the horizon and the leftover idle time."""
        if self.continuous:
            return 0, 0.0
        n = math.floor(self.t / self.period + _PERIOD_SLACK)
        rem = self.t - n * self.period
        if abs(rem) <= _PERIOD_SLACK * self.t:
            rem = 0.0
        return n, max(rem, 0.0)

    def pulse_area(self) -> float:
        """Integrated coupling multiplying ``H1`` over the horizon."""
        if self.continuous:
            return self.K * self.t
        return self.layout()[0] * self.tau1


def _pair(H, H1) -> tuple[np.ndarray, np.ndarray]:
    h = require_hermitian(H, name="H")
    h1 = require_hermitian(H1, name="H1")
    if h.shape != h1.shape:
        raise DimensionMismatch(f"H has shape {h.shape}, H1 has shape {h1.shape}")
    return h, h1


def continuous_evolve(H, H1, K: float, t: float) -> np.ndarray:
    h, h1 = _pair(H, H1)
    return expm_hermitian(h + K * h1, t)


def evolve_schedule(H, H1, spec: PulseTrainSpec) -> np.ndarray:
    """Exact propagator of the pulse train over ``spec.t``.

    With ``tau2 = 0`` the pulses tile time and the schedule is one segment
    of ``H + K H1``. Otherwise every period is ``exp(-i H tau2)`` followed by
    the pulse, and the time left after the last whole period evolves under
    ``H`` alone.
    """
    h, h1 = _pair(H, H1)
    if spec.continuous:
        return continuous_evolve(h, h1, spec.K, spec.t)
    n, rem = spec.layout()
    if spec.kicked:
        pulse = expm_hermitian(h1, spec.tau1)
    else:
        pulse = expm_hermitian(h + spec.K * h1, spec.width)
    one_period = pulse @ expm_hermitian(h, spec.tau2)
    u = np.linalg.matrix_power(one_period, n)
    if rem > 0:
        log.debug("evolve_schedule: %d periods, free remainder %.3e", n, rem)
        u = expm_hermitian(h, rem) @ u
    return u


def check_phase_collision(H1, tau1: float, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> None:
    """Raise if distinct eigenvalues of ``H1`` give kick phases equal mod 2 pi."""
    values, _ = hermitian_eigenprojections(H1, cluster_tol)
    phases = [tau1 * e for e in values]
    for i in range(len(phases)):
        for j in range(i + 1, len(phases)):
            if circular_gap(phases[i], phases[j]) < cluster_tol:
                raise PhaseCollision(
                    f"eigenvalues {values[i]:.6g} and {values[j]:.6g} of H1 collide: "
                    f"tau1 * (e_i - e_j) is a multiple of 2 pi for tau1={tau1}"
                )


def interaction_picture(U: np.ndarray, H1: np.ndarray, area: float) -> np.ndarray:
    """Strip the fast phase ``exp(-i area H1)`` accumulated by the coupling."""
    return expm_hermitian(H1, -area) @ U


def block_infidelities(U_int: np.ndarray, target: ZenoStructure, t: float) -> list[float]:
    ref = target.HZ
    out = []
    for v in target.decomposition.bases:
        block = dagger(v) @ U_int @ v
        hz = dagger(v) @ ref @ v
        want = expm_hermitian(0.5 * (hz + dagger(hz)), t)
        out.append(float(1.0 - abs(np.trace(block @ dagger(want))) / v.shape[1]))
    return out


@dataclass(frozen=True)
class LimitCell:
    K: float
    tau2: float
    leakage: float
    block_infidelities: tuple[float, ...]
    periods: int
    remainder: float

    @property
    def max_block_infidelity(self) -> float:
        return max(self.block_infidelities)


@dataclass(frozen=True)
class LimitReport:
    K_values: tuple[float, ...]
    tau2_values: tuple[float, ...]
    cells: tuple[LimitCell, ...]
    target: ZenoStructure
    t: float
    continuous_corner_deviation: float
    kicked_corner_deviation: float
    corner_distance: float

    CSV_HEADER = ("K", "tau2", "leakage", "max_block_infidelity")

    def cell(self, K: float, tau2: float) -> LimitCell:
        for c in self.cells:
            if c.K == K and c.tau2 == tau2:
                return c
        raise KeyError((K, tau2))

    def path(self, order: str) -> list[LimitCell]:
        """Cells visited when one limit is taken before the other.

        ``"tau2-first"`` shrinks the idle time at the weakest coupling and then
        raises ``K`` at the shortest idle time; ``"K-first"`` raises ``K`` at
        the longest idle time and then shrinks ``tau2``. Both end at the
        (largest K, smallest tau2) corner.
        """
        ks = sorted(self.K_values)
        taus = sorted(self.tau2_values, reverse=True)
        if order == "tau2-first":
            pts = [(ks[0], s) for s in taus] + [(k, taus[-1]) for k in ks[1:]]
        elif order == "K-first":
            pts = [(k, taus[0]) for k in ks] + [(ks[-1], s) for s in taus[1:]]
        else:
            raise ValueError(f"unknown order {order!r}")
        return [self.cell(k, s) for k, s in pts]

    def monotone(self, order: str, factor: float = 2.0) -> bool:
        leak = [c.leakage for c in self.path(order)]
        return all(b <= factor * a for a, b in zip(leak, leak[1:]))

    def corner_agreement(self, factor: float = 2.0) -> bool:
        worst = max(self.continuous_corner_deviation, self.kicked_corner_deviation)
        return self.corner_distance <= factor * worst

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        for c in self.cells:
            w.writerow([format(c.K, ".17e"), format(c.tau2, ".17e"),
                        format(c.leakage, ".17e"), format(c.max_block_infidelity, ".17e")])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "K_values": list(self.K_values),
            "tau2_values": list(self.tau2_values),
            "cells": [
                {"K": c.K, "tau2": c.tau2, "leakage": c.leakage,
                 "block_infidelities": list(c.block_infidelities),
                 "max_block_infidelity": c.max_block_infidelity,
                 "periods": c.periods, "remainder": c.remainder}
                for c in self.cells
            ],
            "monotone": {o: self.monotone(o) for o in ("tau2-first", "K-first")},
            "continuous_corner_deviation": self.continuous_corner_deviation,
            "kicked_corner_deviation": self.kicked_corner_deviation,
            "corner_distance": self.corner_distance,
            "corner_agreement": self.corner_agreement(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def limit_order_compare(H, H1, tau1: float, t: float, K_list: Sequence[float], tau2_list: Sequence[float],
                        cluster_tol: float = DEFAULT_CLUSTER_TOL, threads: int = 1) -> LimitReport:
    """Leakage and per-block infidelity over a (K, tau2) grid, plus both limit corners."""
    h, h1 = _pair(H, H1)
    check_phase_collision(h1, tau1, cluster_tol)
    target = zeno_structure(h, expm_hermitian(h1, tau1), cluster_tol)
    zeno_t = expm_hermitian(target.HZ, t)

    def stripped(spec: PulseTrainSpec) -> np.ndarray:
        return interaction_picture(evolve_schedule(h, h1, spec), h1, spec.pulse_area())

    def one(K: float, tau2: float) -> LimitCell:
        spec = PulseTrainSpec(K, tau1, tau2, t)
        u = stripped(spec)
        leak = float(np.linalg.norm(u - target.decomposition.project(u)))
        n, rem = spec.layout()
        return LimitCell(float(K), float(tau2), leak, tuple(block_infidelities(u, target, t)), n, rem)

    grid = [(float(k), float(s)) for k in K_list for s in tau2_list]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cells = list(pool.map(lambda ks: one(*ks), grid))
    else:
        cells = [one(k, s) for k, s in grid]

    # each limit taken exactly first, the other evaluated at its extreme grid value
    u_cont = stripped(PulseTrainSpec(max(K_list), tau1, 0.0, t))
    u_kick = stripped(PulseTrainSpec(math.inf, tau1, min(tau2_list), t))
    return LimitReport(
        K_values=tuple(float(k) for k in K_list),
        tau2_values=tuple(float(s) for s in tau2_list),
        cells=tuple(cells),
        target=target,
        t=float(t),
        continuous_corner_deviation=float(np.linalg.norm(u_cont - zeno_t)),
        kicked_corner_deviation=float(np.linalg.norm(u_kick - zeno_t)),
        corner_distance=float(np.linalg.norm(u_cont - u_kick)),
    )
