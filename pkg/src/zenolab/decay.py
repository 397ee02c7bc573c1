r"""Decay rates of a kicked qubit coupled to a bath.

The bath enters only through its thermal spectral density ``kappa(omega)``.
Kicks every ``tau`` modify the golden-rule rate ``2 pi kappa(omega0)`` to

.. math::

    \gamma(\tau) = t \int d\omega\, \kappa(\omega)\,
        \mathrm{sinc}^2\!\Big(\frac{(\omega-\omega_0) t}{2}\Big)
        \tan^2\!\Big(\frac{(\omega-\omega_0)\tau}{4}\Big),

evaluated here at ``t = N tau`` for an integer number of kicks ``N``.
Only then do the zeros of ``sinc^2`` cancel the poles of ``tan^2`` at the
sidebands ``omega0 + 2 pi j / tau`` (odd ``j``). As ``N`` grows the kernel
collapses onto those sidebands with weights ``8 / (pi j^2)``.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np
import scipy.optimize

from .errors import (
    InvalidWindow,
    NonpositiveFrequency,
    NoSignChange,
    OutOfTableRange,
    QuadratureNotConverged,
)

ZENO_THRESHOLD = np.pi**2 / 4


@dataclass(frozen=True)
class Ohmic:
    """Ohmic density ``A w coth(w/2T) / (1 + (w/wc)^2)^n``.

    At ``T = 0`` the density vanishes for negative frequencies.
    """

    amplitude: float = 1.0
    cutoff: float = 1.0
    temperature: float = 0.0
    n: int = 2

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError("amplitude must be >= 0")
        if not self.cutoff > 0:
            raise ValueError("cutoff must be > 0")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"exponent n must be an integer >= 2, got {self.n}")

    @property
    def scale(self) -> float:
        return self.cutoff

    def breakpoints(self) -> list[float]:
        return [0.0] if self.temperature == 0 else []

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        rolloff = (1.0 + (w / self.cutoff) ** 2) ** (-int(self.n))
        if self.temperature == 0:
            core = np.where(w > 0, w, 0.0)
        else:
            x = w / (2 * self.temperature)
            small = np.abs(x) < 1e-4
            xs = np.where(small, 1.0, x)
            # x coth x, with its removable singularity at x = 0
            core = 2 * self.temperature * np.where(small, 1 + x**2 / 3, xs / np.tanh(xs))
        out = self.amplitude * core * rolloff
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear density through sorted ``(omega, kappa)`` samples.

    Outside the table ``extrapolate`` decides: ``"zero"`` (band-limited
    bath), ``"hold"`` (constant end values) or ``"error"``.
    """

    omega: tuple[float, ...]
    values: tuple[float, ...]
    extrapolate: str = "zero"
    scale: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        k = np.asarray(self.values, dtype=float)
        if w.ndim != 1 or w.shape != k.shape or len(w) == 0:
            raise ValueError("omega and values must be equal-length non-empty sequences")
        if np.any(np.diff(w) <= 0):
            raise ValueError("table frequencies must be strictly increasing")
        if np.any(k < 0):
            raise ValueError("spectral density samples must be >= 0")
        if self.extrapolate not in ("zero", "hold", "error"):
            raise ValueError(f"unknown extrapolation policy {self.extrapolate!r}")
        object.__setattr__(self, "omega", tuple(float(v) for v in w))
        object.__setattr__(self, "values", tuple(float(v) for v in k))

    @classmethod
    def flat(cls, level: float, lo: float, hi: float, extrapolate: str = "zero") -> "Tabulated":
        return cls((lo, hi), (level, level), extrapolate)

    def breakpoints(self) -> list[float]:
        return list(self.omega)

    def __call__(self, omega):
        w = np.asarray(omega, dtype=float)
        lo, hi = self.omega[0], self.omega[-1]
        outside = (w < lo) | (w > hi)
        if self.extrapolate == "error" and np.any(outside):
            raise OutOfTableRange(f"frequency outside table range [{lo}, {hi}]")
        out = np.interp(w, self.omega, self.values)
        if self.extrapolate == "zero":
            out = np.where(outside, 0.0, out)
        out = np.maximum(out, 0.0)
        return out if out.ndim else float(out)


SpectralDensity = Union[Ohmic, Tabulated]


def kappa(sd: SpectralDensity, omega):
    return sd(omega)


def spectral_density_to_dict(sd: SpectralDensity) -> dict:
    if isinstance(sd, Ohmic):
        return {"kind": "ohmic", "amplitude": sd.amplitude, "cutoff": sd.cutoff,
                "temperature": sd.temperature, "n": int(sd.n)}
    return {"kind": "tabulated", "omega": list(sd.omega), "values": list(sd.values),
            "extrapolate": sd.extrapolate, "scale": sd.scale}


def spectral_density_from_dict(d: dict) -> SpectralDensity:
    kind = d.get("kind")
    if kind == "ohmic":
        return Ohmic(d.get("amplitude", 1.0), d.get("cutoff", 1.0), d.get("temperature", 0.0), d.get("n", 2))
    if kind == "tabulated":
        return Tabulated(tuple(d["omega"]), tuple(d["values"]), d.get("extrapolate", "zero"), d.get("scale", 1.0))
    raise ValueError(f"unknown spectral density kind {kind!r}")


def free_rate(sd: SpectralDensity, omega0: float) -> float:
    if not omega0 > 0:
        raise NonpositiveFrequency(f"omega0 must be > 0, got {omega0}")
    return 2 * np.pi * float(sd(omega0))


@dataclass(frozen=True)
class QuadratureConfig:
    """Controls for the kicked-rate integral.

    The window is ``omega0 +- half_width``; by default
    ``half_width = max(10 * scale, 2 pi (j_max + 1) / tau)`` where ``scale``
    is the density's cutoff. Every panel between forced breakpoints starts
    with one subpanel per kernel oscillation (``2 pi / t``) carrying
    ``order`` Gauss-Legendre nodes and is halved until two successive
    levels agree. Within ``guard * 2 pi / t`` of a sideband the integrand
    takes its analytic limit value.
    """

    rtol: float = 1e-6
    atol: float = 1e-15
    j_max: int = 9
    half_width: float | None = None
    order: int = 8
    max_level: int = 8
    guard: float = 1e-6

    def __post_init__(self):
        if self.j_max < 1 or self.j_max % 2 == 0:
            raise ValueError("j_max must be a positive odd integer")
        if self.order < 2 or self.order % 2:
            raise ValueError("order must be an even integer >= 2")

    def window(self, sd: SpectralDensity, tau: float) -> float:
        w = self.half_width
        if w is None:
            w = max(10 * sd.scale, 2 * np.pi * (self.j_max + 1) / tau)
        if not (np.isfinite(w) and w > 0):
            raise InvalidWindow(f"quadrature half-width must be finite and > 0, got {w}")
        return float(w)


def _kernel(x: np.ndarray, tau: float, N: int, guard: float) -> np.ndarray:
    """``t sinc^2(x t / 2) tan^2(x tau / 4)`` with ``t = N tau``, stable at every sideband."""
    t = N * tau
    theta = x * tau / 4
    k = np.round((theta - np.pi / 2) / np.pi)
    x_pole = 2 * np.pi * (2 * k + 1) / tau
    dx = x - x_pole
    delta = dx * tau / 4
    near = np.abs(delta) < np.pi / 4
    out = np.empty_like(x)

    # near a sideband: tan^2 sin^2 = cos^2(delta) (sin(2N delta) / sin(delta))^2
    xn, dn, dxn = x[near], delta[near], dx[near]
    inside = np.abs(dxn) < guard * 2 * np.pi / t
    sd = np.where(inside, 1.0, np.sin(dn))
    ratio = np.where(inside, 2.0 * N, np.sin(2 * N * dn) / sd)
    out[near] = t * np.cos(dn) ** 2 * ratio**2 / (xn * t / 2) ** 2

    xf = x[~near]
    out[~near] = t * np.sinc(xf * t / (2 * np.pi)) ** 2 * np.tan(xf * tau / 4) ** 2
    return out


def _panel_integral(f, a: float, b: float, pieces: int, nodes: np.ndarray, weights: np.ndarray,
                    chunk: int = 1 << 21) -> float:
    h = (b - a) / pieces
    total = 0.0
    per = max(1, chunk // len(nodes))
    for start in range(0, pieces, per):
        stop = min(pieces, start + per)
        left = a + h * np.arange(start, stop)
        x = (left[:, None] + 0.5 * h * (nodes[None, :] + 1)).ravel()
        total += 0.5 * h * float(np.sum(f(x).reshape(stop - start, -1) @ weights))
    return total


def modified_rate_with_error(sd: SpectralDensity, omega0: float, tau: float, N: int,
                             quad: QuadratureConfig | None = None) -> tuple[float, float]:
    """Kicked decay rate at ``t = N tau`` and an estimate of its quadrature error."""
    quad = quad or QuadratureConfig()
    if not tau > 0:
        raise ValueError("tau must be > 0")
    if N < 1:
        raise ValueError("N must be >= 1")
    t = N * tau
    half = quad.window(sd, tau)
    lo, hi = -half, half
    cuts = {lo, hi, 0.0}
    jmax_window = int(half * tau / (2 * np.pi)) + 1
    for j in range(-jmax_window, jmax_window + 1):
        if j % 2:
            xj = 2 * np.pi * j / tau
            if lo < xj < hi:
                cuts.add(xj)
    for w in sd.breakpoints():
        if lo < w - omega0 < hi:
            cuts.add(w - omega0)
    edges = sorted(cuts)

    def f(x):
        return sd(omega0 + x) * _kernel(x, tau, N, quad.guard)

    nodes, weights = np.polynomial.legendre.leggauss(quad.order)
    period = 2 * np.pi / t
    panels = []
    for a, b in zip(edges[:-1], edges[1:]):
        base = max(1, math.ceil((b - a) / period))
        prev = _panel_integral(f, a, b, base, nodes, weights)
        cur = _panel_integral(f, a, b, 2 * base, nodes, weights)
        panels.append([a, b, base, 1, prev, cur])

    total = sum(p[5] for p in panels)
    budget = max(quad.atol, quad.rtol * abs(total)) / len(panels)
    for p in panels:
        while abs(p[5] - p[4]) > budget:
            if p[3] >= quad.max_level:
                raise QuadratureNotConverged(
                    f"panel [{p[0]:.4g}, {p[1]:.4g}] did not converge after {p[3]} refinements"
                )
            p[3] += 1
            p[4] = p[5]
            p[5] = _panel_integral(f, p[0], p[1], p[2] << p[3], nodes, weights)
    value = float(sum(p[5] for p in panels))
    error = float(sum(abs(p[5] - p[4]) for p in panels))
    return max(value, 0.0), error


def modified_rate(sd: SpectralDensity, omega0: float, tau: float, N: int,
                  quad: QuadratureConfig | None = None) -> float:
    return modified_rate_with_error(sd, omega0, tau, N, quad)[0]


def sideband_rate(sd: SpectralDensity, omega0: float, tau: float, j_max: int = 9) -> float:
    """Large-``N`` limit as a comb: ``sum_{odd |j| <= j_max} 8 / (pi j^2) kappa(omega0 + 2 pi j / tau)``."""
    if j_max < 1 or j_max % 2 == 0:
        raise ValueError("j_max must be a positive odd integer")
    j = np.arange(-j_max, j_max + 1, 2, dtype=float)
    return float(np.sum(8 / (np.pi * j**2) * sd(omega0 + 2 * np.pi * j / tau)))


def asymptotic_rate(sd: SpectralDensity, tau: float) -> float:
    """Small-``tau`` asymptote ``(8 / pi) kappa(2 pi / tau)``."""
    if not tau > 0:
        raise ValueError("tau must be > 0")
    return 8 / np.pi * float(sd(2 * np.pi / tau))


def transition_time(sd: SpectralDensity, omega0: float, bracket: tuple[float, float],
                    grid_points: int = 64, rtol: float = 1e-6) -> float:
    """Smallest ``tau`` in ``bracket`` with ``kappa(2 pi / tau) = (pi^2 / 4) kappa(omega0)``.

    A log-spaced scan locates the first sign change, which bisection then
    refines.
    """
    lo, hi = bracket
    if not (0 < lo < hi):
        raise ValueError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    target = ZENO_THRESHOLD * float(sd(omega0))

    def f(tau):
        return float(sd(2 * np.pi / tau)) - target

    taus = np.geomspace(lo, hi, grid_points)
    signs = np.sign([f(x) for x in taus])
    for i in range(grid_points - 1):
        if signs[i] == 0 and np.any(signs != 0):
            return float(taus[i])
        if signs[i] * signs[i + 1] < 0:
            return float(scipy.optimize.bisect(f, taus[i], taus[i + 1], xtol=1e-300, rtol=rtol, maxiter=500))
    if signs[-1] == 0 and np.any(signs != 0):
        return float(taus[-1])
    raise NoSignChange(
        f"kappa(2 pi / tau) - (pi^2/4) kappa(omega0) keeps one sign on [{lo}, {hi}]"
    )


def ohmic_tau_star_estimate(amplitude: float, cutoff: float, temperature: float, n: int, omega0: float) -> float:
    """Closed-form low-temperature transition time for an Ohmic bath."""
    if not (temperature <= 0.1 * omega0 and omega0 <= 0.1 * cutoff):
        warnings.warn(
            "tau* estimate assumes T << omega0 << omega_c "
            f"(got T={temperature}, omega0={omega0}, omega_c={cutoff})",
            stacklevel=2,
        )
    return 2 * np.pi / cutoff * (ZENO_THRESHOLD * omega0 / cutoff) ** (1.0 / (2 * n - 1))


class Regime(str, Enum):
    ZENO = "Zeno"
    INVERSE = "Inverse"
    INDETERMINATE = "Indeterminate"


def _regime(gamma: float, error: float, gamma_free: float, quad: QuadratureConfig) -> Regime:
    margin = max(error, quad.rtol * max(gamma, gamma_free), quad.atol)
    if abs(gamma - gamma_free) <= margin:
        return Regime.INDETERMINATE
    return Regime.ZENO if gamma < gamma_free else Regime.INVERSE


def classify_regime(sd: SpectralDensity, omega0: float, tau: float, N: int,
                    quad: QuadratureConfig | None = None) -> Regime:
    quad = quad or QuadratureConfig()
    gamma, err = modified_rate_with_error(sd, omega0, tau, N, quad)
    return _regime(gamma, err, free_rate(sd, omega0), quad)


@dataclass(frozen=True)
class DecaySample:
    tau: float
    gamma_tau: float
    gamma_asym: float
    regime: Regime


@dataclass(frozen=True)
class DecayReport:
    omega0: float
    gamma_free: float
    samples: tuple[DecaySample, ...]
    tau_star: float | None = None
    N: int | None = None
    density: dict = field(default_factory=dict)

    CSV_HEADER = ("tau", "gamma_tau", "gamma_asym", "gamma_free", "regime")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.CSV_HEADER)
        for s in self.samples:
            w.writerow([_fmt(s.tau), _fmt(s.gamma_tau), _fmt(s.gamma_asym), _fmt(self.gamma_free), s.regime.value])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "gamma_free": self.gamma_free,
            "tau_star": self.tau_star,
            "N": self.N,
            "density": self.density,
            "samples": [
                {"tau": s.tau, "gamma_tau": s.gamma_tau, "gamma_asym": s.gamma_asym, "regime": s.regime.value}
                for s in self.samples
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def decay_report(sd: SpectralDensity, omega0: float, taus: Sequence[float], N: int,
                 quad: QuadratureConfig | None = None, bracket: tuple[float, float] | None = None,
                 threads: int = 1) -> DecayReport:
    """Sweep ``tau``; each grid point is independent so the sweep may run on ``threads`` workers."""
    quad = quad or QuadratureConfig()
    gamma_free = free_rate(sd, omega0)

    def one(tau):
        g, err = modified_rate_with_error(sd, omega0, tau, N, quad)
        return DecaySample(float(tau), g, asymptotic_rate(sd, tau), _regime(g, err, gamma_free, quad))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(one, taus))
    else:
        samples = [one(tau) for tau in taus]
    tau_star = None
    if bracket is not None:
        try:
            tau_star = transition_time(sd, omega0, bracket)
        except NoSignChange:
            tau_star = None
    return DecayReport(float(omega0), gamma_free, tuple(samples), tau_star, N, spectral_density_to_dict(sd))
