"""Occupations, specific heat, scattering rates, lifetimes and thermal conductivity.

Toy frequencies are dimensionless; ``frequency_scale`` (rad/s per unit)
turns them into physical angular frequencies.  Rates and conductivities are
toy-normalized: one multiplicative constant, fixed at an anchor temperature,
absorbs the golden-rule prefactor and the absolute coupling scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.constants import hbar, k as k_B
from scipy.optimize import brentq

# reference toy-model values: c_v at the anchor fixes frequency_scale and
# kappa at the anchor fixes the overall normalization
REFERENCE_CV_100K = 4.1396e-23
REFERENCE_KAPPA_100K = 7200.133
ANCHOR_T = 100.0
DEFAULT_GROUP_VELOCITY = 8500.0

SIGMA_TARGETS = {1: 0.6827, 3: 0.9973}


def reduced_energy(omega: float, T: float, frequency_scale: float) -> float:
    """``x = hbar * omega_phys / (k_B T)``."""
    if omega <= 0 or T <= 0 or frequency_scale <= 0:
        raise ValueError("omega, T and frequency_scale must be positive")
    return hbar * frequency_scale * omega / (k_B * T)


def occupation(omega: float, T: float, frequency_scale: float) -> float:
    """Bose-Einstein occupation ``1 / (exp(x) - 1)``; exactly 0 once exp overflows."""
    x = reduced_energy(omega, T, frequency_scale)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def specific_heat_x(x: float) -> float:
    """Per-mode heat capacity ``k_B x^2 e^x / (e^x - 1)^2`` as a function of x."""
    if x <= 0:
        raise ValueError("x must be positive")
    if x > 700.0:
        return 0.0
    # multiply through by exp(-x) to stay finite for large x
    em = math.exp(-x)
    return k_B * x * x * em / (-math.expm1(-x)) ** 2


def specific_heat(omega: float, T: float, frequency_scale: float) -> float:
    return specific_heat_x(reduced_energy(omega, T, frequency_scale))


def total_specific_heat(frequencies: Sequence[float], T: float, frequency_scale: float) -> float:
    return float(sum(specific_heat(w, T, frequency_scale) for w in frequencies))


def gamma(occupations: Sequence[float], structural_element_sq: float) -> float:
    """Splitting rate ``n (1 + n1)(1 + n2) |M|^2`` in toy units."""
    if len(occupations) != 3:
        raise ValueError("a splitting needs three occupations")
    if min(occupations) < 0 or structural_element_sq < 0:
        raise ValueError("occupations and structural element must be non-negative")
    n, n1, n2 = occupations
    return float(n * (1.0 + n1) * (1.0 + n2) * structural_element_sq)


def combining_gamma(occupations: Sequence[float], structural_element_sq: float) -> float:
    """Reverse process: two phonons merge, ``n1 n2 (1 + n)``."""
    if len(occupations) != 3:
        raise ValueError("a combination needs three occupations")
    if min(occupations) < 0 or structural_element_sq < 0:
        raise ValueError("occupations and structural element must be non-negative")
    n, n1, n2 = occupations
    return float(n1 * n2 * (1.0 + n) * structural_element_sq)


def lifetime(gamma3: float, gamma4: float = 0.0) -> float:
    """Matthiessen combination ``1 / (gamma3 + gamma4)``."""
    if gamma3 < 0 or gamma4 < 0:
        raise ValueError("rates must be non-negative")
    total = gamma3 + gamma4
    if total == 0:
        raise ValueError("both rates are zero: lifetime is infinite")
    return 1.0 / total


def kappa(
    velocity: float | Sequence[float],
    heat: float | Sequence[float],
    tau: float | Sequence[float],
    volume: float = 1.0,
) -> float:
    """``sum v^2 c tau / V`` over modes (scalars count as one mode)."""
    v = np.atleast_1d(np.asarray(velocity, dtype=float))
    c = np.atleast_1d(np.asarray(heat, dtype=float))
    t = np.atleast_1d(np.asarray(tau, dtype=float))
    if volume <= 0 or np.any(v <= 0) or np.any(c <= 0) or np.any(t <= 0):
        raise ValueError("velocity, heat, lifetime and volume must be positive")
    return float(np.sum(v**2 * c * t) / volume)


def fidelity_requirement(n_two_qubit_gates: int, sigma_level: int | float = 1) -> float:
    """Per-gate fidelity whose n-th power reaches the target confidence.

    ``sigma_level`` is 1 or 3 (68.27% / 99.73%) or an explicit target in (0, 1].
    """
    if n_two_qubit_gates < 1:
        raise ValueError("gate count must be >= 1")
    if sigma_level in SIGMA_TARGETS:
        target = SIGMA_TARGETS[int(sigma_level)]
    elif 0.0 < float(sigma_level) <= 1.0:
        target = float(sigma_level)
    else:
        raise ValueError(f"unknown sigma level {sigma_level!r}")
    return target ** (1.0 / n_two_qubit_gates)


def su2_gate_count(n_phonons: int, levels_per_phonon: int, reps: int) -> int:
    """Two-qubit gates in the fully entangled ansatz: ``(mn)(mn-1)/2`` per repetition."""
    width = n_phonons * levels_per_phonon
    return width * (width - 1) // 2 * reps


def calibrate_frequency_scale(
    frequencies: Sequence[float],
    target_heat: float = REFERENCE_CV_100K,
    T: float = ANCHOR_T,
) -> float:
    """Root-find the rad/s-per-unit scale giving ``target_heat`` at temperature T."""
    ceiling = k_B * len(frequencies)
    if not 0 < target_heat < ceiling:
        raise ValueError(f"target heat must lie in (0, {ceiling:.6g}) J/K")
    # total heat falls monotonically with the scale; bracket in reduced units
    w_max = max(frequencies)

    def residual(log_x: float) -> float:
        scale = math.exp(log_x) * k_B * T / (hbar * w_max)
        return total_specific_heat(frequencies, T, scale) - target_heat

    log_x = brentq(residual, math.log(1e-8), math.log(50.0), xtol=1e-14, rtol=1e-15)
    return math.exp(log_x) * k_B * T / (hbar * w_max)


# ---------------------------------------------------------------------------
# sweeps


SOURCES = ("exact", "vqe-noiseless", "vqe-unmitigated", "vqe-mitigated")


@dataclass(frozen=True)
class StructuralEstimate:
    """Squared splitting element from one source, with its spread over repeats."""

    value: float
    std: float = 0.0
    source: str = "exact"

    def __post_init__(self) -> None:
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}; expected one of {SOURCES}")
        if self.value < 0 or self.std < 0:
            raise ValueError("structural element and its std must be non-negative")


@dataclass
class ThermalConfig:
    temperatures: tuple[float, ...] = (100.0, 150.0, 200.0, 250.0, 300.0)
    group_velocity: float = DEFAULT_GROUP_VELOCITY
    volume: float = 1.0
    frequency_scale: float | None = None
    anchor_T: float = ANCHOR_T
    anchor_kappa: float = REFERENCE_KAPPA_100K
    anchor_heat: float = REFERENCE_CV_100K

    def __post_init__(self) -> None:
        self.temperatures = tuple(float(t) for t in self.temperatures)
        if not self.temperatures or min(self.temperatures) <= 0:
            raise ValueError("temperatures must be positive")
        if self.group_velocity <= 0 or self.volume <= 0:
            raise ValueError("group velocity and volume must be positive")
        if self.frequency_scale is not None and self.frequency_scale <= 0:
            raise ValueError("frequency_scale must be positive")


@dataclass(frozen=True)
class ThermalPoint:
    T: float
    occupations: tuple[float, float, float]
    specific_heat: float
    gamma: float
    tau: float
    kappa: float
    kappa_std: float = 0.0
    source: str = "exact"


@dataclass(frozen=True)
class Calibration:
    frequency_scale: float
    normalization: float
    channel: tuple[int, int, int] = field(default=(0, 1, 2))


def splitting_channel(frequencies: Sequence[float]) -> tuple[int, int, int]:
    """(decaying mode, product, product) for the first energy-conserving split."""
    n = len(frequencies)
    # distinct product modes first, then a single mode taking both phonons
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)] + [(i, i) for i in range(n)]
    for lam in sorted(range(n), key=lambda m: -frequencies[m]):
        for i, j in pairs:
            if lam in (i, j):
                continue
            if abs(frequencies[lam] - frequencies[i] - frequencies[j]) < 1e-9:
                return (lam, i, j)
    raise ValueError("no energy-conserving one-to-two splitting among the modes")


def _raw_point(
    frequencies: Sequence[float], T: float, scale: float, channel: tuple[int, int, int], element: float
) -> tuple[tuple[float, float, float], float, float]:
    occ = tuple(occupation(frequencies[m], T, scale) for m in channel)
    heat = total_specific_heat(frequencies, T, scale)
    return occ, heat, gamma(occ, element)


def calibrate(
    config: ThermalConfig,
    frequencies: Sequence[float],
    exact_element: float,
) -> Calibration:
    """Fix the frequency scale (from the anchor heat) and the kappa normalization.

    The normalization is computed once from the exact structural element and
    then shared by every source, so sources differ only through their element.
    """
    scale = config.frequency_scale or calibrate_frequency_scale(frequencies, config.anchor_heat, config.anchor_T)
    channel = splitting_channel(frequencies)
    _, heat, rate = _raw_point(frequencies, config.anchor_T, scale, channel, exact_element)
    if rate == 0:
        raise ValueError("the exact structural element vanishes for the splitting channel; kappa is undefined")
    raw = kappa(config.group_velocity, heat, lifetime(rate), config.volume)
    return Calibration(scale, config.anchor_kappa / raw, channel)


def sweep(
    config: ThermalConfig,
    frequencies: Sequence[float],
    estimate: StructuralEstimate,
    calibration: Calibration,
) -> list[ThermalPoint]:
    """One thermal point per temperature; kappa_std propagates the element spread."""
    points = []
    for T in config.temperatures:
        occ, heat, rate = _raw_point(frequencies, T, calibration.frequency_scale, calibration.channel, estimate.value)
        tau = lifetime(rate)
        k = calibration.normalization * kappa(config.group_velocity, heat, tau, config.volume)
        # kappa ~ 1/element, so relative spreads carry over
        k_std = k * estimate.std / estimate.value if estimate.value else 0.0
        points.append(ThermalPoint(T, occ, heat, rate, tau, k, k_std, estimate.source))
    return points


def element_from_energy(exact_element: float, energy: float, exact_energy: float) -> float:
    """Rescale the exact element by the squared ratio of estimated to exact ground energy.

    In the toy model the ground energy is linear in the cubic coupling, so an
    estimator that recovers a fraction r of the energy recovers r of the
    coupling amplitude and r**2 of the squared element.
    """
    if exact_energy == 0:
        raise ValueError("exact energy must be nonzero")
    return exact_element * (energy / exact_energy) ** 2


CSV_HEADER = "T,c_v,gamma,tau,kappa,kappa_std,source"


def points_to_csv(points: Sequence[ThermalPoint]) -> str:
    lines = [CSV_HEADER]
    for p in points:
        lines.append(
            f"{p.T:.6g},{p.specific_heat:.10e},{p.gamma:.10e},{p.tau:.10e},{p.kappa:.10e},{p.kappa_std:.10e},{p.source}"
        )
    return "\n".join(lines) + "\n"


def rmse(a: Sequence[float], b: Sequence[float]) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.sqrt(np.mean((a - b) ** 2)))
