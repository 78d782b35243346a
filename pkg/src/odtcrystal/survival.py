"""Survival probabilities in a finite-depth trap and temperature inference.

A thermal particle stays trapped with probability

    p(xi) = 1 - exp(-2 xi) - 2 xi exp(-xi),    xi = depth / (k_B T),

and a chain survives only if every ion does, so the ensemble probability is
the product over ions of their local depths.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .core import BA138, CONSTANTS, FitError, GaussianBeam, IonSpecies
from .crystal import equilibrium_positions
from .potential import ElectrostaticConfig
from .trapdepth import DepthProfile, depth_profile

__all__ = [
    "SurvivalObservation",
    "TemperatureFit",
    "capture_probability",
    "ensemble_survival",
    "wilson_interval",
    "fit_temperature",
    "T_MIN",
    "T_MAX",
]

T_MIN = 1e-5  # K
T_MAX = 1.0  # K


@dataclass(frozen=True)
class SurvivalObservation:
    power: float
    n_ions: int
    successes: int
    attempts: int

    def __post_init__(self):
        if self.attempts < 1:
            raise ValueError("attempts must be at least 1")
        if not 0 <= self.successes <= self.attempts:
            raise ValueError("successes must lie in [0, attempts]")
        if self.n_ions < 1:
            raise ValueError("n_ions must be at least 1")
        if self.power < 0:
            raise ValueError("power must be non-negative")

    @property
    def fraction(self) -> float:
        return self.successes / self.attempts


@dataclass(frozen=True)
class TemperatureFit:
    temperature: float
    std_error: float
    residual: float
    n_points: int

    def as_dict(self) -> dict:
        return {
            "temperature_K": self.temperature,
            "std_error_K": self.std_error,
            "residual": self.residual,
            "n_points": self.n_points,
        }


def capture_probability(xi):
    xi = np.asarray(xi, dtype=float)
    if np.any(xi < 0):
        raise ValueError("xi must be non-negative")
    with np.errstate(over="ignore", invalid="ignore"):
        p = -np.expm1(-2.0 * xi) - 2.0 * xi * np.exp(-xi)
    p = np.where(np.isinf(xi), 1.0, p)
    return np.clip(p, 0.0, 1.0)


def ensemble_survival(profile: DepthProfile, temperature: float) -> float:
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    xi = profile.depths / (CONSTANTS.k_B * temperature)
    return float(np.prod(capture_probability(xi)))


def wilson_interval(successes: int, attempts: int, confidence_z: float = 1.0):
    """Wilson score interval for a binomial proportion, returned as (low, high)."""
    if attempts < 1 or not 0 <= successes <= attempts:
        raise ValueError("need 0 <= successes <= attempts and attempts >= 1")
    if not confidence_z > 0:
        raise ValueError("confidence_z must be positive")
    n, z2 = attempts, confidence_z**2
    p = successes / n
    denom = 1.0 + z2 / n
    centre = (p + z2 / (2 * n)) / denom
    half = confidence_z * np.sqrt(p * (1 - p) / n + z2 / (4 * n**2)) / denom
    low, high = max(0.0, centre - half), min(1.0, centre + half)
    # the bounds touch 0 or 1 exactly at the boundaries; rounding may miss it
    if successes == 0:
        low = 0.0
    if successes == attempts:
        high = 1.0
    return low, high


def _depth_matrix(observations, beam, config, omega_z, species):
    n_ions = observations[0].n_ions
    eq = equilibrium_positions(n_ions, omega_z, species)
    cache = {}
    rows = []
    for obs in observations:
        if obs.power not in cache:
            cache[obs.power] = depth_profile(beam.with_power(obs.power), config, eq).depths
        rows.append(cache[obs.power])
    return np.array(rows)


def fit_temperature(
    observations,
    beam: GaussianBeam,
    config: ElectrostaticConfig,
    omega_z: float | None = None,
    species: IonSpecies = BA138,
    confidence_z: float = 1.0,
) -> TemperatureFit:
    """Weighted least-squares temperature from survival data at several powers.

    Each observation's depth profile is rebuilt with ``beam`` at the observed
    power. Residuals are weighted by the inverse half-width of their Wilson
    interval. The optimum over log T is located on a coarse grid and refined
    with golden-section search; the standard error comes from the curvature
    of the chi-square at the optimum.

    Raises
    ------
    FitError
        If every observation is all-success or all-failure, or the optimum
        sits on the edge of the search range.
    """
    observations = sorted(observations, key=lambda o: (o.power, o.successes, o.attempts))
    if len(observations) < 3:
        raise ValueError("need at least 3 observations")
    if len({o.power for o in observations}) < 2:
        raise ValueError("need at least 2 distinct powers")
    if len({o.n_ions for o in observations}) != 1:
        raise ValueError("all observations must share the same ion number")
    frac = np.array([o.fraction for o in observations])
    if np.all(frac == 0.0) or np.all(frac == 1.0):
        raise FitError("temperature is unidentifiable: all outcomes identical")

    omega_z = config.omega_z if omega_z is None else omega_z
    depths = _depth_matrix(observations, beam, config, omega_z, species)
    intervals = np.array([wilson_interval(o.successes, o.attempts, confidence_z) for o in observations])
    weights = 1.0 / (0.5 * (intervals[:, 1] - intervals[:, 0])) ** 2

    def chi2(temperature):
        xi = depths / (CONSTANTS.k_B * temperature)
        model = np.prod(capture_probability(xi), axis=1)
        return float(np.sum(weights * (frac - model) ** 2))

    def objective(log_t):
        return chi2(np.exp(log_t))

    grid = np.linspace(np.log(T_MIN), np.log(T_MAX), 121)
    values = np.array([objective(g) for g in grid])
    k = int(np.argmin(values))
    if k == 0 or k == len(grid) - 1:
        raise FitError("temperature optimum lies on the edge of the search range")
    try:
        res = minimize_scalar(objective, bracket=(grid[k - 1], grid[k], grid[k + 1]),
                              method="golden", options={"xtol": 1e-10})
    except ValueError:  # flat neighbourhood, not a strict bracket
        res = minimize_scalar(objective, bounds=(grid[k - 1], grid[k + 1]), method="bounded")
    t_best = float(np.exp(res.x))
    best = chi2(t_best)

    h = 1e-3 * t_best
    curvature = (chi2(t_best + h) - 2.0 * best + chi2(t_best - h)) / h**2
    std = float(np.sqrt(2.0 / curvature)) if curvature > 0 else float("inf")
    return TemperatureFit(t_best, std, best, len(observations))
