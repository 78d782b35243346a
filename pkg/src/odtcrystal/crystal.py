"""Axial structure and normal modes of a linear ion chain.

Equilibria are found in dimensionless units: positions scaled by
``l = (q^2 / (4 pi eps0 m omega_z^2))**(1/3)`` minimize

    V(u) = sum_i u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BA138, CONSTANTS, IonSpecies, SolverError

__all__ = [
    "CrystalEquilibrium",
    "ModeSpectrum",
    "ThermalAmplitude",
    "scale_length",
    "equilibrium_positions",
    "axial_hessian",
    "axial_mode_spectrum",
    "thermal_axial_amplitude",
    "plasma_coupling_1d",
    "crystallization_temperature_1d",
    "configuration_probability",
]

MAX_IONS = 64
MAX_ITER = 1000


@dataclass(frozen=True, eq=False)
class CrystalEquilibrium:
    axial_positions: np.ndarray
    scale_length: float
    omega_z: float
    species: IonSpecies = BA138

    @property
    def n_ions(self) -> int:
        return len(self.axial_positions)

    @property
    def dimensionless(self) -> np.ndarray:
        return self.axial_positions / self.scale_length

    @property
    def length(self) -> float:
        return self.axial_positions[-1] - self.axial_positions[0]


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Axial normal modes; ``eigenvectors[k]`` is the ion pattern of mode k."""

    frequencies: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True, eq=False)
class ThermalAmplitude:
    rms: np.ndarray
    lindemann: np.ndarray

    @property
    def max_lindemann(self) -> float:
        return float(np.max(self.lindemann)) if self.lindemann.size else 0.0


def scale_length(omega_z: float, species: IonSpecies = BA138) -> float:
    return (species.coulomb_coupling / (species.mass * omega_z**2)) ** (1.0 / 3.0)


def _energy(u):
    d = np.abs(u[:, None] - u[None, :])
    iu = np.triu_indices(len(u), k=1)
    return 0.5 * np.sum(u**2) + np.sum(1.0 / d[iu])


def _gradient(u):
    d = u[:, None] - u[None, :]
    np.fill_diagonal(d, np.inf)
    return u - np.sum(np.sign(d) / d**2, axis=1)


def axial_hessian(u) -> np.ndarray:
    """Dimensionless axial Hessian at positions ``u`` (in units of l)."""
    u = np.asarray(u, dtype=float)
    d = np.abs(u[:, None] - u[None, :])
    np.fill_diagonal(d, np.inf)
    off = -2.0 / d**3
    hess = off.copy()
    np.fill_diagonal(hess, 1.0 - off.sum(axis=1))
    return hess


def _solve_dimensionless(n):
    if n == 1:
        return np.zeros(1)
    # spacing of a uniform chain with the right overall length, roughly
    u = np.linspace(-1.0, 1.0, n) * 0.9 * n ** (0.55)
    energy = _energy(u)
    for _ in range(MAX_ITER):
        g = _gradient(u)
        if np.max(np.abs(g)) < 1e-14:
            return u
        step = np.linalg.solve(axial_hessian(u), g)
        if np.max(np.abs(step)) < 1e-15 * np.max(np.abs(u)):
            break
        # halve the step until ordering is kept and the energy does not rise;
        # near convergence energy changes sit at rounding level, hence the slack
        lam = 1.0
        while lam > 1e-12:
            trial = u - lam * step
            if np.all(np.diff(trial) > 0):
                e_trial = _energy(trial)
                if e_trial <= energy + 1e-15 * abs(energy):
                    break
            lam *= 0.5
        else:
            raise SolverError("line search failed in equilibrium solver")
        u, energy = trial, e_trial
    if np.max(np.abs(_gradient(u))) < 1e-12:
        return u
    raise SolverError(f"equilibrium solver did not converge for N={n}")


def equilibrium_positions(n: int, omega_z: float, species: IonSpecies = BA138) -> CrystalEquilibrium:
    """Axial equilibrium of ``n`` ions in a harmonic well of frequency ``omega_z``.

    Positions are ascending and symmetric about zero.
    """
    if not 1 <= n <= MAX_IONS:
        raise ValueError(f"n must be in [1, {MAX_IONS}], got {n}")
    if not omega_z > 0:
        raise ValueError("omega_z must be positive")
    u = _solve_dimensionless(int(n))
    u = 0.5 * (u - u[::-1])  # enforce exact mirror symmetry
    ell = scale_length(omega_z, species)
    return CrystalEquilibrium(u * ell, ell, omega_z, species)


def axial_mode_spectrum(eq: CrystalEquilibrium) -> ModeSpectrum:
    evals, evecs = np.linalg.eigh(axial_hessian(eq.dimensionless))
    vecs = evecs.T.copy()
    # fix the arbitrary sign: largest component positive, ties go to the first ion
    for v in vecs:
        k = np.argmax(np.abs(v) - 1e-9 * np.arange(len(v)))
        if v[k] < 0:
            v *= -1.0
    return ModeSpectrum(eq.omega_z * np.sqrt(evals), vecs)


def thermal_axial_amplitude(eq: CrystalEquilibrium, modes: ModeSpectrum, temperature: float) -> ThermalAmplitude:
    """Equipartition RMS axial displacement per ion and its Lindemann ratio.

    The ratio divides each ion's RMS by the distance to its nearest neighbour.
    """
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    kt = CONSTANTS.k_B * temperature
    weights = kt / (eq.species.mass * modes.frequencies**2)
    rms = np.sqrt(np.sum(weights[:, None] * modes.eigenvectors**2, axis=0))
    z = eq.axial_positions
    if len(z) < 2:
        return ThermalAmplitude(rms, np.zeros(len(z)))
    gaps = np.diff(z)
    nearest = np.minimum(np.r_[np.inf, gaps], np.r_[gaps, np.inf])
    return ThermalAmplitude(rms, rms / nearest)


def plasma_coupling_1d(temperature: float, spacing: float, species: IonSpecies = BA138) -> float:
    """Ratio of nearest-neighbour Coulomb energy to thermal energy."""
    if not temperature > 0 or not spacing > 0:
        raise ValueError("temperature and spacing must be positive")
    return species.coulomb_coupling / (CONSTANTS.k_B * temperature * spacing)


def crystallization_temperature_1d(spacing: float, species: IonSpecies = BA138) -> float:
    """Temperature at which the 1D coupling parameter equals one."""
    return species.coulomb_coupling / (CONSTANTS.k_B * spacing)


def configuration_probability(n_bright: int, n_dark: int) -> float:
    """Chance that a random reshuffle reproduces one bright/dark arrangement."""
    if n_bright < 0 or n_dark < 0 or n_bright + n_dark < 1:
        raise ValueError("need non-negative counts with at least one ion")
    return 1.0 / math.comb(n_bright + n_dark, n_dark)
