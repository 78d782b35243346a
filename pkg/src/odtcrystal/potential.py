"""Potential energy of N ions in the combined dc and optical trap, with mutual Coulomb repulsion.

Positions are an ``(N, 3)`` array in m. Gradients come back with the same
shape, Hessians as ``(3N, 3N)`` matrices ordered ``x0, y0, z0, x1, ...``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    BA138,
    DegenerateConfigurationError,
    GaussianBeam,
    IonSpecies,
    beam_waist_at,
    optical_depth_at,
    rayleigh_length,
)

__all__ = [
    "ElectrostaticConfig",
    "IonConfiguration",
    "electrostatic_energy",
    "coulomb_energy",
    "optical_energy",
    "total_energy",
    "total_gradient",
    "total_hessian",
    "numerical_gradient",
    "numerical_hessian",
    "FD_STEP",
]

FD_STEP = 1e-9  # m


@dataclass(frozen=True)
class ElectrostaticConfig:
    """Mass-normalized dc quadrupole curvatures, (rad/s)^2, signed.

    ``uniform_field`` is an optional residual stray field in V/m; it is zero
    by default since strays are assumed compensated.
    """

    curvature_x: float
    curvature_y: float
    curvature_z: float
    uniform_field: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if not self.curvature_z > 0:
            raise ValueError("curvature_z must be positive (axial confinement)")
        trace = self.curvature_x + self.curvature_y + self.curvature_z
        if abs(trace) > 1e-9 * self.curvature_z:
            raise ValueError(f"curvatures violate the Laplace constraint (trace {trace:.3e})")
        if len(self.uniform_field) != 3:
            raise ValueError("uniform_field must be a 3-vector")

    @classmethod
    def from_axial(cls, omega_z: float, y_share: float = 0.0, uniform_field=(0.0, 0.0, 0.0)):
        """Axial confinement ``omega_z`` with radial defocusing split between x and y.

        ``y_share`` is the fraction of the defocusing placed on y; the default
        puts all of it on x.
        """
        wz2 = omega_z**2
        return cls(-(1.0 - y_share) * wz2, -y_share * wz2, wz2, tuple(uniform_field))

    @property
    def omega_z(self) -> float:
        return np.sqrt(self.curvature_z)

    @property
    def curvatures(self) -> np.ndarray:
        return np.array([self.curvature_x, self.curvature_y, self.curvature_z])


@dataclass(frozen=True, eq=False)
class IonConfiguration:
    positions: np.ndarray
    species: IonSpecies = field(default=BA138)

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3 or pos.shape[0] < 1:
            raise ValueError("positions must have shape (N, 3) with N >= 1")
        object.__setattr__(self, "positions", pos)
        if len(pos) > 1 and np.min(_pair_distances(pos)) == 0.0:
            raise DegenerateConfigurationError("two ions occupy the same position")

    @classmethod
    def on_axis(cls, z, species: IonSpecies = BA138):
        z = np.atleast_1d(np.asarray(z, dtype=float))
        pos = np.zeros((len(z), 3))
        pos[:, 2] = z
        return cls(pos, species)

    @property
    def n_ions(self) -> int:
        return len(self.positions)


def _pair_distances(pos):
    i, j = np.triu_indices(len(pos), k=1)
    return np.linalg.norm(pos[i] - pos[j], axis=1)


def electrostatic_energy(config: ElectrostaticConfig, ions: IonConfiguration) -> float:
    m = ions.species.mass
    r2 = ions.positions**2
    quad = 0.5 * m * np.sum(r2 @ config.curvatures)
    linear = -ions.species.charge * np.sum(ions.positions @ np.asarray(config.uniform_field))
    return quad + linear


def coulomb_energy(ions: IonConfiguration) -> float:
    if ions.n_ions < 2:
        return 0.0
    return ions.species.coulomb_coupling * np.sum(1.0 / _pair_distances(ions.positions))


def optical_energy(beam: GaussianBeam, ions: IonConfiguration) -> float:
    """Sum of the (negative) dipole potentials felt by each ion."""
    x, y, z = ions.positions.T
    w = beam_waist_at(beam, z)
    return -np.sum(optical_depth_at(beam, z) * np.exp(-2.0 * (x**2 + y**2) / w**2))


def total_energy(beam: GaussianBeam, config: ElectrostaticConfig, ions: IonConfiguration) -> float:
    return optical_energy(beam, ions) + electrostatic_energy(config, ions) + coulomb_energy(ions)


# -- analytic derivatives


def _optical_derivatives(beam, pos):
    """Per-ion optical gradient (N, 3) and Hessian blocks (N, 3, 3).

    U = -D0 exp(phi) with phi = -ln s - a rho^2 / s, s = 1 + (z/zR)^2, a = 2/w0^2.
    """
    zr = rayleigh_length(beam)
    a = 2.0 / beam.waist**2
    x, y, z = pos.T
    rho2 = x**2 + y**2
    s = 1.0 + (z / zr) ** 2
    ds = 2.0 * z / zr**2
    d2s = 2.0 / zr**2
    u = -beam.focal_depth * np.exp(-np.log(s) - a * rho2 / s)

    phi = np.empty((len(pos), 3))
    phi[:, 0] = -2.0 * a * x / s
    phi[:, 1] = -2.0 * a * y / s
    phi[:, 2] = -ds / s + a * rho2 * ds / s**2

    hphi = np.zeros((len(pos), 3, 3))
    hphi[:, 0, 0] = -2.0 * a / s
    hphi[:, 1, 1] = -2.0 * a / s
    hphi[:, 0, 2] = hphi[:, 2, 0] = 2.0 * a * x * ds / s**2
    hphi[:, 1, 2] = hphi[:, 2, 1] = 2.0 * a * y * ds / s**2
    hphi[:, 2, 2] = -d2s / s + ds**2 / s**2 + a * rho2 * (d2s / s**2 - 2.0 * ds**2 / s**3)

    grad = u[:, None] * phi
    hess = u[:, None, None] * (hphi + phi[:, :, None] * phi[:, None, :])
    return grad, hess


def _coulomb_derivatives(ions):
    pos = ions.positions
    n = len(pos)
    grad = np.zeros((n, 3))
    hess = np.zeros((3 * n, 3 * n))
    if n < 2:
        return grad, hess
    k = ions.species.coulomb_coupling
    eye = np.eye(3)
    for i in range(n):
        for j in range(i + 1, n):
            d = pos[i] - pos[j]
            r = np.linalg.norm(d)
            if r == 0.0:
                raise DegenerateConfigurationError("two ions occupy the same position")
            g = -k * d / r**3
            grad[i] += g
            grad[j] -= g
            block = k * (3.0 * np.outer(d, d) / r**5 - eye / r**3)
            si, sj = slice(3 * i, 3 * i + 3), slice(3 * j, 3 * j + 3)
            hess[si, si] += block
            hess[sj, sj] += block
            hess[si, sj] -= block
            hess[sj, si] -= block
    return grad, hess


def total_gradient(beam, config, ions) -> np.ndarray:
    """Analytic gradient of :func:`total_energy`, shape (N, 3), J/m."""
    m, q = ions.species.mass, ions.species.charge
    g_opt, _ = _optical_derivatives(beam, ions.positions)
    g_el = m * ions.positions * config.curvatures - q * np.asarray(config.uniform_field)
    g_coul, _ = _coulomb_derivatives(ions)
    return g_opt + g_el + g_coul


def total_hessian(beam, config, ions) -> np.ndarray:
    """Analytic Hessian of :func:`total_energy`, shape (3N, 3N), J/m^2."""
    n = ions.n_ions
    _, h_opt = _optical_derivatives(beam, ions.positions)
    _, hess = _coulomb_derivatives(ions)
    h_el = ions.species.mass * np.diag(config.curvatures)
    for i in range(n):
        sl = slice(3 * i, 3 * i + 3)
        hess[sl, sl] += h_opt[i] + h_el
    return hess


# -- finite-difference fallbacks


def _shifted(ions, flat_index, delta):
    pos = ions.positions.copy().reshape(-1)
    pos[flat_index] += delta
    return IonConfiguration(pos.reshape(-1, 3), ions.species)


def numerical_gradient(energy, ions, step=FD_STEP) -> np.ndarray:
    """Central-difference gradient of ``energy(ions)``."""
    g = np.empty(3 * ions.n_ions)
    for k in range(g.size):
        g[k] = (energy(_shifted(ions, k, step)) - energy(_shifted(ions, k, -step))) / (2 * step)
    return g.reshape(-1, 3)


def numerical_hessian(energy, ions, step=FD_STEP) -> np.ndarray:
    """Central-difference Hessian of ``energy(ions)``, symmetrized."""
    n = 3 * ions.n_ions
    h = np.empty((n, n))
    for k in range(n):
        gp = numerical_gradient(energy, _shifted(ions, k, step), step).reshape(-1)
        gm = numerical_gradient(energy, _shifted(ions, k, -step), step).reshape(-1)
        h[k] = (gp - gm) / (2 * step)
    return 0.5 * (h + h.T)
