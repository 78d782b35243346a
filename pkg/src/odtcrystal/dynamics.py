"""Driven axial motion of one or two ions and normal-mode spectrometry.

The centre-of-mass and stretch coordinates of a two-ion crystal decouple:

    com:      z''  = -omega_z^2 z + (qE/m) sin(omega_mod t)
    stretch:  s''  = -omega_z^2 s + C / s^2 + (qE/m) sin(omega_mod t)

with ``s`` the half-separation and ``C = q^2 / (16 pi eps0 m)``. The Coulomb
term pushes the ions apart, so ``s(0) = (C / omega_z^2)**(1/3)`` is the rest
state and small oscillations about it run at sqrt(3) omega_z. There is no
damping.

Integration is a fixed-step symplectic Strang splitting: half kick, linear
flow, half kick. The linear flow is the trap itself for the com mode and the
sqrt(3) omega_z oscillator about the equilibrium separation for the stretch
mode; it is solved exactly, with the drive folded in through two-point
Gauss-Legendre quadrature of the variation-of-constants integral. Kicks
carry only the nonlinear remainder of the Coulomb force. This is velocity
Verlet with the harmonic part solved exactly, which removes the
O((omega dt)^2) phase drift plain Verlet accumulates over thousands of
periods and keeps the rest state an exact fixed point. Plain Verlet remains
available as ``integrator="verlet"``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .core import BA138, CONSTANTS, GaussianBeam, IonSpecies
from .potential import ElectrostaticConfig
from .trapdepth import chain_depths

__all__ = [
    "DriveConfig",
    "Trajectory",
    "DriveScan",
    "stretch_equilibrium",
    "simulate",
    "simulate_com",
    "simulate_stretch",
    "response_amplitude",
    "frequency_scan",
    "loss_indicator",
    "stretch_energy",
    "timestep_convergence",
]

MODE_KINDS = ("com", "stretch")
INTEGRATORS = ("split", "verlet")


def _stretch_coupling(species):
    return species.coulomb_coupling / (4.0 * species.mass)


def stretch_equilibrium(omega_z: float, species: IonSpecies = BA138) -> float:
    """Half-separation of two ions at rest in a harmonic well."""
    return (_stretch_coupling(species) / omega_z**2) ** (1.0 / 3.0)


@dataclass(frozen=True)
class DriveConfig:
    """One drive experiment.

    ``initial_stretch`` is the half-separation of the pair; ``None`` means the
    two-ion equilibrium. For a single ion driven in the COM mode pass 0.
    """

    field_amplitude: float
    mode_kind: str
    omega_mod: float
    omega_z: float
    duration: float = 10e-3
    timestep: float = 1e-6
    initial_stretch: float | None = None
    species: IonSpecies = BA138
    integrator: str = "split"

    def __post_init__(self):
        if self.mode_kind not in MODE_KINDS:
            raise ValueError(f"mode_kind must be one of {MODE_KINDS}")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if not self.timestep > 0:
            raise ValueError("timestep must be positive")
        if self.duration < 100 * self.timestep * (1 - 1e-12):
            raise ValueError("duration must cover at least 100 timesteps")
        if self.field_amplitude < 0:
            raise ValueError("field amplitude must be non-negative")
        if not self.omega_z > 0:
            raise ValueError("omega_z must be positive")
        if self.initial_stretch is None:
            object.__setattr__(self, "initial_stretch", stretch_equilibrium(self.omega_z, self.species))
        if self.mode_kind == "stretch" and not self.initial_stretch > 0:
            raise ValueError("stretch drive needs a positive initial half-separation")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.timestep))

    def replace(self, **changes) -> "DriveConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Uniformly sampled coordinate: z_COM for the com mode, s for stretch.

    An aborted trajectory (ions collided or the state diverged) is cut at
    the last finite sample.
    """

    times: np.ndarray
    values: np.ndarray
    velocities: np.ndarray
    mode_kind: str
    half_separation: float
    aborted: bool = False

    def ion_positions(self) -> np.ndarray:
        """Axial positions of the ions over time, shape (n_samples, n_ions)."""
        if self.mode_kind == "stretch":
            return np.stack([-self.values, self.values], axis=-1)
        if self.half_separation > 0:
            return np.stack([self.values - self.half_separation, self.values + self.half_separation], axis=-1)
        return self.values[:, None]

    def rows(self):
        header = ("t_us", "value_um", "velocity_m_s")
        return header, list(zip(self.times * 1e6, self.values * 1e6, self.velocities))


@dataclass(frozen=True, eq=False)
class DriveScan:
    omega_grid: np.ndarray
    amplitudes: np.ndarray
    loss_flags: np.ndarray

    @property
    def peak_omega(self) -> float:
        return float(self.omega_grid[np.argmax(self.amplitudes)])

    def rows(self):
        header = ("omega_mod_kHz", "amplitude_um", "loss_flag")
        return header, [
            (w / (2 * np.pi) / 1e3, a * 1e6, int(f))
            for w, a, f in zip(self.omega_grid, self.amplitudes, self.loss_flags)
        ]


def _integrate(cfg: DriveConfig, omega_mod, x0, v0):
    """Integrate a batch of drive frequencies at once.

    Returns positions and velocities of shape (batch, n_steps + 1) with NaN
    after an abort, plus the boolean abort mask.
    """
    omega_mod = np.atleast_1d(np.asarray(omega_mod, dtype=float))
    dt, n, wz = cfg.timestep, cfg.n_steps, cfg.omega_z
    drive = cfg.species.charge * cfg.field_amplitude / cfg.species.mass
    stretch = cfg.mode_kind == "stretch"
    coupling = _stretch_coupling(cfg.species)
    split = cfg.integrator == "split"

    if stretch:
        omega_lin, centre = np.sqrt(3.0) * wz, stretch_equilibrium(wz, cfg.species)
    else:
        omega_lin, centre = wz, 0.0

    def accel(x, t):
        a = -wz**2 * x
        if stretch:
            a = a + coupling / x**2
        if split:
            a = a + omega_lin**2 * (x - centre)  # handled by the linear flow
        else:
            a = a + drive * np.sin(omega_mod * t)
        return a

    xs = np.full((omega_mod.size, n + 1), np.nan)
    vs = np.full_like(xs, np.nan)
    x = np.full(omega_mod.size, float(x0))
    v = np.full(omega_mod.size, float(v0))
    xs[:, 0], vs[:, 0] = x, v
    alive = np.ones(omega_mod.size, dtype=bool)
    cos_r, sin_r = np.cos(omega_lin * dt), np.sin(omega_lin * dt)
    # Gauss-Legendre nodes for the drive integral over one step
    nodes = 0.5 * dt * (1.0 + np.array([-1.0, 1.0]) / np.sqrt(3.0))
    gx = 0.5 * dt * drive * np.sin(omega_lin * (dt - nodes)) / omega_lin
    gv = 0.5 * dt * drive * np.cos(omega_lin * (dt - nodes))
    a = accel(x, 0.0)
    for k in range(n):
        t = k * dt
        v = v + 0.5 * dt * a
        if split:
            y = x - centre
            f = np.sin(omega_mod[:, None] * (t + nodes))
            x = centre + y * cos_r + v * (sin_r / omega_lin) + f @ gx
            v = v * cos_r - y * (omega_lin * sin_r) + f @ gv
        else:
            x = x + dt * v
        ok = np.isfinite(x) & (x > 0) if stretch else np.isfinite(x)
        alive &= ok
        # park dead entries somewhere harmless so the force stays finite
        x = np.where(alive, x, x0 if x0 > 0 else 1.0)
        a = accel(x, t + dt)
        v = v + 0.5 * dt * a
        alive &= np.isfinite(v)
        xs[alive, k + 1] = x[alive]
        vs[alive, k + 1] = v[alive]
    return xs, vs, ~alive


def _trajectory(cfg, xs, vs, aborted):
    times = np.arange(cfg.n_steps + 1) * cfg.timestep
    keep = np.isfinite(xs) & np.isfinite(vs)
    last = len(xs) if keep.all() else int(np.argmin(keep))
    return Trajectory(times[:last], xs[:last], vs[:last], cfg.mode_kind, cfg.initial_stretch, bool(aborted))


def simulate_com(cfg: DriveConfig) -> Trajectory:
    """Driven centre-of-mass motion starting at rest at z = 0."""
    if cfg.mode_kind != "com":
        raise ValueError("simulate_com needs mode_kind='com'")
    xs, vs, ab = _integrate(cfg, cfg.omega_mod, 0.0, 0.0)
    return _trajectory(cfg, xs[0], vs[0], ab[0])


def simulate_stretch(cfg: DriveConfig) -> Trajectory:
    """Driven stretch motion starting at rest at ``cfg.initial_stretch``."""
    if cfg.mode_kind != "stretch":
        raise ValueError("simulate_stretch needs mode_kind='stretch'")
    xs, vs, ab = _integrate(cfg, cfg.omega_mod, cfg.initial_stretch, 0.0)
    return _trajectory(cfg, xs[0], vs[0], ab[0])


def simulate(cfg: DriveConfig) -> Trajectory:
    return simulate_stretch(cfg) if cfg.mode_kind == "stretch" else simulate_com(cfg)


def response_amplitude(traj: Trajectory) -> float:
    """Half the peak-to-peak excursion over the whole record."""
    if traj.values.size == 0:
        return 0.0
    return 0.5 * float(np.max(traj.values) - np.min(traj.values))


def stretch_energy(traj: Trajectory, omega_z: float, species: IonSpecies = BA138) -> np.ndarray:
    """Mechanical energy per unit mass of the undriven stretch coordinate, J/kg."""
    s, v = traj.values, traj.velocities
    return 0.5 * v**2 + 0.5 * omega_z**2 * s**2 + _stretch_coupling(species) / s


def _min_depths(positions, beam, config, species):
    depths = chain_depths(beam, config, positions, species)
    depths = np.where(np.isnan(positions), np.inf, depths)
    return np.min(depths, axis=(-2, -1))


def loss_indicator(
    traj: Trajectory,
    beam: GaussianBeam,
    config: ElectrostaticConfig,
    species: IonSpecies = BA138,
    t_ref: float = 2e-3,
) -> bool:
    """Flag radial loss along a trajectory.

    The local radial depth is evaluated at every sample using the
    instantaneous ion positions; loss is flagged when its minimum drops to
    ``k_B * t_ref`` or below, or when the trajectory aborted.
    """
    if traj.aborted:
        return True
    if traj.values.size == 0:
        return False
    return bool(_min_depths(traj.ion_positions(), beam, config, species) <= CONSTANTS.k_B * t_ref)


def frequency_scan(
    cfg: DriveConfig,
    omega_grid,
    beam: GaussianBeam | None = None,
    config: ElectrostaticConfig | None = None,
    t_ref: float = 2e-3,
) -> DriveScan:
    """Response amplitude at each drive frequency in ``omega_grid``.

    All grid points are integrated together. Aborted points keep the
    amplitude reached before the abort and are loss-flagged; with a ``beam``
    and ``config`` the radial-depth criterion of :func:`loss_indicator` is
    applied as well.
    """
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.ndim != 1 or omega_grid.size == 0 or np.any(np.diff(omega_grid) <= 0):
        raise ValueError("omega_grid must be a non-empty, strictly increasing 1D array")
    x0 = cfg.initial_stretch if cfg.mode_kind == "stretch" else 0.0
    xs, vs, aborted = _integrate(cfg, omega_grid, x0, 0.0)
    amplitudes = 0.5 * (np.nanmax(xs, axis=1) - np.nanmin(xs, axis=1))
    flags = aborted.copy()
    if beam is not None:
        config = config or ElectrostaticConfig.from_axial(cfg.omega_z)
        if cfg.mode_kind == "stretch":
            pos = np.stack([-xs, xs], axis=-1)
        elif cfg.initial_stretch > 0:
            pos = np.stack([xs - cfg.initial_stretch, xs + cfg.initial_stretch], axis=-1)
        else:
            pos = xs[..., None]
        flags |= _min_depths(pos, beam, config, cfg.species) <= CONSTANTS.k_B * t_ref
    return DriveScan(omega_grid, amplitudes, flags)


def timestep_convergence(cfg: DriveConfig) -> float:
    """Largest deviation between runs at dt and dt/2, relative to the amplitude.

    The finer run is compared at the coarse sample times.
    """
    coarse = simulate(cfg)
    fine = simulate(cfg.replace(timestep=cfg.timestep / 2))
    n = min(len(coarse.values), (len(fine.values) + 1) // 2)
    diff = np.max(np.abs(coarse.values[:n] - fine.values[: 2 * n : 2]))
    scale = max(response_amplitude(fine), np.finfo(float).tiny)
    return float(diff / scale)
