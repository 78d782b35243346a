"""Physical constants, ion species and Gaussian-beam geometry.

All quantities are SI internally. Helpers at the bottom convert the units
people actually type (nm, um, mK, kHz) into SI and back.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy import constants as csts

__all__ = [
    "CONSTANTS",
    "PhysicalConstants",
    "IonSpecies",
    "BA138",
    "GaussianBeam",
    "BEAM_PARAMETERS",
    "preset_beam",
    "rayleigh_length",
    "beam_waist_at",
    "optical_depth_at",
    "radial_optical_frequency",
    "DegenerateConfigurationError",
    "SolverError",
    "FitError",
]


class DegenerateConfigurationError(ValueError):
    """Raised for geometrically impossible input, e.g. two coincident ions."""


class SolverError(RuntimeError):
    """Raised when an iterative solver fails to converge."""


class FitError(RuntimeError):
    """Raised when data cannot identify the fitted parameter."""


@dataclass(frozen=True)
class PhysicalConstants:
    k_B: float = csts.k
    epsilon_0: float = csts.epsilon_0
    e: float = csts.e
    u: float = csts.atomic_mass

    @property
    def coulomb_k(self) -> float:
        """1 / (4 pi eps0)."""
        return 1.0 / (4.0 * np.pi * self.epsilon_0)


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class IonSpecies:
    """A trapped ion, mass in kg and charge in C."""

    mass: float
    charge: float
    name: str = ""

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"ion mass must be positive, got {self.mass!r}")
        if self.charge == 0:
            raise ValueError("ion charge must be nonzero")

    @classmethod
    def from_amu(cls, mass_u: float, charge_e: int = 1, name: str = "") -> "IonSpecies":
        if int(charge_e) != charge_e:
            raise ValueError("charge must be an integer multiple of e")
        return cls(mass=mass_u * CONSTANTS.u, charge=int(charge_e) * CONSTANTS.e, name=name)

    @property
    def coulomb_coupling(self) -> float:
        """q^2 / (4 pi eps0), in J m."""
        return self.charge**2 * CONSTANTS.coulomb_k


BA138 = IonSpecies.from_amu(138, 1, name="138Ba+")


@dataclass(frozen=True)
class GaussianBeam:
    """Circular Gaussian dipole beam focused at the origin, propagating along z.

    Parameters
    ----------
    wavelength : float
        Vacuum wavelength in m.
    waist : float
        1/e^2 intensity radius at the focus, in m.
    power : float
        Laser power in W. Zero is allowed and gives no optical well.
    depth_per_watt : float
        On-axis trap depth at the focus per unit power, J/W.
    stated_rayleigh_length, rayleigh_uncertainty : float, optional
        A measured Rayleigh length and its uncertainty. When given, the
        derived ``pi w^2 / lambda`` must agree within the uncertainty.
    """

    wavelength: float
    waist: float
    power: float
    depth_per_watt: float
    stated_rayleigh_length: float | None = None
    rayleigh_uncertainty: float | None = None
    label: str = ""

    def __post_init__(self):
        for name in ("wavelength", "waist", "depth_per_watt"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")
        if not self.power >= 0:
            raise ValueError(f"power must be non-negative, got {self.power!r}")
        if self.stated_rayleigh_length is not None:
            tol = self.rayleigh_uncertainty or 0.0
            derived = rayleigh_length(self)
            if abs(derived - self.stated_rayleigh_length) > tol:
                raise ValueError(
                    f"derived Rayleigh length {derived * 1e6:.2f} um disagrees with stated "
                    f"{self.stated_rayleigh_length * 1e6:.2f} +- {tol * 1e6:.2f} um"
                )

    @classmethod
    def from_depth(cls, wavelength, waist, power, depth, **kwargs) -> "GaussianBeam":
        """Calibrate ``depth_per_watt`` from one measured (power, depth) pair."""
        return cls(wavelength, waist, power, depth / power, **kwargs)

    def with_power(self, power: float) -> "GaussianBeam":
        return dataclasses.replace(self, power=power)

    @property
    def focal_depth(self) -> float:
        """On-axis depth at the focus, J."""
        return self.depth_per_watt * self.power


# Laser and trap parameters of the two dipole traps (VIS 532 nm, NIR 1064 nm).
# Values are (nominal, uncertainty) in the units given by the key suffix.
# Stark shifts are stored for reference only.
BEAM_PARAMETERS = {
    "vis": {
        "wavelength_nm": 532.0,
        "waist_um": (2.6, 0.2),
        "rayleigh_um": (40.0, 2.0),
        "power_W": 9.5,
        "depth_mK": (110.0, 18.0),
        "omega_rad_khz": (315.0, 25.0),
        "stark_shift_ghz": (2.4, 0.4),
    },
    "nir": {
        "wavelength_nm": 1064.0,
        "waist_um": (5.0, 0.2),
        "rayleigh_um": (74.0, 1.0),
        "power_W": 20.0,
        "depth_mK": (16.0, 1.0),
        "omega_rad_khz": (62.0, 2.0),
        "stark_shift_ghz": (0.33, 0.03),
    },
}


def preset_beam(name: str, power: float | None = None) -> GaussianBeam:
    """Beam for one of the tabulated traps, optionally at a different power.

    The depth calibration is fixed by the tabulated (power, depth) pair, so
    the on-axis depth scales linearly with ``power``.
    """
    try:
        row = BEAM_PARAMETERS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown beam preset {name!r}; choose from {sorted(BEAM_PARAMETERS)}") from None
    depth = mk_to_joule(row["depth_mK"][0])
    return GaussianBeam(
        wavelength=row["wavelength_nm"] * 1e-9,
        waist=row["waist_um"][0] * 1e-6,
        power=row["power_W"] if power is None else power,
        depth_per_watt=depth / row["power_W"],
        stated_rayleigh_length=row["rayleigh_um"][0] * 1e-6,
        rayleigh_uncertainty=row["rayleigh_um"][1] * 1e-6,
        label=name.lower(),
    )


def rayleigh_length(beam: GaussianBeam) -> float:
    return np.pi * beam.waist**2 / beam.wavelength


def beam_waist_at(beam: GaussianBeam, z):
    """1/e^2 radius at axial position ``z`` (scalar or array)."""
    zeta = np.asarray(z) / rayleigh_length(beam)
    return beam.waist * np.sqrt(1.0 + zeta**2)


def optical_depth_at(beam: GaussianBeam, z):
    """On-axis well depth (a non-negative magnitude) at axial position ``z``."""
    zeta = np.asarray(z) / rayleigh_length(beam)
    return beam.focal_depth / (1.0 + zeta**2)


def radial_optical_frequency(beam: GaussianBeam, species: IonSpecies = BA138) -> float:
    """Harmonic radial frequency at the focus, rad/s, ignoring electrostatics."""
    return np.sqrt(4.0 * beam.focal_depth / (species.mass * beam.waist**2))


# -- unit helpers


def mk_to_joule(t_mk):
    return np.asarray(t_mk) * 1e-3 * CONSTANTS.k_B


def joule_to_mk(energy):
    return np.asarray(energy) / CONSTANTS.k_B * 1e3


def khz_to_rad(f_khz):
    return 2.0 * np.pi * np.asarray(f_khz) * 1e3


def rad_to_khz(omega):
    return np.asarray(omega) / (2.0 * np.pi) / 1e3
