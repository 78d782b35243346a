"""Ion Coulomb crystals in a single-beam optical dipole trap.

See the submodules for the individual building blocks; the ``odtcrystal``
command exposes the main calculations on the command line.
"""

__version__ = "0.1.0"

from .core import (
    BA138,
    CONSTANTS,
    DegenerateConfigurationError,
    FitError,
    GaussianBeam,
    IonSpecies,
    SolverError,
    beam_waist_at,
    optical_depth_at,
    preset_beam,
    radial_optical_frequency,
    rayleigh_length,
)
from .crystal import (
    CrystalEquilibrium,
    ModeSpectrum,
    axial_mode_spectrum,
    configuration_probability,
    equilibrium_positions,
    plasma_coupling_1d,
    thermal_axial_amplitude,
)
from .dynamics import DriveConfig, DriveScan, Trajectory, frequency_scan, loss_indicator, response_amplitude, simulate
from .potential import ElectrostaticConfig, IonConfiguration, total_energy, total_gradient, total_hessian
from .survival import SurvivalObservation, TemperatureFit, capture_probability, ensemble_survival, fit_temperature, wilson_interval
from .trapdepth import DepthProfile, depth_profile, local_trap_depth
