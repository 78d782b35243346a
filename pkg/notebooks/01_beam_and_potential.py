"""
Gaussian beams and the combined trapping potential
==================================================

Two dipole-trap beams are tabulated as presets. Here we check their
geometry, then look at a single ion in the combined dc plus optical field.
"""

# %%
# Each preset carries its waist and wavelength plus the depth per watt. The Rayleigh
# length and the radial optical frequency follow from those alone.
import numpy as np

from odtcrystal.core import (
    beam_waist_at,
    joule_to_mk,
    khz_to_rad,
    optical_depth_at,
    preset_beam,
    rad_to_khz,
    radial_optical_frequency,
    rayleigh_length,
)
from odtcrystal.potential import ElectrostaticConfig, IonConfiguration, numerical_hessian, total_energy, total_hessian

for name in ("vis", "nir"):
    beam = preset_beam(name)
    print(
        f"{name}: P = {beam.power:.1f} W, U0 = {joule_to_mk(beam.focal_depth):.1f} mK, "
        f"z_R = {rayleigh_length(beam) * 1e6:.1f} um, "
        f"omega_rad = 2pi x {rad_to_khz(radial_optical_frequency(beam)):.1f} kHz"
    )

# %%
# Away from the focus the beam widens and the well gets shallower.
vis = preset_beam("vis", 8.0)
for z_um in (0.0, 20.0, 40.0, 60.0):
    z = z_um * 1e-6
    print(f"z = {z_um:4.0f} um: w = {beam_waist_at(vis, z) * 1e6:.2f} um, "
          f"U = {joule_to_mk(optical_depth_at(vis, z)):.1f} mK")

# %%
# The dc field confines axially and defocuses radially. Adding the beam on
# top of it turns the radial curvature positive again.
config = ElectrostaticConfig.from_axial(khz_to_rad(25.0))
ion = IonConfiguration(np.zeros((1, 3)))
analytic = total_hessian(vis, config, ion)
numeric = numerical_hessian(lambda c: total_energy(vis, config, c), ion)
print("diagonal curvature (J/m^2):", np.diag(analytic))
print("max relative deviation from finite differences:",
      np.max(np.abs(analytic - numeric)) / np.max(np.abs(analytic)))
