"""
Local radial trap depth along a chain
=====================================

Each ion sits at a different point along the beam and feels a different
amount of radial defocusing from its neighbours. The radial barrier that
holds it is therefore ion dependent.
"""

# %%
import numpy as np

from odtcrystal.core import joule_to_mk, khz_to_rad, preset_beam
from odtcrystal.crystal import equilibrium_positions
from odtcrystal.potential import ElectrostaticConfig
from odtcrystal.trapdepth import depth_profile

omega_z = khz_to_rad(25.0)
config = ElectrostaticConfig.from_axial(omega_z)
beam = preset_beam("vis", 8.0)

# %%
# Five ions: the outer ones sit where the beam is weakest and end up with
# the shallowest wells, even though the centre ion is defocused most.
profile = depth_profile(beam, config, equilibrium_positions(5, omega_z))
for rec in profile.ions:
    print(f"ion {rec.ion_index + 1}: z = {rec.z * 1e6:7.2f} um, "
          f"defocus = {rec.defocus_curvature:.3e} s^-2, depth = {joule_to_mk(rec.depth):.2f} mK")
print("weakest ions:", profile.argmin + 1)

# %%
# The weakest depth as a function of ion number and power.
for n in (1, 2, 3, 5, 7):
    eq = equilibrium_positions(n, omega_z)
    mins = [joule_to_mk(depth_profile(beam.with_power(p), config, eq).min_depth) for p in (2.0, 5.0, 9.5)]
    print(n, np.round(mins, 2))

# %%
# A stray radial field tilts the potential and lowers one barrier.
eq3 = equilibrium_positions(3, omega_z)
for field in (0.0, 0.05, 0.2):
    d = depth_profile(beam, config, eq3, stray_field_x=field).depths
    print(f"E_x = {field} V/m:", np.round(joule_to_mk(d), 2))
