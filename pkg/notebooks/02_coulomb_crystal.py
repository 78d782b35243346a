"""
Linear Coulomb crystals
=======================

How small ion chains arrange themselves in a harmonic axial well, and how
they move once excited.
"""

# %%
import numpy as np

from odtcrystal.core import khz_to_rad
from odtcrystal.crystal import (
    axial_mode_spectrum,
    configuration_probability,
    crystallization_temperature_1d,
    equilibrium_positions,
    plasma_coupling_1d,
    thermal_axial_amplitude,
)

omega_z = khz_to_rad(24.96)

# %%
# Two ions settle about 43 um apart at this axial frequency.
pair = equilibrium_positions(2, omega_z)
print(f"two-ion distance: {pair.length * 1e6:.2f} um")

# %%
# Mode frequencies in units of the axial frequency do not depend on the
# trap strength.
for n in range(1, 6):
    eq = equilibrium_positions(n, omega_z)
    ratios = axial_mode_spectrum(eq).frequencies / omega_z
    print(n, np.round(ratios, 4))

# %%
# Thermal motion of a five-ion chain compared to the ion spacing.
eq5 = equilibrium_positions(5, khz_to_rad(25.0))
modes = axial_mode_spectrum(eq5)
for t_mk in (0.5, 1.0, 2.0):
    amp = thermal_axial_amplitude(eq5, modes, t_mk * 1e-3)
    print(f"T = {t_mk} mK: rms = {np.round(amp.rms * 1e6, 3)} um, max ratio = {amp.max_lindemann:.3f}")

# %%
# One-dimensional plasma coupling at a typical 35 um spacing.
spacing = 35e-6
print(f"Gamma at 0.7 mK: {plasma_coupling_1d(0.7e-3, spacing):.0f}")
print(f"Gamma = 1 at {crystallization_temperature_1d(spacing) * 1e3:.0f} mK")

# %%
# Chance that one random arrangement of 3 bright and 1 dark ion matches a
# given pattern, and that 15 independent loads all do.
p = configuration_probability(3, 1)
print(p, p**15)
