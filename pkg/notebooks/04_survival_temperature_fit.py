"""
Temperature from survival statistics
====================================

Survival of a chain after the dc confinement is switched off depends on the
local depths and the ion temperature. Scanning the laser power and fitting
the survival fraction recovers the temperature.
"""

# %%
import numpy as np

from odtcrystal.core import khz_to_rad, preset_beam
from odtcrystal.crystal import equilibrium_positions
from odtcrystal.potential import ElectrostaticConfig
from odtcrystal.survival import SurvivalObservation, ensemble_survival, fit_temperature, wilson_interval
from odtcrystal.trapdepth import depth_profile

omega_z = khz_to_rad(25.0)
config = ElectrostaticConfig.from_axial(omega_z)
beam = preset_beam("vis")
eq = equilibrium_positions(3, omega_z)

# %%
# Model survival curves at a few temperatures.
powers = np.linspace(0.6, 2.0, 8)
for t_mk in (0.35, 0.7, 1.4):
    curve = [ensemble_survival(depth_profile(beam.with_power(p), config, eq), t_mk * 1e-3) for p in powers]
    print(f"{t_mk} mK:", np.round(curve, 3))

# %%
# Draw binomial counts at 0.7 mK and fit them back.
rng = np.random.default_rng(1)
truth = 0.7e-3
observations = []
for p in powers:
    q = ensemble_survival(depth_profile(beam.with_power(p), config, eq), truth)
    observations.append(SurvivalObservation(float(p), 3, int(rng.binomial(200, q)), 200))

for obs in observations:
    low, high = wilson_interval(obs.successes, obs.attempts)
    print(f"P = {obs.power:.2f} W: {obs.fraction:.3f} [{low:.3f}, {high:.3f}]")

fit = fit_temperature(observations, beam, config)
print(f"T = {fit.temperature * 1e3:.3f} +- {fit.std_error * 1e3:.3f} mK (truth 0.7 mK)")
