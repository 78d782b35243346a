"""Acceptance criteria, one test per criterion.

Each test records a single PASS/FAIL line; the lines are echoed in the
pytest terminal summary and also when this file is run as a script.
"""
import time

import numpy as np
import pytest

from odtcrystal.core import (
    BA138,
    BEAM_PARAMETERS,
    beam_waist_at,
    khz_to_rad,
    optical_depth_at,
    preset_beam,
    rad_to_khz,
    radial_optical_frequency,
    rayleigh_length,
)
from odtcrystal.crystal import (
    axial_mode_spectrum,
    configuration_probability,
    equilibrium_positions,
    thermal_axial_amplitude,
)
from odtcrystal.dynamics import DriveConfig, frequency_scan, response_amplitude, simulate
from odtcrystal.potential import ElectrostaticConfig, IonConfiguration, numerical_hessian, total_energy
from odtcrystal.survival import SurvivalObservation, ensemble_survival, fit_temperature
from odtcrystal.trapdepth import depth_profile, local_trap_depth, radial_barrier

from oracles import com_closed_form, scan_depth

RESULTS = []

OMEGA_2496 = float(khz_to_rad(24.96))
OMEGA_25 = float(khz_to_rad(25.0))


def report(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def test_criterion_1_beam_triangle():
    with Timer() as t:
        checks = []
        for name, expected_khz in (("vis", 315.0), ("nir", 62.0)):
            beam = preset_beam(name)
            z_r = rayleigh_length(beam) * 1e6
            nominal, unc = BEAM_PARAMETERS[name]["rayleigh_um"]
            f_rad = float(rad_to_khz(radial_optical_frequency(beam, BA138)))
            checks.append((name, z_r, abs(z_r - nominal) <= unc, f_rad, abs(f_rad / expected_khz - 1) <= 0.05))
    ok = all(c[2] and c[4] for c in checks) and t.elapsed < 1.0
    detail = "; ".join(f"{n}: z_R={z:.2f} um, w_rad=2pi x {f:.1f} kHz" for n, z, _, f, _ in checks)
    report(1, ok, f"{detail} ({t.elapsed:.3f} s)")


def test_criterion_2_two_ion_distance():
    with Timer() as t:
        sep = equilibrium_positions(2, OMEGA_2496).length * 1e6
    ok = abs(sep / 43.0 - 1) <= 0.02 and t.elapsed < 1.0
    report(2, ok, f"separation {sep:.4f} um vs 43 um +-2% ({t.elapsed:.3f} s)")


def test_criterion_3_mode_ratios():
    axial = ElectrostaticConfig.from_axial(OMEGA_25)
    dark = preset_beam("vis", 0.0)
    with Timer() as t:
        two = axial_mode_spectrum(equilibrium_positions(2, OMEGA_25)).frequencies / OMEGA_25
        err2 = float(np.max(np.abs(two / np.array([1.0, np.sqrt(3.0)]) - 1)))
        eq3 = equilibrium_positions(3, OMEGA_25)
        three = axial_mode_spectrum(eq3).frequencies
        ions = IonConfiguration.on_axis(eq3.axial_positions)
        zz = numerical_hessian(lambda c: total_energy(dark, axial, c), ions)[2::3, 2::3] / BA138.mass
        fd = np.sqrt(np.linalg.eigvalsh(zz))
        err_fd = float(np.max(np.abs(three / fd - 1)))
        err3 = abs(three[2] / OMEGA_25 / np.sqrt(29.0 / 5.0) - 1)
    ok = err2 <= 1e-9 and err_fd <= 1e-6 and err3 <= 1e-9 and t.elapsed < 1.0
    report(3, ok, f"N=2 analytic err {err2:.1e}, N=3 sqrt(29/5) err {err3:.1e}, "
                  f"FD Hessian err {err_fd:.1e} ({t.elapsed:.3f} s)")


def test_criterion_4_depth_vs_scan():
    rng = np.random.default_rng(2024)
    worst, cases, attempts = 0.0, 0, 0
    with Timer() as t:
        while cases < 1000:
            attempts += 1
            beam = preset_beam(str(rng.choice(["vis", "nir"])), float(rng.uniform(0.2, 20.0)))
            n = int(rng.integers(1, 7))
            wz = float(khz_to_rad(rng.uniform(10.0, 60.0)))
            eq = equilibrium_positions(n, wz)
            i = int(rng.integers(n))
            rec = local_trap_depth(beam, ElectrostaticConfig.from_axial(wz), eq, i)
            if rec.depth <= 0:
                continue
            z = eq.axial_positions
            others = np.delete(z, i)
            curv = -wz**2 - BA138.coulomb_coupling / BA138.mass * np.sum(1.0 / np.abs(z[i] - others) ** 3)
            oracle = scan_depth(optical_depth_at(beam, z[i]), beam_waist_at(beam, z[i]), curv, BA138.mass)
            worst = max(worst, abs(rec.depth / oracle - 1))
            cases += 1
        # continuity at the zero-depth boundary m |c| w^2 = 4 U
        jumps = []
        for _ in range(50):
            u, w = rng.uniform(1e-25, 1e-23), rng.uniform(2e-6, 8e-6)
            c_star = -4 * u / (BA138.mass * w**2)
            eps = np.logspace(-2, -8, 7)
            d, _ = radial_barrier(u, w, c_star * (1 - eps), BA138.mass)
            jumps.append(float(np.max(d / (eps**2 * u))))
            # at the threshold r may land one ulp above 1; beyond it the depth is exactly 0
            at, _ = radial_barrier(u, w, c_star, BA138.mass)
            past, _ = radial_barrier(u, w, c_star * (1 + 1e-12), BA138.mass)
            jumps.append(0.0 if at <= 1e-20 * u and past == 0.0 else np.inf)
        continuous = max(jumps) <= 1.0  # depth -> 0 like eps^2 / 2
    ok = worst <= 1e-6 and continuous and t.elapsed < 60.0
    report(4, ok, f"{cases} positive-depth cases ({attempts} drawn), worst rel err {worst:.1e}, "
                  f"boundary continuous={continuous} ({t.elapsed:.1f} s)")


def _stretch_scan(field):
    cfg = DriveConfig(field, "stretch", 0.0, OMEGA_2496, duration=10e-3, timestep=1e-6)
    grid = khz_to_rad(np.round(np.arange(42.0, 45.0 + 1e-9, 0.1), 10))
    with Timer() as t:
        scan = frequency_scan(cfg, grid, preset_beam("nir"), ElectrostaticConfig.from_axial(OMEGA_2496))
    return cfg, scan, t.elapsed


def test_criterion_5_stretch_spectrometry():
    peaks, times = [], []
    for field in (0.3e-3, 1.8e-3, 4.0e-3):
        cfg, scan, elapsed = _stretch_scan(field)
        peaks.append(float(rad_to_khz(scan.peak_omega)))
        times.append(elapsed)
        if field == 1.8e-3:
            lin = np.sqrt(3.0) * OMEGA_2496
            delta = float(khz_to_rad(0.5))
            high = response_amplitude(simulate(cfg.replace(omega_mod=lin + delta)))
            low = response_amplitude(simulate(cfg.replace(omega_mod=lin - delta)))
    in_window = 43.0 <= peaks[1] <= 43.8
    increasing = peaks[0] < peaks[1] < peaks[2]
    ok = in_window and high > low and increasing and max(times) < 60.0
    report(5, ok, f"peaks {peaks[0]:.1f}/{peaks[1]:.1f}/{peaks[2]:.1f} kHz at 0.3/1.8/4.0 mV/m; "
                  f"mirrored amplitudes high {high * 1e6:.3f} um > low {low * 1e6:.3f} um; "
                  f"slowest scan {max(times):.1f} s")


def test_criterion_6_com_closed_form():
    drive = BA138.charge / BA138.mass * 1.8e-3
    errors = {}
    with Timer() as t:
        for f_khz in (12.0, 20.0, 35.0):
            errs = []
            for dt in (1e-6, 0.5e-6):
                cfg = DriveConfig(1.8e-3, "com", float(khz_to_rad(f_khz)), OMEGA_2496, duration=10e-3, timestep=dt)
                traj = simulate(cfg)
                ref = com_closed_form(traj.times, drive, OMEGA_2496, cfg.omega_mod)
                errs.append(float(np.max(np.abs(traj.values - ref)) / np.max(np.abs(ref))))
            errors[f_khz] = errs
    worst = max(e[0] for e in errors.values())
    ratio = min(e[0] / e[1] for e in errors.values())
    ok = worst < 1e-3 and ratio >= 4.0 and t.elapsed < 10.0
    report(6, ok, f"worst rel err {worst:.1e} at 1 us, min reduction at dt/2 {ratio:.1f}x ({t.elapsed:.1f} s)")


def test_criterion_7_temperature_round_trip():
    vis, axial = preset_beam("vis"), ElectrostaticConfig.from_axial(OMEGA_25)
    eq = equilibrium_positions(3, OMEGA_25)
    powers = np.linspace(0.6, 2.0, 8)
    truth = 0.7e-3
    probs = [ensemble_survival(depth_profile(vis.with_power(p), axial, eq), truth) for p in powers]
    hits = 0
    with Timer() as t:
        for seed in range(100):
            rng = np.random.default_rng(seed)
            obs = [SurvivalObservation(float(p), 3, int(rng.binomial(200, q)), 200) for p, q in zip(powers, probs)]
            fit = fit_temperature(obs, vis, axial)
            hits += abs(fit.temperature / truth - 1) <= 0.15
    ok = hits >= 95 and t.elapsed < 120.0
    report(7, ok, f"{hits}/100 fits within 15% of 0.7 mK ({t.elapsed:.1f} s)")


def test_criterion_8_configuration_statistics():
    with Timer() as t:
        p = configuration_probability(3, 1)
        p15 = p**15
    ok = p == 0.25 and f"{p15:.1e}" == "9.3e-10" and t.elapsed < 1.0
    report(8, ok, f"p(3 bright, 1 dark)={p}, p^15={p15:.3e} ({t.elapsed:.3f} s)")


def test_criterion_9_lindemann():
    with Timer() as t:
        eq = equilibrium_positions(5, OMEGA_25)
        amp = thermal_axial_amplitude(eq, axial_mode_spectrum(eq), 2e-3)
    ok = amp.max_lindemann < 0.10 and t.elapsed < 1.0
    report(9, ok, f"max RMS / nearest-neighbour spacing {amp.max_lindemann:.4f} < 0.10 ({t.elapsed:.3f} s)")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
