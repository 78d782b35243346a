import numpy as np
import pytest

from odtcrystal.core import BA138, khz_to_rad, preset_beam
from odtcrystal.dynamics import (
    DriveConfig,
    Trajectory,
    frequency_scan,
    loss_indicator,
    response_amplitude,
    simulate,
    simulate_com,
    simulate_stretch,
    stretch_energy,
    stretch_equilibrium,
    timestep_convergence,
)
from odtcrystal.potential import ElectrostaticConfig

from conftest import OMEGA_2496
from oracles import com_closed_form

DRIVE_PER_FIELD = BA138.charge / BA138.mass


def _com(omega_mod, **kw):
    kw.setdefault("duration", 2e-3)
    return DriveConfig(kw.pop("field", 1.8e-3), "com", omega_mod, OMEGA_2496, **kw)


def _stretch(omega_mod, **kw):
    kw.setdefault("duration", 2e-3)
    return DriveConfig(kw.pop("field", 1.8e-3), "stretch", omega_mod, OMEGA_2496, **kw)


def test_stretch_equilibrium_separation():
    assert 2 * stretch_equilibrium(OMEGA_2496) == pytest.approx(43.4215213e-6, rel=1e-8)


def test_drive_config_validation():
    with pytest.raises(ValueError):
        _com(1.0, timestep=0.0)
    with pytest.raises(ValueError):
        _com(1.0, duration=50e-6)
    with pytest.raises(ValueError):
        _com(1.0, field=-1.0)
    with pytest.raises(ValueError):
        DriveConfig(1.0, "axial", 1.0, OMEGA_2496)
    with pytest.raises(ValueError):
        _com(1.0, integrator="rk4")
    with pytest.raises(ValueError):
        _stretch(1.0, initial_stretch=0.0)
    assert _com(1.0).n_steps == 2000
    assert _stretch(1.0).initial_stretch == stretch_equilibrium(OMEGA_2496)


def test_mode_mismatch():
    with pytest.raises(ValueError):
        simulate_com(_stretch(1.0))
    with pytest.raises(ValueError):
        simulate_stretch(_com(1.0))


@pytest.mark.parametrize("f_khz", [12.0, 20.0, 35.0])
def test_com_matches_closed_form(f_khz):
    cfg = _com(khz_to_rad(f_khz))
    traj = simulate_com(cfg)
    ref = com_closed_form(traj.times, DRIVE_PER_FIELD * cfg.field_amplitude, OMEGA_2496, cfg.omega_mod)
    assert np.max(np.abs(traj.values - ref)) / np.max(np.abs(ref)) < 1e-3
    assert traj.times[1] - traj.times[0] == pytest.approx(1e-6)


def test_com_resonant_secular_growth():
    cfg = _com(OMEGA_2496)
    traj = simulate_com(cfg)
    a = DRIVE_PER_FIELD * cfg.field_amplitude
    ref = com_closed_form(traj.times, a, OMEGA_2496, OMEGA_2496)
    assert np.max(np.abs(traj.values - ref)) / np.max(np.abs(ref)) < 1e-3
    assert response_amplitude(traj) == pytest.approx(a / (2 * OMEGA_2496) * cfg.duration, rel=0.02)


def test_zero_field_is_static():
    com = simulate(_com(khz_to_rad(20.0), field=0.0))
    assert np.all(com.values == 0.0) and response_amplitude(com) == 0.0
    st = simulate(_stretch(khz_to_rad(43.0), field=0.0))
    np.testing.assert_allclose(st.values, st.values[0], rtol=1e-13)
    assert not st.aborted


def test_stretch_linear_frequency():
    # free oscillation from a small displacement
    s0 = stretch_equilibrium(OMEGA_2496)
    traj = simulate(_stretch(1.0, field=0.0, initial_stretch=s0 + 10e-9, duration=5e-3))
    y = traj.values - s0
    crossings = np.flatnonzero((y[:-1] < 0) & (y[1:] >= 0))
    t_cross = traj.times[crossings] - y[crossings] * 1e-6 / (y[crossings + 1] - y[crossings])
    period = np.mean(np.diff(t_cross))
    assert 2 * np.pi / period / (np.sqrt(3) * OMEGA_2496) == pytest.approx(1.0, abs=5e-3)


def test_stretch_energy_conserved():
    s0 = stretch_equilibrium(OMEGA_2496)
    traj = simulate(_stretch(1.0, field=0.0, initial_stretch=s0 + 1e-6, duration=10e-3))
    e = stretch_energy(traj, OMEGA_2496)
    slope = np.polyfit(traj.times, e, 1)[0]
    assert abs(slope * 10e-3) / abs(e.mean()) < 1e-6
    windows = e[: len(e) // 10 * 10].reshape(10, -1).mean(axis=1)
    assert np.ptp(windows) / abs(e.mean()) < 1e-6


def test_timestep_convergence_second_order():
    cfg = _com(khz_to_rad(20.0), timestep=2e-6)
    e1 = timestep_convergence(cfg)
    e2 = timestep_convergence(cfg.replace(timestep=1e-6))
    assert e1 / e2 >= 4.0


def test_verlet_option_is_second_order():
    errs = []
    for dt in (1e-6, 0.5e-6):
        cfg = _com(khz_to_rad(20.0), integrator="verlet", timestep=dt, duration=0.5e-3)
        traj = simulate(cfg)
        ref = com_closed_form(traj.times, DRIVE_PER_FIELD * cfg.field_amplitude, OMEGA_2496, cfg.omega_mod)
        errs.append(np.max(np.abs(traj.values - ref)) / np.max(np.abs(ref)))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_collision_aborts():
    # a hard kick inwards drives the separation through zero
    cfg = _stretch(khz_to_rad(43.0), field=20.0, duration=0.5e-3)
    traj = simulate(cfg)
    assert traj.aborted
    assert np.all(np.isfinite(traj.values)) and np.all(traj.values > 0)
    assert loss_indicator(traj, preset_beam("nir", 20.0), ElectrostaticConfig.from_axial(OMEGA_2496))


def test_response_amplitude_definition():
    t = np.linspace(0, 1e-3, 1001)
    sine = Trajectory(t, 2e-6 * np.sin(2 * np.pi * 5e3 * t), np.zeros_like(t), "com", 0.0)
    assert response_amplitude(sine) == pytest.approx(2e-6, rel=1e-12)
    flat = Trajectory(t, np.full_like(t, 3e-6), np.zeros_like(t), "stretch", 3e-6)
    assert response_amplitude(flat) == 0.0


def test_trajectory_positions_and_rows():
    traj = simulate(_stretch(khz_to_rad(43.0), duration=0.2e-3))
    pos = traj.ion_positions()
    assert pos.shape == (len(traj.times), 2)
    np.testing.assert_array_equal(pos[:, 0], -pos[:, 1])
    header, rows = traj.rows()
    assert header == ("t_us", "value_um", "velocity_m_s") and len(rows) == len(traj.times)
    single = simulate(_com(1e5, initial_stretch=0.0, duration=0.2e-3))
    assert single.ion_positions().shape == (len(single.times), 1)


def test_scan_matches_single_runs():
    cfg = _stretch(0.0, duration=1e-3)
    grid = khz_to_rad(np.array([42.5, 43.2, 44.0]))
    scan = frequency_scan(cfg, grid)
    for w, a in zip(grid, scan.amplitudes):
        assert a == pytest.approx(response_amplitude(simulate(cfg.replace(omega_mod=float(w)))), rel=1e-12)
    assert not scan.loss_flags.any()
    assert scan.peak_omega == grid[np.argmax(scan.amplitudes)]
    header, rows = scan.rows()
    assert header == ("omega_mod_kHz", "amplitude_um", "loss_flag") and len(rows) == 3


def test_scan_is_deterministic():
    cfg = _stretch(0.0, duration=1e-3)
    grid = khz_to_rad(np.linspace(42.0, 45.0, 7))
    a, b = frequency_scan(cfg, grid), frequency_scan(cfg, grid)
    np.testing.assert_array_equal(a.amplitudes, b.amplitudes)


@pytest.mark.parametrize("grid", [[], [2.0, 1.0], [[1.0, 2.0]]])
def test_scan_grid_validation(grid):
    with pytest.raises(ValueError):
        frequency_scan(_stretch(0.0), grid)


def test_scan_records_abort_without_raising():
    cfg = _stretch(0.0, field=20.0, duration=0.5e-3)
    scan = frequency_scan(cfg, khz_to_rad(np.array([43.0, 100.0])))
    assert scan.loss_flags[0]
    assert np.all(np.isfinite(scan.amplitudes))


def test_loss_flag_threshold():
    beam, config = preset_beam("nir", 20.0), ElectrostaticConfig.from_axial(OMEGA_2496)
    quiet = simulate(_stretch(khz_to_rad(43.4), field=0.0, duration=0.2e-3))
    assert not loss_indicator(quiet, beam, config)
    # threshold above the static depth flags everything
    assert loss_indicator(quiet, beam, config, t_ref=1.0)
    dark = preset_beam("nir", 0.0)
    assert loss_indicator(quiet, dark, config)
