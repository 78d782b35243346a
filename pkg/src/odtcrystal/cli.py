"""Command-line front end.

Subcommands: ``equilibrium``, ``modes``, ``depth``, ``survival-fit`` and
``spectrometry``. Parameters come from defaults, then an optional JSON
scenario file (``--config``), then flags; later sources win. Every key and
flag carries its unit in the name.

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .core import FitError, GaussianBeam, IonSpecies, SolverError, preset_beam
from .core import joule_to_mk, khz_to_rad, mk_to_joule, rad_to_khz
from .crystal import axial_mode_spectrum, equilibrium_positions
from .dynamics import DriveConfig, frequency_scan, simulate
from .io import ObservationFormatError, read_observations, to_csv, to_json
from .potential import ElectrostaticConfig
from .survival import ensemble_survival, fit_temperature
from .trapdepth import depth_profile

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class ConfigError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    species_mass_u: float = 138.0
    charge_e: int = 1
    preset: str | None = "vis"
    power_W: float | None = None
    wavelength_nm: float | None = None
    waist_um: float | None = None
    depth_per_watt_mK: float | None = None
    omega_z_khz: float = 25.0
    y_share: float = 0.0
    n: int = 2
    temperature_mK: float | None = None
    data: str | None = None
    e_mvpm: float = 1.8
    mode: str = "stretch"
    grid: str = "38:48:0.1"
    duration_ms: float = 10.0
    timestep_us: float = 1.0
    t_ref_mK: float = 2.0
    trajectory_khz: float | None = None
    trajectory_out: str | None = None
    output: str | None = None

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(mapping) - known)
        if unknown:
            raise ConfigError(
                f"unknown scenario key(s) {unknown}; keys must carry their unit, e.g. 'omega_z_khz'"
            )
        return cls(**mapping)

    # -- derived physics objects

    def species(self) -> IonSpecies:
        return IonSpecies.from_amu(self.species_mass_u, self.charge_e)

    def omega_z(self) -> float:
        if not self.omega_z_khz > 0:
            raise ConfigError("omega_z_khz must be positive")
        return float(khz_to_rad(self.omega_z_khz))

    def electrostatics(self) -> ElectrostaticConfig:
        return ElectrostaticConfig.from_axial(self.omega_z(), self.y_share)

    def beam(self) -> GaussianBeam:
        explicit = {
            "wavelength": None if self.wavelength_nm is None else self.wavelength_nm * 1e-9,
            "waist": None if self.waist_um is None else self.waist_um * 1e-6,
            "depth_per_watt": None if self.depth_per_watt_mK is None else float(mk_to_joule(self.depth_per_watt_mK)),
        }
        if self.preset:
            beam = preset_beam(self.preset, self.power_W)
            overrides = {k: v for k, v in explicit.items() if v is not None}
            if overrides:
                # a modified geometry no longer matches the tabulated Rayleigh length
                beam = dataclasses.replace(beam, stated_rayleigh_length=None, rayleigh_uncertainty=None,
                                           **overrides)
            return beam
        missing = [k for k, v in explicit.items() if v is None]
        if missing or self.power_W is None:
            raise ConfigError("without a preset, wavelength_nm, waist_um, depth_per_watt_mK and power_W are required")
        return GaussianBeam(power=self.power_W, **explicit)

    def omega_grid(self) -> np.ndarray:
        try:
            start, stop, step = (float(p) for p in self.grid.split(":"))
        except ValueError:
            raise ConfigError(f"grid must look like start:stop:step in kHz, got {self.grid!r}") from None
        if not step > 0 or stop < start:
            raise ConfigError("grid needs step > 0 and stop >= start")
        count = int(round((stop - start) / step)) + 1
        return khz_to_rad(start + step * np.arange(count))


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    common.add_argument("--out", dest="output", help="write data here instead of stdout")
    common.add_argument("--species-mass-u", type=float)
    common.add_argument("--charge-e", type=int)
    common.add_argument("--omega-z-khz", type=float)
    common.add_argument("--y-share", type=float, help="fraction of radial defocusing on y")
    common.add_argument("--n", type=int, help="number of ions")

    beam = argparse.ArgumentParser(add_help=False)
    beam.add_argument("--preset", choices=["vis", "nir", "none"])
    beam.add_argument("--power", dest="power_W", type=float, help="laser power in W")
    beam.add_argument("--wavelength-nm", type=float)
    beam.add_argument("--waist-um", type=float)
    beam.add_argument("--depth-per-watt-mk", dest="depth_per_watt_mK", type=float)

    parser = argparse.ArgumentParser(prog="odtcrystal", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("equilibrium", parents=[common], help="axial equilibrium positions")
    sub.add_parser("modes", parents=[common], help="axial normal modes")
    p = sub.add_parser("depth", parents=[common, beam], help="per-ion radial trap depth")
    p.add_argument("--temperature-mk", dest="temperature_mK", type=float)
    p = sub.add_parser("survival-fit", parents=[common, beam], help="fit a temperature to survival data")
    p.add_argument("data", nargs="?", help="CSV with power_W,n_ions,successes,attempts")
    p = sub.add_parser("spectrometry", parents=[common, beam], help="driven-mode frequency scan")
    p.add_argument("--e-mvpm", type=float, help="drive amplitude in mV/m")
    p.add_argument("--mode", choices=["com", "stretch"])
    p.add_argument("--grid", help="start:stop:step in kHz")
    p.add_argument("--duration-ms", type=float)
    p.add_argument("--timestep-us", type=float)
    p.add_argument("--t-ref-mk", dest="t_ref_mK", type=float)
    p.add_argument("--trajectory-khz", type=float, help="also dump the trajectory at this frequency")
    p.add_argument("--trajectory-out")
    return parser


def _scenario(args) -> ScenarioConfig:
    values = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        values.update(loaded)
    skip = {"command", "config", "format"}
    for key, value in vars(args).items():
        if key not in skip and value is not None:
            values[key] = value
    if values.get("preset") == "none":
        values["preset"] = None
    try:
        return ScenarioConfig.from_mapping(values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# -- subcommands; each returns (csv_text, json_text)


def cmd_equilibrium(cfg: ScenarioConfig):
    eq = equilibrium_positions(cfg.n, cfg.omega_z(), cfg.species())
    z_um = eq.axial_positions * 1e6
    rows = [(i + 1, z, eq.scale_length * 1e6) for i, z in enumerate(z_um)]
    payload = {
        "n": cfg.n,
        "omega_z_khz": cfg.omega_z_khz,
        "scale_length_um": eq.scale_length * 1e6,
        "positions_um": z_um,
    }
    return to_csv(("ion_index", "z_um", "scale_length_um"), rows), to_json(payload)


def cmd_modes(cfg: ScenarioConfig):
    eq = equilibrium_positions(cfg.n, cfg.omega_z(), cfg.species())
    modes = axial_mode_spectrum(eq)
    ratios = modes.frequencies / eq.omega_z
    header = ("mode_index", "frequency_khz", "ratio") + tuple(f"v{i + 1}" for i in range(cfg.n))
    rows = [
        (k + 1, float(rad_to_khz(f)), r, *vec)
        for k, (f, r, vec) in enumerate(zip(modes.frequencies, ratios, modes.eigenvectors))
    ]
    payload = {
        "n": cfg.n,
        "omega_z_khz": cfg.omega_z_khz,
        "modes": [
            {"frequency_khz": float(rad_to_khz(f)), "ratio": r, "eigenvector": vec}
            for f, r, vec in zip(modes.frequencies, ratios, modes.eigenvectors)
        ],
    }
    return to_csv(header, rows), to_json(payload)


def cmd_depth(cfg: ScenarioConfig):
    eq = equilibrium_positions(cfg.n, cfg.omega_z(), cfg.species())
    profile = depth_profile(cfg.beam(), cfg.electrostatics(), eq)
    header, rows = profile.rows()
    payload = {
        "n": cfg.n,
        "power_W": cfg.beam().power,
        "omega_z_khz": cfg.omega_z_khz,
        "ions": [dict(zip(header, row)) for row in rows],
        "min_depth_mK": float(joule_to_mk(profile.min_depth)),
        "min_depth_ions": [int(i) + 1 for i in profile.argmin],
    }
    if cfg.temperature_mK is not None:
        payload["temperature_mK"] = cfg.temperature_mK
        payload["ensemble_survival"] = ensemble_survival(profile, cfg.temperature_mK * 1e-3)
    return to_csv(header, rows), to_json(payload)


def cmd_survival_fit(cfg: ScenarioConfig):
    if not cfg.data:
        raise ConfigError("survival-fit needs a data CSV")
    try:
        observations = read_observations(cfg.data)
    except OSError as exc:
        raise ConfigError(f"cannot read {cfg.data}: {exc}") from None
    if not observations:
        raise ConfigError(f"{cfg.data} holds no observations")
    fit = fit_temperature(observations, cfg.beam(), cfg.electrostatics(), cfg.omega_z(), cfg.species())
    record = {
        "temperature_mK": fit.temperature * 1e3,
        "std_error_mK": fit.std_error * 1e3,
        "residual": fit.residual,
        "n_points": fit.n_points,
        "n_ions": observations[0].n_ions,
    }
    return to_csv(tuple(record), [tuple(record.values())]), to_json(record)


def _drive(cfg: ScenarioConfig, omega_mod: float) -> DriveConfig:
    return DriveConfig(
        field_amplitude=cfg.e_mvpm * 1e-3,
        mode_kind=cfg.mode,
        omega_mod=omega_mod,
        omega_z=cfg.omega_z(),
        duration=cfg.duration_ms * 1e-3,
        timestep=cfg.timestep_us * 1e-6,
        initial_stretch=None if (cfg.mode == "stretch" or cfg.n >= 2) else 0.0,
        species=cfg.species(),
    )


def cmd_spectrometry(cfg: ScenarioConfig):
    grid = cfg.omega_grid()
    scan = frequency_scan(_drive(cfg, grid[0]), grid, cfg.beam(), cfg.electrostatics(), cfg.t_ref_mK * 1e-3)
    header, rows = scan.rows()
    payload = {
        "e_mvpm": cfg.e_mvpm,
        "mode": cfg.mode,
        "omega_z_khz": cfg.omega_z_khz,
        "peak_khz": float(rad_to_khz(scan.peak_omega)),
        "points": [dict(zip(header, row)) for row in rows],
    }
    if cfg.trajectory_khz is not None:
        if not cfg.trajectory_out:
            raise ConfigError("--trajectory-khz needs --trajectory-out")
        traj = simulate(_drive(cfg, float(khz_to_rad(cfg.trajectory_khz))))
        _write(cfg.trajectory_out, to_csv(*traj.rows()))
    return to_csv(header, rows), to_json(payload)


COMMANDS = {
    "equilibrium": (cmd_equilibrium, "csv"),
    "modes": (cmd_modes, "csv"),
    "depth": (cmd_depth, "csv"),
    "survival-fit": (cmd_survival_fit, "json"),
    "spectrometry": (cmd_spectrometry, "csv"),
}


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _write_sidecar(path, command, cfg):
    meta = {
        "command": command,
        "scenario": dataclasses.asdict(cfg),
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    _write(path + ".meta.json", json.dumps(meta, indent=2) + "\n")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    func, default_format = COMMANDS[args.command]
    try:
        cfg = _scenario(args)
        csv_text, json_text = func(cfg)
    except (ConfigError, ObservationFormatError) as exc:
        print(f"odtcrystal: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SolverError, FitError) as exc:
        print(f"odtcrystal: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"odtcrystal: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = json_text if (args.format or default_format) == "json" else csv_text
    if cfg.output:
        _write(cfg.output, text)
        _write_sidecar(cfg.output, args.command, cfg)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
