"""Local radial trap depth of each ion in a chain.

Along the weak radial direction x, ion i at axial position z sees

    U_tot(x) = (m/2) c x^2 - U(z) exp(-2 x^2 / w(z)^2)

with c the (usually negative) electrostatic curvature, i.e. the dc part plus
the defocusing from the other ions held at their equilibrium positions. For
c < 0 the barrier height has a closed form; it vanishes once
``m |c| w^2 >= 4 U`` because x = 0 is then no longer a minimum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .core import BA138, GaussianBeam, IonSpecies, beam_waist_at, joule_to_mk, optical_depth_at
from .crystal import CrystalEquilibrium
from .potential import ElectrostaticConfig

__all__ = [
    "IonDepth",
    "DepthProfile",
    "radial_barrier",
    "coulomb_radial_curvature",
    "electrostatic_curvature_x",
    "local_trap_depth",
    "depth_profile",
    "chain_depths",
]


@dataclass(frozen=True)
class IonDepth:
    ion_index: int
    z: float
    optical_depth: float
    curvature_x: float
    x_max: float | None
    depth: float

    @property
    def defocus_curvature(self) -> float:
        """Magnitude of the defocusing curvature, 0 if x is confining."""
        return max(-self.curvature_x, 0.0)


@dataclass(frozen=True)
class DepthProfile:
    ions: tuple

    @property
    def depths(self) -> np.ndarray:
        return np.array([rec.depth for rec in self.ions])

    @property
    def min_depth(self) -> float:
        return float(self.depths.min())

    @property
    def argmin(self) -> np.ndarray:
        """Indices of all ions sharing the minimum depth (to 1e-12 relative)."""
        d = self.depths
        return np.flatnonzero(d <= d.min() * (1 + 1e-12) + 1e-300)

    def rows(self):
        """CSV-ready rows; ions are numbered from 1."""
        header = ("ion_index", "z_um", "depth_mK", "curvature", "x_max_um")
        body = [
            (
                rec.ion_index + 1,
                rec.z * 1e6,
                float(joule_to_mk(rec.depth)),
                rec.defocus_curvature,
                None if rec.x_max is None else rec.x_max * 1e6,
            )
            for rec in self.ions
        ]
        return header, body


def radial_barrier(optical_depth, waist, curvature, mass):
    """Closed-form barrier height and barrier position, vectorized.

    Parameters
    ----------
    optical_depth : array_like
        Magnitude U of the optical well at the ion's axial position, J.
    waist : array_like
        Local beam radius w(z), m.
    curvature : array_like
        Signed mass-normalized curvature along x, (rad/s)^2.
    mass : float
        Ion mass, kg.

    Returns
    -------
    depth, x_max : ndarray
        ``x_max`` is NaN where there is no barrier (zero depth, or a confining
        curvature, in which case the depth is the full optical depth).
    """
    u = np.asarray(optical_depth, dtype=float)
    w = np.asarray(waist, dtype=float)
    c = np.asarray(curvature, dtype=float)
    u, w, c = np.broadcast_arrays(u, w, c)
    kappa_w2 = mass * np.maximum(-c, 0.0) * w**2
    defocus = kappa_w2 > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(defocus, 4.0 * u / np.where(defocus, kappa_w2, 1.0), np.inf)
        bound = defocus & (ratio > 1.0)
        log_r = np.log(np.where(bound, ratio, 1.0))
        # (k w^2/4)(r - 1 - ln r) == U - (k w^2/4)(1 + ln r), without the cancellation
        excess = (ratio - 1.0) - np.log1p(ratio - 1.0)
        depth = np.where(bound, 0.25 * kappa_w2 * np.where(bound, excess, 0.0), 0.0)
        depth = np.where(defocus, depth, u)
        x_max = np.where(bound, w * np.sqrt(0.5 * log_r), np.nan)
    return depth, x_max


def coulomb_radial_curvature(eq: CrystalEquilibrium, i: int) -> float:
    """Radial curvature on ion ``i`` from the other ions frozen in place, (rad/s)^2."""
    z = eq.axial_positions
    others = np.delete(z, i)
    if others.size == 0:
        return 0.0
    k = eq.species.coulomb_coupling / eq.species.mass
    return -k * np.sum(1.0 / np.abs(z[i] - others) ** 3)


def electrostatic_curvature_x(config: ElectrostaticConfig, eq: CrystalEquilibrium, i: int) -> float:
    return config.curvature_x + coulomb_radial_curvature(eq, i)


def _numeric_barrier(u, w, c, mass, force):
    """Barrier height with an extra uniform force ``force`` (N) along x.

    The lower of the two barriers flanking the well nearest x = 0 sets the
    depth. Returns (depth, x_max) with x_max the signed barrier position.
    """
    def pot(x):
        return 0.5 * mass * c * x**2 - u * np.exp(-2.0 * x**2 / w**2) - force * x

    if u <= 0:
        return 0.0, None
    span = 8.0 * w
    x = np.linspace(-span, span, 16001)
    v = pot(x)
    interior = slice(1, -1)
    is_min = np.flatnonzero((v[interior] < v[:-2]) & (v[interior] <= v[2:])) + 1
    if is_min.size == 0:
        return 0.0, None
    k_min = is_min[np.argmin(np.abs(x[is_min]))]
    h = x[1] - x[0]
    x_min = minimize_scalar(pot, bounds=(x[k_min] - h, x[k_min] + h), method="bounded",
                            options={"xatol": 1e-12 * w}).x
    v_min = pot(x_min)
    barriers = []
    for direction in (-1, 1):
        k = k_min
        while 0 < k < len(x) - 1 and not (v[k] >= v[k - 1] and v[k] >= v[k + 1]):
            k += direction
        if k in (0, len(x) - 1):
            continue  # no maximum within reach on this side
        res = minimize_scalar(lambda t: -pot(t), bounds=(x[k] - h, x[k] + h), method="bounded",
                              options={"xatol": 1e-12 * w})
        barriers.append((pot(res.x) - v_min, res.x))
    if not barriers:
        return u, None
    depth, x_max = min(barriers)
    return float(max(depth, 0.0)), float(x_max)


def local_trap_depth(
    beam: GaussianBeam,
    config: ElectrostaticConfig,
    eq: CrystalEquilibrium,
    i: int,
    stray_field_x: float = 0.0,
) -> IonDepth:
    """Radial trap depth of ion ``i`` (0-based) at its equilibrium position.

    ``stray_field_x`` (V/m) is added to the uniform field of ``config``; a
    nonzero total field switches to a numerical barrier search.
    """
    if not 0 <= i < eq.n_ions:
        raise IndexError(f"ion index {i} out of range for {eq.n_ions} ions")
    z = eq.axial_positions[i]
    u = float(optical_depth_at(beam, z))
    w = float(beam_waist_at(beam, z))
    c = electrostatic_curvature_x(config, eq, i)
    field = config.uniform_field[0] + stray_field_x
    if field == 0.0:
        depth, x_max = radial_barrier(u, w, c, eq.species.mass)
        depth, x_max = float(depth), float(x_max)
        x_max = None if np.isnan(x_max) else x_max
    else:
        depth, x_max = _numeric_barrier(u, w, c, eq.species.mass, eq.species.charge * field)
    return IonDepth(i, float(z), u, float(c), x_max, depth)


def depth_profile(beam, config, eq, stray_field_x=None) -> DepthProfile:
    """Local trap depth for every ion; ``stray_field_x`` optionally per ion."""
    if stray_field_x is None:
        stray_field_x = np.zeros(eq.n_ions)
    stray_field_x = np.broadcast_to(np.asarray(stray_field_x, dtype=float), (eq.n_ions,))
    return DepthProfile(
        tuple(local_trap_depth(beam, config, eq, i, stray_field_x[i]) for i in range(eq.n_ions))
    )


def chain_depths(beam: GaussianBeam, config: ElectrostaticConfig, z, species: IonSpecies = BA138):
    """Trap depths for ions at arbitrary axial positions ``z`` of shape (..., N).

    The Coulomb curvature uses the instantaneous positions along the last
    axis; leading axes (time, scan points) are broadcast.
    """
    z = np.asarray(z, dtype=float)
    diff = np.abs(z[..., :, None] - z[..., None, :])
    n = z.shape[-1]
    with np.errstate(divide="ignore"):
        inv3 = np.where(np.eye(n, dtype=bool), 0.0, 1.0 / diff**3)
    coul = -species.coulomb_coupling / species.mass * inv3.sum(axis=-1)
    depth, _ = radial_barrier(optical_depth_at(beam, z), beam_waist_at(beam, z), config.curvature_x + coul, species.mass)
    return depth
