"""Convolutional PML absorbing boundary (recursive-convolution form).

All six domain faces are terminated by a graded absorber of ``thickness``
cells.  Inside the absorber every spatial derivative d/du along the face
normal u is replaced by (1/kappa) d/du + psi, where psi is a running
recursion

    psi_new = b * psi + a * (d/du)

with b and a derived from the graded (sigma, kappa, alpha) profile.  The
polynomial sigma grading uses the standard optimum

    sigma_max = scale * 0.8 * (m + 1) / (eta0 * cell_size)

so the nominal normal-incidence reflection depends only on the cell count,
not the cell size.  alpha (the complex-frequency-shift term) is largest at
the inner interface and grades linearly to zero at the outer wall, which
keeps low-frequency and evanescent energy from creeping along the boundary.

Component bookkeeping per axis (cyclic order):

    axis x affects (Ey, Ez) and (Hy, Hz)
    axis y affects (Ez, Ex) and (Hz, Hx)
    axis z affects (Ex, Ey) and (Hx, Hy)

psi arrays are slab-sized.  On the low face, local index p equals the
global index; on the high face p counts from the inner interface.  E-type
corrections live on integer positions (p = 1 .. t-1; the wall plane is
pinned by the PEC backing and the interface plane has sigma = 0), H-type
corrections on half positions (p = 0 .. t-1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import EPS0, ETA0
from .errors import ConfigurationError
from .grid import GridSpec


@dataclass(frozen=True)
class CpmlConfig:
    """Absorber parameters, uniform over all six faces."""

    thickness: int = 10         # cells per face
    order: int = 4              # polynomial grading exponent m
    sigma_scale: float = 1.0    # multiplier on the polynomial-optimum sigma_max
    kappa_max: float = 1.0
    alpha_max: float = 0.05     # S/m-equivalent CFS term at the inner interface

    def __post_init__(self):
        if self.thickness < 4:
            raise ConfigurationError(
                f"CPML thickness must be >= 4 cells, got {self.thickness}")
        if self.order < 1:
            raise ConfigurationError(f"CPML grading order must be >= 1, got {self.order}")
        for name in ("sigma_scale", "kappa_max", "alpha_max"):
            v = getattr(self, name)
            if v < 0:
                raise ConfigurationError(f"CPML {name} must be >= 0, got {v}")
        if self.kappa_max != 0 and self.kappa_max < 1.0:
            raise ConfigurationError(f"CPML kappa_max must be >= 1, got {self.kappa_max}")

    def validate_for_grid(self, grid: GridSpec) -> None:
        if 2 * self.thickness >= min(grid.nx, grid.ny, grid.nz):
            raise ConfigurationError(
                f"2 x CPML thickness ({2 * self.thickness}) must be smaller than the "
                f"smallest cell count {min(grid.nx, grid.ny, grid.nz)}")


def grading_profile(depth_fraction: float, config: CpmlConfig,
                    cell_size: float) -> tuple[float, float, float]:
    """(sigma, kappa, alpha) at a normalized depth into the absorber.

    depth_fraction = 0 is the inner interface, 1 the outer wall.
    """
    if not (0.0 <= depth_fraction <= 1.0):
        raise ConfigurationError(f"depth_fraction must be in [0, 1], got {depth_fraction}")
    m = config.order
    sigma_max = config.sigma_scale * 0.8 * (m + 1) / (ETA0 * cell_size)
    g = depth_fraction ** m
    sigma = sigma_max * g
    kappa = 1.0 + (config.kappa_max - 1.0) * g
    alpha = config.alpha_max * (1.0 - depth_fraction)
    return sigma, kappa, alpha


def _recursion_constants(depths: np.ndarray, config: CpmlConfig,
                         cell_size: float, dt: float, dtype):
    """Per-depth (b, a) recursion constants for the psi update."""
    b = np.empty(len(depths), dtype)
    a = np.empty(len(depths), dtype)
    for idx, depth in enumerate(depths):
        sigma, kappa, alpha = grading_profile(depth, config, cell_size)
        b[idx] = math.exp(-(sigma / kappa + alpha) * dt / EPS0)
        denom = kappa * (sigma + kappa * alpha)
        a[idx] = sigma * (b[idx] - 1.0) / denom if denom > 0.0 else 0.0
    return b, a


@dataclass
class CpmlFace:
    """psi accumulators and recursion constants for one face of one axis."""

    psi_e1: np.ndarray   # first affected E component (cyclic order)
    psi_e2: np.ndarray
    psi_h1: np.ndarray
    psi_h2: np.ndarray
    be: np.ndarray
    ae: np.ndarray
    bh: np.ndarray
    ah: np.ndarray

    def arrays(self):
        return (self.psi_e1, self.psi_e2, self.psi_h1, self.psi_h2)


class CpmlState:
    """All psi accumulators plus the kappa-scaled inverse cell sizes."""

    def __init__(self, grid: GridSpec, config: CpmlConfig, dt: float, dtype=np.float64):
        config.validate_for_grid(grid)
        self.config = config
        self.grid = grid
        t = config.thickness
        nx, ny, nz = grid.nx, grid.ny, grid.nz

        # psi slab shapes per axis, cyclic component order (see module docstring)
        e_shapes = {
            "x": ((t, ny, nz + 1), (t, ny + 1, nz)),        # Ey, Ez
            "y": ((nx + 1, t, nz), (nx, t, nz + 1)),        # Ez, Ex
            "z": ((nx, ny + 1, t), (nx + 1, ny, t)),        # Ex, Ey
        }
        h_shapes = {
            "x": ((t, ny + 1, nz), (t, ny, nz + 1)),        # Hy, Hz
            "y": ((nx, t, nz + 1), (nx + 1, t, nz)),        # Hz, Hx
            "z": ((nx + 1, ny, t), (nx, ny + 1, t)),        # Hx, Hy
        }
        p = np.arange(t, dtype=np.float64)
        depth_sets = {
            "lo": ((t - p) / t, (t - p - 0.5) / t),
            "hi": (p / t, (p + 0.5) / t),
        }
        self.faces: dict[tuple[str, str], CpmlFace] = {}
        for axis, d in zip("xyz", grid.deltas):
            for side in ("lo", "hi"):
                de, dh = depth_sets[side]
                be, ae = _recursion_constants(de, config, d, dt, dtype)
                bh, ah = _recursion_constants(dh, config, d, dt, dtype)
                s1, s2 = e_shapes[axis]
                h1, h2 = h_shapes[axis]
                self.faces[(axis, side)] = CpmlFace(
                    psi_e1=np.zeros(s1, dtype), psi_e2=np.zeros(s2, dtype),
                    psi_h1=np.zeros(h1, dtype), psi_h2=np.zeros(h2, dtype),
                    be=be, ae=ae, bh=bh, ah=ah)

        # kappa-folded inverse cell sizes used by the bulk update kernels
        self.inv_e = {}
        self.inv_h = {}
        for axis, (n, d) in zip("xyz", [(nx, grid.dx), (ny, grid.dy), (nz, grid.dz)]):
            inv_e = np.full(n + 1, 1.0 / d, dtype=np.float64)
            inv_h = np.full(n, 1.0 / d, dtype=np.float64)
            for i in range(t + 1):
                _, kap, _ = grading_profile((t - i) / t, config, d)
                inv_e[i] = 1.0 / (kap * d)
                _, kap, _ = grading_profile(i / t, config, d)
                inv_e[n - t + i] = 1.0 / (kap * d)
            for i in range(t):
                _, kap, _ = grading_profile((t - i - 0.5) / t, config, d)
                inv_h[i] = 1.0 / (kap * d)
                _, kap, _ = grading_profile((i + 0.5) / t, config, d)
                inv_h[n - t + i] = 1.0 / (kap * d)
            self.inv_e[axis] = inv_e.astype(dtype)
            self.inv_h[axis] = inv_h.astype(dtype)

    def all_finite(self) -> bool:
        return all(np.isfinite(a).all()
                   for face in self.faces.values() for a in face.arrays())


def plain_inverse_deltas(grid: GridSpec, dtype=np.float64):
    """Unscaled 1/d arrays, used when no absorber is attached."""
    inv_e = {a: np.full(n + 1, 1.0 / d, dtype)
             for a, n, d in zip("xyz", (grid.nx, grid.ny, grid.nz), grid.deltas)}
    inv_h = {a: np.full(n, 1.0 / d, dtype)
             for a, n, d in zip("xyz", (grid.nx, grid.ny, grid.nz), grid.deltas)}
    return inv_e, inv_h
