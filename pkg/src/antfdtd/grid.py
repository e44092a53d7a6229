"""Uniform Yee lattice: grid geometry, materials, fields, update coefficients.

The lattice follows the usual staggering: with nx*ny*nz cells there are
(nx+1)*(ny+1)*(nz+1) nodes, electric field components live on cell edges and
magnetic components on cell faces:

    Ex (nx,   ny+1, nz+1)    Hx (nx+1, ny,   nz  )
    Ey (nx+1, ny,   nz+1)    Hy (nx,   ny+1, nz  )
    Ez (nx+1, ny+1, nz  )    Hz (nx,   ny,   nz+1)

Arrays are C-ordered (z fastest); update kernels partition work on the x
axis.  Material properties are cell-centred; each E edge takes the
properties of its owning cell (the cell for which the edge is a "lower"
edge, clamped at the upper domain boundary) with no interface averaging.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import C0, EPS0, MU0
from .errors import ConfigurationError, GridError


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid: cell counts and cell edge lengths in metres."""

    nx: int
    ny: int
    nz: int
    dx: float
    dy: float
    dz: float

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if not isinstance(n, (int, np.integer)) or n < 2:
                raise GridError(f"{name} must be an integer >= 2, got {n!r}")
        for name in ("dx", "dy", "dz"):
            d = getattr(self, name)
            if not (d > 0) or not math.isfinite(d):
                raise GridError(f"{name} must be a positive finite length, got {d!r}")

    @classmethod
    def from_extent(cls, lx: float, ly: float, lz: float,
                    dx: float, dy: float, dz: float) -> "GridSpec":
        """Build a grid covering the physical extent (lx, ly, lz) metres.

        The extent must divide into whole cells (to within 1e-9 relative).
        """
        counts = []
        for length, d, name in ((lx, dx, "x"), (ly, dy, "y"), (lz, dz, "z")):
            if d <= 0:
                raise GridError(f"d{name} must be positive, got {d!r}")
            n = int(round(length / d))
            if n < 2 or abs(n * d - length) > 1e-9 * max(length, d):
                raise GridError(
                    f"extent {length} m does not divide into whole cells of {d} m along {name}")
            counts.append(n)
        return cls(counts[0], counts[1], counts[2], dx, dy, dz)

    @property
    def extent(self) -> tuple[float, float, float]:
        return (self.nx * self.dx, self.ny * self.dy, self.nz * self.dz)

    @property
    def deltas(self) -> tuple[float, float, float]:
        return (self.dx, self.dy, self.dz)

    def shape_e(self, axis: str) -> tuple[int, int, int]:
        nx, ny, nz = self.nx, self.ny, self.nz
        return {"x": (nx, ny + 1, nz + 1),
                "y": (nx + 1, ny, nz + 1),
                "z": (nx + 1, ny + 1, nz)}[axis]

    def shape_h(self, axis: str) -> tuple[int, int, int]:
        nx, ny, nz = self.nx, self.ny, self.nz
        return {"x": (nx + 1, ny, nz),
                "y": (nx, ny + 1, nz),
                "z": (nx, ny, nz + 1)}[axis]


def total_cells(grid: GridSpec) -> int:
    """Number of Yee cells in the domain."""
    return grid.nx * grid.ny * grid.nz


def cfl_timestep(grid: GridSpec, safety: float = 0.99) -> float:
    """Largest stable timestep scaled by ``safety``.

    Uses the free-space light speed, the fastest any medium in the domain
    can support (relative permittivity and permeability are >= 1).
    """
    if not (0.0 < safety <= 1.0):
        raise ConfigurationError(f"safety factor must be in (0, 1], got {safety!r}")
    s = math.sqrt(1.0 / grid.dx ** 2 + 1.0 / grid.dy ** 2 + 1.0 / grid.dz ** 2)
    return safety / (C0 * s)


class MaterialGrid:
    """Per-cell material properties plus per-edge PEC flags.

    eps_r, mu_r, sigma are (nx, ny, nz) arrays; PEC masks (created lazily)
    have the E-component shapes and force the co-located E value to stay
    exactly zero (encoded as Ca = Cb = 0 in the update coefficients).
    """

    def __init__(self, grid: GridSpec, eps_r, mu_r, sigma,
                 pec_x=None, pec_y=None, pec_z=None):
        shape = (grid.nx, grid.ny, grid.nz)
        eps_r = np.asarray(eps_r)
        mu_r = np.asarray(mu_r)
        sigma = np.asarray(sigma)
        for name, arr in (("eps_r", eps_r), ("mu_r", mu_r), ("sigma", sigma)):
            if arr.shape != shape:
                raise ConfigurationError(f"{name} shape {arr.shape} != cell shape {shape}")
        if eps_r.min() < 1.0 or mu_r.min() < 1.0 or sigma.min() < 0.0:
            raise ConfigurationError(
                "materials must satisfy eps_r >= 1, mu_r >= 1, sigma >= 0")
        self.grid = grid
        self.eps_r = eps_r
        self.mu_r = mu_r
        self.sigma = sigma
        self.pec_x = pec_x
        self.pec_y = pec_y
        self.pec_z = pec_z
        for axis, mask in (("x", pec_x), ("y", pec_y), ("z", pec_z)):
            if mask is not None and mask.shape != grid.shape_e(axis):
                raise ConfigurationError(f"pec_{axis} shape {mask.shape} does not match grid")

    @classmethod
    def free_space(cls, grid: GridSpec, dtype=np.float64) -> "MaterialGrid":
        shape = (grid.nx, grid.ny, grid.nz)
        return cls(grid,
                   np.ones(shape, dtype),
                   np.ones(shape, dtype),
                   np.zeros(shape, dtype))

    @property
    def has_pec(self) -> bool:
        return any(m is not None and m.any() for m in (self.pec_x, self.pec_y, self.pec_z))

    def pec_mask(self, axis: str):
        mask = {"x": self.pec_x, "y": self.pec_y, "z": self.pec_z}[axis]
        if mask is None:
            mask = np.zeros(self.grid.shape_e(axis), dtype=bool)
        return mask

    def pec_edge_count(self) -> int:
        return sum(int(m.sum()) for m in (self.pec_x, self.pec_y, self.pec_z)
                   if m is not None)


@dataclass
class FieldState:
    """The six staggered field arrays plus the current timestep index."""

    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray
    hx: np.ndarray
    hy: np.ndarray
    hz: np.ndarray
    n: int = 0

    @classmethod
    def zeros(cls, grid: GridSpec, dtype=np.float64) -> "FieldState":
        return cls(ex=np.zeros(grid.shape_e("x"), dtype),
                   ey=np.zeros(grid.shape_e("y"), dtype),
                   ez=np.zeros(grid.shape_e("z"), dtype),
                   hx=np.zeros(grid.shape_h("x"), dtype),
                   hy=np.zeros(grid.shape_h("y"), dtype),
                   hz=np.zeros(grid.shape_h("z"), dtype))

    def e_arrays(self):
        return (self.ex, self.ey, self.ez)

    def h_arrays(self):
        return (self.hx, self.hy, self.hz)

    def arrays(self):
        return (self.ex, self.ey, self.ez, self.hx, self.hy, self.hz)

    def max_abs(self) -> float:
        m = 0.0
        for a in self.arrays():
            if a.size:
                m = max(m, float(a.max()), float(-a.min()))
        return m

    def all_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.arrays())


@dataclass
class UpdateCoefficients:
    """Precomputed per-edge update coefficients.

    Electric update:  E <- Ca*E + Cb*(curl H)  with the curl terms carrying
    their own 1/d factors.  Magnetic update: H <- Da*H + Db*(curl E).  The
    material model has no magnetic loss, so Da == 1 identically and is kept
    as a scalar.  PEC edges carry Ca = Cb = 0.
    """

    dt: float
    ca_x: np.ndarray
    ca_y: np.ndarray
    ca_z: np.ndarray
    cb_x: np.ndarray
    cb_y: np.ndarray
    cb_z: np.ndarray
    db_x: np.ndarray
    db_y: np.ndarray
    db_z: np.ndarray
    da: float = 1.0

    def ca(self, axis: str):
        return {"x": self.ca_x, "y": self.ca_y, "z": self.ca_z}[axis]

    def cb(self, axis: str):
        return {"x": self.cb_x, "y": self.cb_y, "z": self.cb_z}[axis]

    def db(self, axis: str):
        return {"x": self.db_x, "y": self.db_y, "z": self.db_z}[axis]


def _edge_material(cell_values: np.ndarray, shape: tuple[int, int, int]) -> np.ndarray:
    """Sample a cell-centred property at edge/face positions of ``shape``.

    Positions beyond the last cell (node index == cell count) take the last
    cell's value; this is the owning-cell rule with boundary clamping.
    """
    nx, ny, nz = cell_values.shape
    ii = np.minimum(np.arange(shape[0]), nx - 1)
    jj = np.minimum(np.arange(shape[1]), ny - 1)
    kk = np.minimum(np.arange(shape[2]), nz - 1)
    return cell_values[np.ix_(ii, jj, kk)]


def lossy_e_coefficients(eps: np.ndarray, sigma: np.ndarray, dt: float):
    """Half-implicit lossy-medium E coefficients (eps, sigma in SI units)."""
    denom = 2.0 * eps + sigma * dt
    ca = (2.0 * eps - sigma * dt) / denom
    cb = 2.0 * dt / denom
    return ca, cb


def build_coefficients(materials: MaterialGrid, grid: GridSpec, dt: float,
                       dtype=np.float64) -> UpdateCoefficients:
    """Precompute Ca/Cb (and Db) arrays from the material grid."""
    if not (dt > 0):
        raise ConfigurationError(f"dt must be positive, got {dt!r}")
    out = {}
    for axis in "xyz":
        shape = grid.shape_e(axis)
        eps = EPS0 * _edge_material(materials.eps_r, shape)
        sig = _edge_material(materials.sigma, shape)
        ca, cb = lossy_e_coefficients(eps, sig, dt)
        pec = {"x": materials.pec_x, "y": materials.pec_y, "z": materials.pec_z}[axis]
        if pec is not None:
            ca[pec] = 0.0
            cb[pec] = 0.0
        out[f"ca_{axis}"] = ca.astype(dtype, copy=False)
        out[f"cb_{axis}"] = cb.astype(dtype, copy=False)
    for axis in "xyz":
        shape = grid.shape_h(axis)
        mu = MU0 * _edge_material(materials.mu_r, shape)
        out[f"db_{axis}"] = (dt / mu).astype(dtype, copy=False)
    return UpdateCoefficients(dt=dt, **out)
