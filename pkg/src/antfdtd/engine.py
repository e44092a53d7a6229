"""Simulation orchestration: config validation, the leapfrog loop, probes.

One ``step()`` advances the fields by a full leapfrog iteration:

    1. H half-step over the whole domain (kappa-scaled derivatives),
    2. CPML psi recursion + correction for H in the absorber slabs,
    3. E half-step (PEC edges carry Ca = Cb = 0 and stay pinned),
    4. CPML psi recursion + correction for E,
    5. impressed source currents on the feed edges, evaluated at (n+1/2) dt,
    6. probe sampling of the updated E fields.

Kernels write disjoint slabs per thread and read only the opposite field
arrays, so the probe records and the final field state are bitwise
identical for any thread count.  Fields are checked for blow-up every
``check_every`` steps; a non-finite value or |E| beyond ``max_field``
raises InstabilityError naming the step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import kernels
from .cpml import CpmlConfig, CpmlState, plain_inverse_deltas
from .errors import ConfigurationError, InstabilityError
from .excitation import (LumpedResistor, VoltageProbe, VoltageSource,
                         edge_geometry, source_conductivity)
from .grid import (FieldState, GridSpec, MaterialGrid, UpdateCoefficients,
                   build_coefficients, cfl_timestep, lossy_e_coefficients)
from .constants import EPS0

_AXIS_INDEX = {"x": 0, "y": 1, "z": 2}


@dataclass
class SimulationConfig:
    grid: GridSpec
    materials: MaterialGrid
    n_steps: int
    cpml: CpmlConfig | None = dc_field(default_factory=CpmlConfig)
    sources: list = dc_field(default_factory=list)
    probes: list = dc_field(default_factory=list)
    resistors: list = dc_field(default_factory=list)
    safety: float = 0.99
    dt: float | None = None           # explicit override; default safety * CFL bound
    dtype: type = np.float64
    check_every: int = 10
    max_field: float = 1e12

    def timestep(self) -> float:
        if self.dt is not None:
            if not (self.dt > 0):
                raise ConfigurationError(f"dt must be positive, got {self.dt!r}")
            return self.dt
        # computed directly so that safety > 1 runs are constructible for
        # the designed instability checks
        if not (self.safety > 0):
            raise ConfigurationError(f"safety must be positive, got {self.safety!r}")
        return self.safety * cfl_timestep(self.grid, 1.0)

    def min_window_steps(self) -> int:
        """Steps needed to fully launch the slowest source pulse (4/fc)."""
        if not self.sources:
            return 0
        fc_min = min(s.waveform.fc for s in self.sources)
        return int(np.ceil(4.0 / fc_min / self.timestep()))


@dataclass
class ProbeSeries:
    name: str
    ex: np.ndarray
    ey: np.ndarray
    ez: np.ndarray

    def component(self, axis: str) -> np.ndarray:
        return {"x": self.ex, "y": self.ey, "z": self.ez}[axis]


@dataclass
class ProbeRecords:
    """Per-probe E-component series plus the source waveform series.

    Sample n holds the fields after step n completed; the waveform sample
    is the value injected during that step, Vs((n + 1/2) dt).
    """

    dt: float
    n_steps: int
    source_axis: str | None
    vt: np.ndarray
    probes: list[ProbeSeries]

    def probe(self, name: str) -> ProbeSeries:
        for p in self.probes:
            if p.name == name:
                return p
        raise KeyError(name)


def _edge_in_interior(idx, axis, grid, pml_cells) -> bool:
    """True when the edge anchored at idx lies strictly outside the absorber."""
    i, j, k = idx
    t = pml_cells
    lims = (grid.nx, grid.ny, grid.nz)
    for ax, (v, n) in enumerate(zip((i, j, k), lims)):
        if v < t or v > n - t:
            return False
    return True


class Engine:
    """Owns the field state and advances it; not shared across threads."""

    def __init__(self, config: SimulationConfig):
        self.config = config
        grid = config.grid
        self.dt = config.timestep()
        self.fields = FieldState.zeros(grid, config.dtype)
        self.coeffs = build_coefficients(config.materials, grid, self.dt, config.dtype)
        if config.cpml is not None:
            self.cpml = CpmlState(grid, config.cpml, self.dt, config.dtype)
            self._inv_e = self.cpml.inv_e
            self._inv_h = self.cpml.inv_h
        else:
            self.cpml = None
            self._inv_e, self._inv_h = plain_inverse_deltas(grid, config.dtype)
        dt_scalar = np.dtype(config.dtype).type
        self._gx = dt_scalar(1.0 / grid.dx)
        self._gy = dt_scalar(1.0 / grid.dy)
        self._gz = dt_scalar(1.0 / grid.dz)
        self._validate_elements()
        self._patch_lumped_edges()
        self._setup_records()

    # -- construction -------------------------------------------------------

    def _check_inside(self, idx, axis, what):
        grid = self.config.grid
        i, j, k = idx
        shape = grid.shape_e(axis) if axis else (grid.nx + 1, grid.ny + 1, grid.nz + 1)
        if not (0 <= i < shape[0] and 0 <= j < shape[1] and 0 <= k < shape[2]):
            raise ConfigurationError(f"{what} index {idx} lies outside the domain")

    def _validate_elements(self):
        cfg = self.config
        t = cfg.cpml.thickness if cfg.cpml is not None else 0
        for src in cfg.sources:
            self._check_inside(src.cell, src.axis, "source")
            if cfg.cpml is not None and not _edge_in_interior(src.cell, src.axis, cfg.grid, t):
                raise ConfigurationError(f"source at {src.cell} lies inside the CPML region")
        for res in cfg.resistors:
            self._check_inside((res.i, res.j, res.k), res.axis, "resistor")
        for probe in cfg.probes:
            self._check_inside(probe.cell, None, "probe")
        if cfg.cpml is not None and cfg.materials.has_pec:
            for axis in "xyz":
                mask = cfg.materials.pec_mask(axis)
                if mask.any():
                    idx = np.argwhere(mask)
                    lo = idx.min(axis=0)
                    hi = idx.max(axis=0)
                    lims = (cfg.grid.nx, cfg.grid.ny, cfg.grid.nz)
                    if (lo < t).any() or (hi > np.array(lims) - t).any():
                        raise ConfigurationError(
                            "PEC edges extend into the CPML region; enlarge the domain")

    def _patch_lumped_edges(self):
        """Fold source/resistor equivalent conductivities into Ca/Cb."""
        cfg = self.config
        grid = cfg.grid
        extra: dict[tuple, float] = {}
        for src in cfg.sources:
            key = (src.axis, src.cell)
            extra[key] = extra.get(key, 0.0) + source_conductivity(
                src.axis, src.rs, *grid.deltas)
        for res in cfg.resistors:
            key = (res.axis, (res.i, res.j, res.k))
            extra[key] = extra.get(key, 0.0) + source_conductivity(
                res.axis, res.resistance, *grid.deltas)
        mats = cfg.materials
        for (axis, (i, j, k)), sig_extra in extra.items():
            if mats.pec_mask(axis)[i, j, k]:
                raise ConfigurationError(
                    f"lumped element at {(i, j, k)}/{axis} sits on a PEC edge")
            ci = (min(i, grid.nx - 1), min(j, grid.ny - 1), min(k, grid.nz - 1))
            eps = EPS0 * float(mats.eps_r[ci])
            sig = float(mats.sigma[ci]) + sig_extra
            ca, cb = lossy_e_coefficients(eps, sig, self.dt)
            self.coeffs.ca(axis)[i, j, k] = ca
            self.coeffs.cb(axis)[i, j, k] = cb

        # impressed-current factor per source: E -= cb_edge * Vs(t)/(Rs*dA)
        self._src_factors = []
        for src in cfg.sources:
            dp, da = edge_geometry(src.axis, *grid.deltas)
            cb_edge = float(self.coeffs.cb(src.axis)[src.cell])
            self._src_factors.append(cb_edge / (src.rs * da))

    def _setup_records(self):
        cfg = self.config
        n = cfg.n_steps
        self._vt = np.zeros(n)
        self._probe_data = [
            ProbeSeries(p.name, np.zeros(n), np.zeros(n), np.zeros(n))
            for p in cfg.probes]

    # -- stepping ------------------------------------------------------------

    def _apply_cpml_h(self):
        f, c = self.fields, self.coeffs
        t = self.cpml.config.thickness
        lo = self.cpml.faces
        gx, gy, gz = self._gx, self._gy, self._gz
        a, b = lo[("x", "lo")], lo[("x", "hi")]
        kernels.cpml_h_x(f.ey, f.ez, f.hy, f.hz, c.db_y, c.db_z, gx,
                         a.psi_h1, a.psi_h2, a.bh, a.ah,
                         b.psi_h1, b.psi_h2, b.bh, b.ah, t)
        a, b = lo[("y", "lo")], lo[("y", "hi")]
        kernels.cpml_h_y(f.ex, f.ez, f.hx, f.hz, c.db_x, c.db_z, gy,
                         a.psi_h1, a.psi_h2, a.bh, a.ah,
                         b.psi_h1, b.psi_h2, b.bh, b.ah, t)
        a, b = lo[("z", "lo")], lo[("z", "hi")]
        kernels.cpml_h_z(f.ex, f.ey, f.hx, f.hy, c.db_x, c.db_y, gz,
                         a.psi_h1, a.psi_h2, a.bh, a.ah,
                         b.psi_h1, b.psi_h2, b.bh, b.ah, t)

    def _apply_cpml_e(self):
        f, c = self.fields, self.coeffs
        t = self.cpml.config.thickness
        lo = self.cpml.faces
        gx, gy, gz = self._gx, self._gy, self._gz
        a, b = lo[("x", "lo")], lo[("x", "hi")]
        kernels.cpml_e_x(f.ey, f.ez, f.hy, f.hz, c.cb_y, c.cb_z, gx,
                         a.psi_e1, a.psi_e2, a.be, a.ae,
                         b.psi_e1, b.psi_e2, b.be, b.ae, t)
        a, b = lo[("y", "lo")], lo[("y", "hi")]
        kernels.cpml_e_y(f.ex, f.ez, f.hx, f.hz, c.cb_x, c.cb_z, gy,
                         a.psi_e1, a.psi_e2, a.be, a.ae,
                         b.psi_e1, b.psi_e2, b.be, b.ae, t)
        a, b = lo[("z", "lo")], lo[("z", "hi")]
        kernels.cpml_e_z(f.ex, f.ey, f.hx, f.hy, c.cb_x, c.cb_y, gz,
                         a.psi_e1, a.psi_e2, a.be, a.ae,
                         b.psi_e1, b.psi_e2, b.be, b.ae, t)

    def step(self):
        """Advance one full leapfrog iteration."""
        f, c = self.fields, self.coeffs
        kernels.update_h(f.ex, f.ey, f.ez, f.hx, f.hy, f.hz,
                         c.db_x, c.db_y, c.db_z,
                         self._inv_h["x"], self._inv_h["y"], self._inv_h["z"])
        if self.cpml is not None:
            self._apply_cpml_h()
        kernels.update_e(f.ex, f.ey, f.ez, f.hx, f.hy, f.hz,
                         c.ca_x, c.cb_x, c.ca_y, c.cb_y, c.ca_z, c.cb_z,
                         self._inv_e["x"], self._inv_e["y"], self._inv_e["z"])
        if self.cpml is not None:
            self._apply_cpml_e()

        n = f.n
        t_inject = (n + 0.5) * self.dt
        for isrc, (src, factor) in enumerate(zip(self.config.sources, self._src_factors)):
            vs = src.waveform.sample(t_inject)
            e_arr = {"x": f.ex, "y": f.ey, "z": f.ez}[src.axis]
            e_arr[src.cell] -= factor * vs
            if isrc == 0 and n < self._vt.shape[0]:
                self._vt[n] = vs

        if n < self._vt.shape[0]:
            for probe, series in zip(self.config.probes, self._probe_data):
                i, j, k = probe.cell
                series.ex[n] = f.ex[i, j, k] if self._index_ok(f.ex, i, j, k) else 0.0
                series.ey[n] = f.ey[i, j, k] if self._index_ok(f.ey, i, j, k) else 0.0
                series.ez[n] = f.ez[i, j, k] if self._index_ok(f.ez, i, j, k) else 0.0

        f.n += 1
        ce = self.config.check_every
        if ce > 0 and f.n % ce == 0:
            self._check_fields()

    @staticmethod
    def _index_ok(arr, i, j, k):
        return i < arr.shape[0] and j < arr.shape[1] and k < arr.shape[2]

    def _check_fields(self):
        f = self.fields
        m = f.max_abs()
        if not np.isfinite(m) or m > self.config.max_field or not f.all_finite():
            raise InstabilityError(f.n, f"max |field| = {m:.3e}")

    def run_steps(self, n: int):
        for _ in range(n):
            self.step()

    def run(self) -> ProbeRecords:
        self.run_steps(self.config.n_steps)
        if self.config.check_every > 0:
            self._check_fields()
        axis = self.config.sources[0].axis if self.config.sources else None
        return ProbeRecords(dt=self.dt, n_steps=self.config.n_steps,
                            source_axis=axis, vt=self._vt, probes=self._probe_data)

    # -- debug export --------------------------------------------------------

    def export_fields(self, directory):
        """Raw little-endian field dumps plus a JSON sidecar (debug aid)."""
        import pathlib

        directory = pathlib.Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {"step": self.fields.n, "dtype": np.dtype(self.config.dtype).str,
                "order": "C (z fastest)", "components": {}}
        stagger = {"ex": "x half", "ey": "y half", "ez": "z half",
                   "hx": "yz half", "hy": "xz half", "hz": "xy half"}
        for name in ("ex", "ey", "ez", "hx", "hy", "hz"):
            arr = getattr(self.fields, name)
            arr.astype("<" + np.dtype(self.config.dtype).str.lstrip("<=>")).tofile(
                directory / f"{name}.bin")
            meta["components"][name] = {"shape": list(arr.shape),
                                        "staggered": stagger[name]}
        (directory / "fields.json").write_text(json.dumps(meta, indent=2, sort_keys=True))


def run(config: SimulationConfig) -> ProbeRecords:
    """Build an engine for ``config``, execute all steps, return the records."""
    return Engine(config).run()
