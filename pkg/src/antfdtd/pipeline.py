"""End-to-end run of a single antenna: build, rasterize, simulate, extract S11."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .constants import MM
from .cpml import CpmlConfig
from .engine import SimulationConfig, run
from .errors import ConfigurationError
from .excitation import GaussianWaveform, VoltageProbe, VoltageSource
from .geometry import GeometrySpec, rasterize
from .grid import GridSpec, cfl_timestep
from .sparams import S11_DF, S11Curve, VoltageRecord, compute_s11

# default time window: pulse launch (4/fc at 2 GHz = 2 ns) plus ring-down
DEFAULT_WINDOW_S = 10e-9
FULL_WINDOW_S = 34e-9          # >= 1/30 MHz so no padding is required


@dataclass
class RunSettings:
    """Solver settings for one antenna run."""

    dx_mm: float = 0.5
    dy_mm: float = 0.5
    dz_mm: float = 0.5
    fc: float = 2e9
    rs: float = 50.0
    amplitude: float = 1.0
    safety: float = 0.99
    window_s: float | None = None          # None -> DEFAULT_WINDOW_S
    full_window: bool = False
    cpml: CpmlConfig = field(default_factory=CpmlConfig)
    dtype: type = np.float64
    check_every: int = 50
    df_target: float = S11_DF

    def resolved_window(self) -> float:
        if self.full_window:
            return max(FULL_WINDOW_S, 1.0 / self.df_target)
        return self.window_s if self.window_s is not None else DEFAULT_WINDOW_S


@dataclass
class RunResult:
    curve: S11Curve
    record: VoltageRecord
    grid: GridSpec
    feed_edge: tuple
    snap_max_error_mm: float
    n_steps: int
    dt: float


def build_simulation(geom: GeometrySpec, settings: RunSettings):
    """(SimulationConfig, feed edge, snap report) for one geometry."""
    grid = GridSpec.from_extent(*(d * MM for d in geom.domain),
                                settings.dx_mm * MM, settings.dy_mm * MM,
                                settings.dz_mm * MM)
    mats, feed_edge, snap = rasterize(geom, grid)
    dt = settings.safety * cfl_timestep(grid, 1.0)
    window = settings.resolved_window()
    n_steps = int(np.ceil(window / dt))
    min_steps = int(np.ceil(4.0 / settings.fc / dt))
    if n_steps < min_steps:
        raise ConfigurationError(
            f"time window {window * 1e9:.2f} ns is shorter than the pulse "
            f"launch time 4/fc = {4.0 / settings.fc * 1e9:.2f} ns")
    i, j, k, axis = feed_edge
    src = VoltageSource(i, j, k, axis=axis, rs=settings.rs,
                        waveform=GaussianWaveform(settings.fc, settings.amplitude))
    probe = VoltageProbe(i, j, k, name="feed")
    config = SimulationConfig(grid=grid, materials=mats, n_steps=n_steps,
                              cpml=settings.cpml, sources=[src], probes=[probe],
                              safety=settings.safety, dtype=settings.dtype,
                              check_every=settings.check_every)
    return config, feed_edge, snap


def simulate_antenna(geom: GeometrySpec, settings: RunSettings | None = None) -> RunResult:
    """Run one antenna through the full pipeline and return its S11 curve."""
    settings = settings or RunSettings()
    config, feed_edge, snap = build_simulation(geom, settings)
    records = run(config)
    rec = VoltageRecord.from_probe(records, 0, config.grid.deltas)
    curve = compute_s11(rec, settings.df_target)
    return RunResult(curve=curve, record=rec, grid=config.grid,
                     feed_edge=feed_edge, snap_max_error_mm=snap.max_error_mm,
                     n_steps=config.n_steps, dt=records.dt)
