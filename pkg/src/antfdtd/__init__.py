"""FDTD planar-antenna simulator: S11 extraction, datasets, ML prediction."""

__version__ = "0.1.0"

from .grid import (GridSpec, MaterialGrid, FieldState, UpdateCoefficients,
                   total_cells, cfl_timestep, build_coefficients)
from .cpml import CpmlConfig, CpmlState, grading_profile
from .excitation import (GaussianWaveform, VoltageSource, VoltageProbe,
                         LumpedResistor, waveform_sample, probe_voltage)
from .engine import Engine, SimulationConfig, ProbeRecords, run

__all__ = [
    "GridSpec", "MaterialGrid", "FieldState", "UpdateCoefficients",
    "total_cells", "cfl_timestep", "build_coefficients",
    "CpmlConfig", "CpmlState", "grading_profile",
    "GaussianWaveform", "VoltageSource", "VoltageProbe", "LumpedResistor",
    "waveform_sample", "probe_voltage",
    "Engine", "SimulationConfig", "ProbeRecords", "run",
    "__version__",
]
