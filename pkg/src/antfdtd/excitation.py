"""Co-located voltage source (Vs) and receiver (Rx) feed model.

The source is a Thevenin equivalent driving one E edge: an ideal voltage
source with waveform Vs(t) in series with an internal resistance Rs,
connected across the edge.  In the discrete update this splits into

  * an equivalent conductivity  sigma_src = dp / (Rs * dA)  folded into the
    edge's Ca/Cb coefficients (dp = edge length along the polarization
    axis, dA = the transverse cell face area), and
  * an impressed current density  Vs(t) / (Rs * dA)  subtracted from the
    edge each E half-step, evaluated at the half-step time (n + 1/2) dt.

With a matched lumped load (an extra sigma_src worth of conductivity on
the same edge) the edge voltage settles to Vs/2, the voltage-divider
identity behind the 1/2 factor in the reflected-signal separation.

A lumped resistor is the same conductivity device without the impressed
term.  The receiver simply records the three E components at its cell;
voltages follow from V = -E * d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

AXES = ("x", "y", "z")


def waveform_sample(fc: float, t: float, amplitude: float = 1.0) -> float:
    """Gaussian pulse value at time t: exp(-2 pi^2 fc^2 (t - 1/fc)^2)."""
    if fc <= 0:
        raise ConfigurationError(f"centre frequency must be positive, got {fc!r}")
    arg = t - 1.0 / fc
    return amplitude * math.exp(-2.0 * math.pi ** 2 * fc ** 2 * arg * arg)


@dataclass(frozen=True)
class GaussianWaveform:
    """Gaussian excitation pulse; unit peak at t = 1/fc by construction."""

    fc: float = 2e9
    amplitude: float = 1.0

    def __post_init__(self):
        if self.fc <= 0:
            raise ConfigurationError(f"fc must be positive, got {self.fc!r}")

    def sample(self, t: float) -> float:
        return waveform_sample(self.fc, t, self.amplitude)

    def sample_series(self, times: np.ndarray) -> np.ndarray:
        arg = times - 1.0 / self.fc
        return self.amplitude * np.exp(-2.0 * np.pi ** 2 * self.fc ** 2 * arg * arg)


@dataclass(frozen=True)
class VoltageSource:
    """Resistive voltage source on the E edge anchored at node (i, j, k)."""

    i: int
    j: int
    k: int
    axis: str
    rs: float = 50.0
    waveform: GaussianWaveform = field(default_factory=GaussianWaveform)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigurationError(f"source axis must be one of {AXES}, got {self.axis!r}")
        if not (self.rs > 0):
            raise ConfigurationError(f"source internal resistance must be > 0, got {self.rs!r}")

    @property
    def cell(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)


@dataclass(frozen=True)
class LumpedResistor:
    """Purely resistive load on one E edge (verification device)."""

    i: int
    j: int
    k: int
    axis: str
    resistance: float

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigurationError(f"resistor axis must be one of {AXES}, got {self.axis!r}")
        if not (self.resistance > 0):
            raise ConfigurationError(f"resistance must be > 0, got {self.resistance!r}")


@dataclass(frozen=True)
class VoltageProbe:
    """Records the three E components at node (i, j, k) every step."""

    i: int
    j: int
    k: int
    name: str = "rx"

    @property
    def cell(self) -> tuple[int, int, int]:
        return (self.i, self.j, self.k)


def edge_geometry(axis: str, dx: float, dy: float, dz: float) -> tuple[float, float]:
    """(edge length dp, transverse face area dA) for an edge along ``axis``."""
    if axis == "x":
        return dx, dy * dz
    if axis == "y":
        return dy, dx * dz
    if axis == "z":
        return dz, dx * dy
    raise ConfigurationError(f"unknown axis {axis!r}")


def source_conductivity(axis: str, resistance: float,
                        dx: float, dy: float, dz: float) -> float:
    """Equivalent edge conductivity dp/(R*dA) of a lumped resistance."""
    dp, da = edge_geometry(axis, dx, dy, dz)
    return dp / (resistance * da)


def probe_voltage(e_series: np.ndarray, edge_length: float) -> np.ndarray:
    """Edge voltage from an E-component series: V = -E * d, elementwise."""
    return -np.asarray(e_series) * edge_length
