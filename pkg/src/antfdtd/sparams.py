"""Reflection-coefficient post-processing.

The chain: probe E series -> edge voltages (V = -E d) -> reflected signal
Va = Vr - Vt/2 -> spectral ratio |FFT(Va)| / |FFT(Vt)| -> dB -> resample
onto the canonical 201-point, 30 MHz grid from 0 to 6 GHz.

Both series are zero-padded to a power of two at least 1/(df_target * dt)
samples long, so the spectral bin spacing reaches the target resolution
without running a 33 ns time window; the padded spectrum is exact for the
recorded (decayed) signal.  Bins where the excitation spectrum falls below
1e-12 of its peak are masked to the floor.  Magnitudes are clamped at
-120 dB, far below any physical feature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, CoverageError
from .excitation import probe_voltage

S11_POINTS = 201
S11_DF = 30e6
S11_FMAX = 6e9
DB_FLOOR = -120.0
_FLOOR_MAG = 10.0 ** (DB_FLOOR / 20.0)
DENOM_MASK_REL = 1e-12


def canonical_frequencies() -> np.ndarray:
    """The 201-point output grid: 0 to 6 GHz inclusive at 30 MHz spacing."""
    return np.arange(S11_POINTS) * S11_DF


@dataclass
class VoltageRecord:
    """Feed voltages of one run: excitation Vt and received Vr per axis."""

    dt: float
    vt: np.ndarray
    vr_x: np.ndarray
    vr_y: np.ndarray
    vr_z: np.ndarray
    axis: str

    def __post_init__(self):
        if not (self.dt > 0):
            raise ConfigurationError(f"dt must be positive, got {self.dt!r}")
        n = len(self.vt)
        for name in ("vr_x", "vr_y", "vr_z"):
            if len(getattr(self, name)) != n:
                raise ConfigurationError("voltage series lengths differ")
        if self.axis not in ("x", "y", "z"):
            raise ConfigurationError(f"bad polarization axis {self.axis!r}")

    @classmethod
    def from_probe(cls, records, probe_index: int, deltas) -> "VoltageRecord":
        """Build from engine ProbeRecords using V = -E d per axis."""
        p = records.probes[probe_index]
        dx, dy, dz = deltas
        return cls(dt=records.dt,
                   vt=np.asarray(records.vt, dtype=np.float64),
                   vr_x=probe_voltage(p.ex, dx),
                   vr_y=probe_voltage(p.ey, dy),
                   vr_z=probe_voltage(p.ez, dz),
                   axis=records.source_axis)

    @property
    def vr(self) -> np.ndarray:
        """Received voltage in the excitation polarization."""
        return {"x": self.vr_x, "y": self.vr_y, "z": self.vr_z}[self.axis]

    def vt_component(self, axis: str) -> np.ndarray:
        """Vt has a single polarization; other components are zero."""
        return self.vt if axis == self.axis else np.zeros_like(self.vt)


def reflected(vr: np.ndarray, vt: np.ndarray) -> np.ndarray:
    """Separate the reflected signal: Va = Vr - Vt/2."""
    vr = np.asarray(vr)
    vt = np.asarray(vt)
    if vr.shape != vt.shape:
        raise ConfigurationError(
            f"series length mismatch: {vr.shape} vs {vt.shape}")
    return vr - 0.5 * vt


def _next_pow2(n: int) -> int:
    return 1 << max(0, (int(n) - 1)).bit_length()


def s11_spectrum(rec: VoltageRecord, df_target: float = S11_DF):
    """(frequency axis, linear |S11|) from a voltage record.

    Zero-pads to a power of two giving bin spacing <= df_target.
    """
    if not (df_target > 0):
        raise ConfigurationError(f"df_target must be positive, got {df_target!r}")
    va = reflected(rec.vr, rec.vt)
    n_min = int(np.ceil(1.0 / (df_target * rec.dt)))
    n_pad = _next_pow2(max(n_min, len(va)))
    fa = np.abs(np.fft.rfft(va, n_pad))
    ft = np.abs(np.fft.rfft(rec.vt, n_pad))
    peak = ft.max()
    masked = ft < DENOM_MASK_REL * peak if peak > 0 else np.ones_like(ft, bool)
    mag = np.divide(fa, ft, out=np.zeros_like(fa), where=~masked)
    mag[masked] = 0.0
    freqs = np.fft.rfftfreq(n_pad, rec.dt)
    return freqs, mag


def to_db(mag) -> np.ndarray:
    """20 log10 of a linear magnitude, clamped below at -120 dB."""
    mag = np.asarray(mag, dtype=np.float64)
    if np.any(mag < 0):
        raise ConfigurationError("magnitude must be non-negative")
    return 20.0 * np.log10(np.maximum(mag, _FLOOR_MAG))


@dataclass
class S11Curve:
    """201-point reflection magnitude spectrum, 0 to 6 GHz, in dB."""

    frequencies: np.ndarray
    magnitude_db: np.ndarray

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=np.float64)
        self.magnitude_db = np.asarray(self.magnitude_db, dtype=np.float64)
        if self.frequencies.shape != (S11_POINTS,) \
                or self.magnitude_db.shape != (S11_POINTS,):
            raise ConfigurationError(
                f"S11 curve must have exactly {S11_POINTS} points")
        if not np.array_equal(self.frequencies, canonical_frequencies()):
            raise ConfigurationError(
                "S11 frequency axis must be 0:30 MHz:6 GHz exactly")
        if not np.isfinite(self.magnitude_db).all():
            raise ConfigurationError("S11 magnitudes must be finite")
        if self.magnitude_db.min() < DB_FLOOR - 1e-9:
            raise ConfigurationError(f"S11 magnitudes must be >= {DB_FLOOR} dB")


def resample_201(freqs: np.ndarray, mag: np.ndarray) -> S11Curve:
    """Linear interpolation of the linear magnitude onto the canonical grid."""
    freqs = np.asarray(freqs)
    mag = np.asarray(mag)
    if freqs[0] > 0 or freqs[-1] < S11_FMAX:
        raise CoverageError(
            f"spectrum covers {freqs[0]:.3g}..{freqs[-1]:.3g} Hz, "
            f"needs 0..{S11_FMAX:.3g} Hz")
    grid = canonical_frequencies()
    resampled = np.interp(grid, freqs, mag)
    return S11Curve(grid, to_db(resampled))


def compute_s11(rec: VoltageRecord, df_target: float = S11_DF) -> S11Curve:
    """Full chain: reflected separation, spectrum, resample, dB."""
    freqs, mag = s11_spectrum(rec, df_target)
    return resample_201(freqs, mag)


def resonance_minimum(curve: S11Curve, band: tuple[float, float] = (0.0, S11_FMAX)):
    """(frequency, dB) of the deepest point within ``band``; ties go low."""
    lo, hi = band
    if lo > hi or lo < 0 or hi > S11_FMAX:
        raise ConfigurationError(f"band {band} must lie within 0..{S11_FMAX} Hz")
    sel = (curve.frequencies >= lo) & (curve.frequencies <= hi)
    if not sel.any():
        raise ConfigurationError(f"band {band} contains no grid points")
    idx = np.flatnonzero(sel)
    best = idx[np.argmin(curve.magnitude_db[idx])]
    return float(curve.frequencies[best]), float(curve.magnitude_db[best])


def write_s11_csv(curve: S11Curve, path) -> None:
    lines = ["freq_hz,s11_db"]
    for f, db in zip(curve.frequencies, curve.magnitude_db):
        lines.append(f"{f:.1f},{db:.6f}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_s11_csv(path) -> S11Curve:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return S11Curve(data[:, 0], data[:, 1])


def write_probe_csv(rec: VoltageRecord, path) -> None:
    """Time-domain feed record: time, Vt, Vr per polarization."""
    lines = ["time_s,vt_v,vr_x_v,vr_y_v,vr_z_v"]
    for n in range(len(rec.vt)):
        t = (n + 1) * rec.dt
        lines.append(f"{t:.9e},{rec.vt[n]:.9e},{rec.vr_x[n]:.9e},"
                     f"{rec.vr_y[n]:.9e},{rec.vr_z[n]:.9e}")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
