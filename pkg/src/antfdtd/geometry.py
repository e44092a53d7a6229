"""Parametric antenna families and their rasterization onto the Yee grid.

All three families are planar: PEC trace rectangles on the top face of an
FR-4 substrate block, fed in series through a one-cell gap.  Geometry is
described in millimetres in domain coordinates; ``rasterize`` snaps every
extent to the nearest cell boundary (round half away from zero) and
reports the snap errors.

Feed handling: the feed is a short segment bridging two conductors.  At
rasterization it maps to exactly one E edge (the one nearest the segment
midpoint); any remaining edges in the gap are filled with PEC so the
electrical gap is always one cell regardless of the grid.  A grid too
coarse to leave at least one edge in the gap is a rasterization error.

Layout constants that the figures do not dimension (ground height, feed
offset, bus widths, ...) are fields of the layout dataclasses and can be
overridden per build; the defaults are chosen so that every extent is a
multiple of 0.5 mm.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields, replace, asdict

import numpy as np

from .constants import MM
from .errors import BuildError, ConfigurationError, RasterizationError
from .grid import GridSpec, MaterialGrid

FAMILIES = ("ifa", "dual_band_ifa", "multiband_dipole")

FAMILY_PARAMS = {
    "ifa": ("a1", "s1"),
    "dual_band_ifa": ("a1", "a2", "s1", "s2"),
    "multiband_dipole": ("a1", "a2", "a3", "a4"),
}

FAMILY_DEFAULTS = {
    "ifa": (30.0, 12.0),
    "dual_band_ifa": (30.0, 46.0, 12.0, 8.0),
    "multiband_dipole": (40.0, 25.0, 35.0, 15.0),
}


@dataclass(frozen=True)
class PecRect:
    """Axis-aligned PEC sheet in a constant-z plane (mm)."""

    x0: float
    x1: float
    y0: float
    y1: float
    z: float
    role: str = "trace"

    def __post_init__(self):
        if self.x1 < self.x0 or self.y1 < self.y0:
            raise BuildError(f"degenerate rect {self.role}: {self}")


@dataclass(frozen=True)
class SubstrateBox:
    """Dielectric block (mm) with relative permittivity and conductivity."""

    x0: float
    x1: float
    y0: float
    y1: float
    z0: float
    z1: float
    eps_r: float = 4.4
    sigma: float = 0.004


@dataclass(frozen=True)
class FeedSegment:
    """Feed gap segment: starts at (x, y, z) and runs ``length`` along ``axis``."""

    x: float
    y: float
    z: float
    axis: str
    length: float

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise BuildError(f"feed axis must be x, y or z, got {self.axis!r}")
        if self.length <= 0:
            raise BuildError(f"feed length must be positive, got {self.length}")


@dataclass
class GeometrySpec:
    """One buildable antenna: domain, substrate, traces and feed (all mm)."""

    domain: tuple[float, float, float]
    substrate: SubstrateBox | None
    rects: list[PecRect]
    feed: FeedSegment
    family: str = ""
    params: dict = field(default_factory=dict)

    def trace_bbox(self) -> tuple[float, float, float, float]:
        """(x0, x1, y0, y1) over antenna traces, ground plane excluded."""
        rs = [r for r in self.rects if r.role != "ground"]
        if not rs:
            raise BuildError("geometry has no antenna traces")
        return (min(r.x0 for r in rs), max(r.x1 for r in rs),
                min(r.y0 for r in rs), max(r.y1 for r in rs))

    def to_json(self) -> dict:
        return {
            "domain_mm": list(self.domain),
            "substrate": None if self.substrate is None else asdict(self.substrate),
            "pec_rects": [asdict(r) for r in self.rects],
            "feed": asdict(self.feed),
            "family": self.family,
            "params_mm": dict(self.params),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "GeometrySpec":
        sub = doc.get("substrate")
        return cls(domain=tuple(doc["domain_mm"]),
                   substrate=None if sub is None else SubstrateBox(**sub),
                   rects=[PecRect(**r) for r in doc["pec_rects"]],
                   feed=FeedSegment(**doc["feed"]),
                   family=doc.get("family", ""),
                   params=dict(doc.get("params_mm", {})))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


# --- layouts ----------------------------------------------------------------

@dataclass(frozen=True)
class IfaLayout:
    """Board and trace constants shared by the IFA families (mm)."""

    board_w: float = 50.0
    board_h: float = 40.0
    board_th: float = 1.0
    eps_r: float = 4.4
    sigma: float = 0.004
    ground_h: float = 20.0
    arm_x0: float = 2.0       # short-line x position on the board
    trace_w: float = 1.0
    short_w: float = 1.0
    feed_w: float = 2.0       # coplanar feed line width
    feed_short_gap: float = 16.0   # tunes the match; default centres the dip near 2.6 GHz
    feed_gap: float = 1.0     # series gap bridged by the source
    domain: tuple = (80.0, 80.0, 40.0)


@dataclass(frozen=True)
class DipoleLayout:
    """Board and trace constants of the multi-band dipole (mm)."""

    board_w: float = 20.0
    board_h: float = 90.0
    board_th: float = 1.0
    eps_r: float = 4.4
    sigma: float = 0.004
    trace_w: float = 1.0
    pitch: float = 4.0        # x spacing between adjacent dipole pairs
    arm_x0: float = 3.0
    bus_w: float = 1.0        # width of the two feed buses
    feed_gap: float = 1.0
    feed_x_offset: float = 7.0
    domain: tuple = (80.0, 140.0, 28.0)


def _make_layout(cls, overrides: dict):
    if not overrides:
        return cls()
    known = {f.name for f in fields(cls)}
    bad = set(overrides) - known
    if bad:
        raise ConfigurationError(f"unknown layout override(s): {sorted(bad)}")
    ov = dict(overrides)
    if "domain" in ov:
        ov["domain"] = tuple(ov["domain"])
    return cls(**ov)


def _require_positive(**values):
    for name, v in values.items():
        if not (v > 0):
            raise BuildError(f"parameter {name} must be positive, got {v}")


def _board_origin(layout, domain):
    ox = (domain[0] - layout.board_w) / 2.0
    oy = (domain[1] - layout.board_h) / 2.0
    oz = math.floor((domain[2] - layout.board_th) / 2.0)
    return ox, oy, oz


def _board_and_substrate(layout):
    domain = layout.domain
    ox, oy, oz = _board_origin(layout, domain)
    sub = SubstrateBox(ox, ox + layout.board_w, oy, oy + layout.board_h,
                       oz, oz + layout.board_th,
                       eps_r=layout.eps_r, sigma=layout.sigma)
    zp = oz + layout.board_th          # metal plane
    return domain, (ox, oy), sub, zp


def _check_extent(name: str, value: float, limit: float, what: str):
    if value > limit + 1e-9:
        raise BuildError(
            f"{name} violates containment: {what} reaches {value:.3f} mm, "
            f"board allows {limit:.3f} mm")


def build_ifa(a1: float = 30.0, s1: float = 12.0, **overrides) -> GeometrySpec:
    """Coplanar-waveguide-fed inverted-F antenna.

    The top arm of length ``a1`` sits ``s1`` above the ground plane; a
    short line ties its left end to ground and the feed line rises from
    the series gap at the ground edge to the arm.
    """
    lay = _make_layout(IfaLayout, overrides)
    _require_positive(a1=a1, s1=s1)
    min_a1 = lay.short_w + lay.feed_short_gap + lay.feed_w
    if a1 < min_a1:
        raise BuildError(f"a1 = {a1} mm is too short to reach the feed line "
                         f"(needs >= {min_a1} mm)")
    _check_extent("a1", lay.arm_x0 + a1, lay.board_w, "arm tip")
    _check_extent("s1", lay.ground_h + s1 + lay.trace_w, lay.board_h, "arm top")

    domain, (ox, oy), sub, zp = _board_and_substrate(lay)
    g = oy + lay.ground_h
    arm_y = g + s1
    x0 = ox + lay.arm_x0
    fx0 = x0 + lay.short_w + lay.feed_short_gap
    rects = [
        PecRect(ox, ox + lay.board_w, oy, g, zp, role="ground"),
        PecRect(x0, x0 + lay.short_w, g, arm_y + lay.trace_w, zp, role="short"),
        PecRect(x0, x0 + a1, arm_y, arm_y + lay.trace_w, zp, role="arm1"),
        PecRect(fx0, fx0 + lay.feed_w, g + lay.feed_gap, arm_y, zp, role="feed"),
    ]
    feed = FeedSegment(fx0 + lay.feed_w / 2.0, g, zp, "y", lay.feed_gap)
    return GeometrySpec(domain=domain, substrate=sub, rects=rects, feed=feed,
                        family="ifa", params={"a1": a1, "s1": s1})


def build_dual_band_ifa(a1: float = 30.0, a2: float = 46.0,
                        s1: float = 12.0, s2: float = 8.0,
                        **overrides) -> GeometrySpec:
    """IFA with an extra arm: ``a2`` at height ``s2`` below the top arm.

    Both arms join the short line; the feed line rises to the lower arm,
    so the gap between feed and the upper arm is bridged only through the
    shorting stem.
    """
    lay = _make_layout(IfaLayout, overrides)
    _require_positive(a1=a1, a2=a2, s1=s1, s2=s2)
    min_arm = lay.short_w + lay.feed_short_gap + lay.feed_w
    if a2 < min_arm:
        raise BuildError(f"a2 = {a2} mm is too short to reach the feed line "
                         f"(needs >= {min_arm} mm)")
    if s2 + lay.trace_w > s1:
        raise BuildError(f"arms overlap: need s2 + trace width <= s1 "
                         f"({s2} + {lay.trace_w} > {s1})")
    if s2 <= lay.feed_gap:
        raise BuildError(f"s2 = {s2} mm leaves no room above the feed gap")
    _check_extent("a1", lay.arm_x0 + a1, lay.board_w, "arm-1 tip")
    _check_extent("a2", lay.arm_x0 + a2, lay.board_w, "arm-2 tip")
    _check_extent("s1", lay.ground_h + s1 + lay.trace_w, lay.board_h, "arm-1 top")

    domain, (ox, oy), sub, zp = _board_and_substrate(lay)
    g = oy + lay.ground_h
    x0 = ox + lay.arm_x0
    fx0 = x0 + lay.short_w + lay.feed_short_gap
    y1 = g + s1
    y2 = g + s2
    rects = [
        PecRect(ox, ox + lay.board_w, oy, g, zp, role="ground"),
        PecRect(x0, x0 + lay.short_w, g, y1 + lay.trace_w, zp, role="short"),
        PecRect(x0, x0 + a1, y1, y1 + lay.trace_w, zp, role="arm1"),
        PecRect(x0, x0 + a2, y2, y2 + lay.trace_w, zp, role="arm2"),
        PecRect(fx0, fx0 + lay.feed_w, g + lay.feed_gap, y2, zp, role="feed"),
    ]
    feed = FeedSegment(fx0 + lay.feed_w / 2.0, g, zp, "y", lay.feed_gap)
    return GeometrySpec(domain=domain, substrate=sub, rects=rects, feed=feed,
                        family="dual_band_ifa",
                        params={"a1": a1, "a2": a2, "s1": s1, "s2": s2})


def build_multiband_dipole(a1: float = 40.0, a2: float = 25.0,
                           a3: float = 35.0, a4: float = 15.0,
                           **overrides) -> GeometrySpec:
    """Four dipole pairs on a shared central feed.

    Pair i has mirror-symmetric arms of half-length a_i running along y,
    tied together by two horizontal buses separated by the feed gap.
    """
    lay = _make_layout(DipoleLayout, overrides)
    arms = (a1, a2, a3, a4)
    _require_positive(a1=a1, a2=a2, a3=a3, a4=a4)
    span = 3 * lay.pitch + lay.trace_w
    _check_extent("arms", lay.arm_x0 + span, lay.board_w, "pair row")
    yc = math.floor((lay.board_h - lay.feed_gap) / 2.0)
    top_base = yc + lay.feed_gap + lay.bus_w
    bot_base = yc - lay.bus_w
    for i, a in enumerate(arms, start=1):
        _check_extent(f"a{i}", top_base + a, lay.board_h, f"upper arm {i} tip")
        if bot_base - a < -1e-9:
            raise BuildError(f"a{i} violates containment: lower arm {i} reaches "
                             f"{bot_base - a:.3f} mm below the board")

    domain, (ox, oy), sub, zp = _board_and_substrate(lay)
    x0 = ox + lay.arm_x0
    rects = [
        PecRect(x0, x0 + span, oy + bot_base, oy + yc, zp, role="bus_lo"),
        PecRect(x0, x0 + span, oy + yc + lay.feed_gap,
                oy + top_base, zp, role="bus_hi"),
    ]
    for i, a in enumerate(arms):
        ax0 = x0 + i * lay.pitch
        rects.append(PecRect(ax0, ax0 + lay.trace_w,
                             oy + top_base, oy + top_base + a, zp,
                             role=f"arm{i + 1}_up"))
        rects.append(PecRect(ax0, ax0 + lay.trace_w,
                             oy + bot_base - a, oy + bot_base, zp,
                             role=f"arm{i + 1}_dn"))
    feed = FeedSegment(x0 + lay.feed_x_offset, oy + yc, zp, "y", lay.feed_gap)
    return GeometrySpec(domain=domain, substrate=sub, rects=rects, feed=feed,
                        family="multiband_dipole",
                        params={"a1": a1, "a2": a2, "a3": a3, "a4": a4})


def build_strip_dipole(length: float = 60.0, *, trace_w: float = 1.0,
                       feed_gap: float = 1.0,
                       clearance: float = 15.0) -> GeometrySpec:
    """Straight strip dipole in free space (solver validation geometry).

    ``length`` is the total tip-to-tip extent including the feed gap;
    ``clearance`` is added on every side to form the domain.
    """
    _require_positive(length=length, trace_w=trace_w,
                      feed_gap=feed_gap, clearance=clearance)
    if length <= feed_gap:
        raise BuildError("dipole length must exceed the feed gap")
    domain = (trace_w + 2 * clearance, length + 2 * clearance, 2 * clearance)
    xc = math.floor((domain[0] - trace_w) / 2.0)
    zp = math.floor(domain[2] / 2.0)
    yc = math.floor((domain[1] - feed_gap) / 2.0)
    half = (length - feed_gap) / 2.0
    rects = [
        PecRect(xc, xc + trace_w, yc - half, yc, zp, role="arm_dn"),
        PecRect(xc, xc + trace_w, yc + feed_gap, yc + feed_gap + half, zp,
                role="arm_up"),
    ]
    feed = FeedSegment(xc, yc, zp, "y", feed_gap)
    return GeometrySpec(domain=domain, substrate=None, rects=rects, feed=feed,
                        family="strip_dipole", params={"length": length})


@dataclass(frozen=True)
class AntennaSpec:
    """A family name plus its parameter vector (mm) and layout overrides."""

    family: str
    params: tuple
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(
                f"unknown family {self.family!r}; expected one of {FAMILIES}")
        expected = len(FAMILY_PARAMS[self.family])
        if len(self.params) != expected:
            raise ConfigurationError(
                f"{self.family} takes {expected} parameters "
                f"{FAMILY_PARAMS[self.family]}, got {len(self.params)}")

    @classmethod
    def with_defaults(cls, family: str, **overrides) -> "AntennaSpec":
        return cls(family, FAMILY_DEFAULTS[family], overrides)

    def build(self) -> GeometrySpec:
        builder = {"ifa": build_ifa,
                   "dual_band_ifa": build_dual_band_ifa,
                   "multiband_dipole": build_multiband_dipole}[self.family]
        return builder(*self.params, **self.overrides)


# --- rasterization -----------------------------------------------------------

@dataclass(frozen=True)
class SnapEntry:
    label: str
    axis: str
    requested_mm: float
    snapped_mm: float

    @property
    def error_mm(self) -> float:
        return abs(self.snapped_mm - self.requested_mm)


@dataclass
class SnapReport:
    entries: list

    @property
    def max_error_mm(self) -> float:
        return max((e.error_mm for e in self.entries), default=0.0)

    def max_error_by_axis(self) -> dict:
        out = {"x": 0.0, "y": 0.0, "z": 0.0}
        for e in self.entries:
            out[e.axis] = max(out[e.axis], e.error_mm)
        return out


def _snap(v_mm: float, d_mm: float) -> int:
    return int(math.floor(v_mm / d_mm + 0.5))


def rasterize(geom: GeometrySpec, grid: GridSpec):
    """Map a geometry onto ``grid``: (MaterialGrid, feed edge, SnapReport).

    The feed edge is returned as (i, j, k, axis); extra edges in the feed
    gap are PEC-filled so the gap is exactly one cell.
    """
    dmm = tuple(d / MM for d in grid.deltas)
    ext = tuple(n * d for n, d in zip((grid.nx, grid.ny, grid.nz), dmm))
    for a, (have, want) in enumerate(zip(ext, geom.domain)):
        if abs(have - want) > 1e-6:
            raise RasterizationError(
                f"grid extent {have} mm does not match geometry domain "
                f"{want} mm along {'xyz'[a]}")

    entries = []

    def snap(label, axis, v):
        d = dmm["xyz".index(axis)]
        idx = _snap(v, d)
        entries.append(SnapEntry(label, axis, v, idx * d))
        return idx

    shape = (grid.nx, grid.ny, grid.nz)
    eps = np.ones(shape)
    mu = np.ones(shape)
    sig = np.zeros(shape)
    if geom.substrate is not None:
        s = geom.substrate
        i0 = snap("substrate.x0", "x", s.x0)
        i1 = snap("substrate.x1", "x", s.x1)
        j0 = snap("substrate.y0", "y", s.y0)
        j1 = snap("substrate.y1", "y", s.y1)
        k0 = snap("substrate.z0", "z", s.z0)
        k1 = snap("substrate.z1", "z", s.z1)
        eps[i0:i1, j0:j1, k0:k1] = s.eps_r
        sig[i0:i1, j0:j1, k0:k1] = s.sigma

    pec = {a: np.zeros(grid.shape_e(a), dtype=bool) for a in "xyz"}
    for n, r in enumerate(geom.rects):
        tag = f"{r.role or 'rect'}[{n}]"
        i0 = snap(f"{tag}.x0", "x", r.x0)
        i1 = snap(f"{tag}.x1", "x", r.x1)
        j0 = snap(f"{tag}.y0", "y", r.y0)
        j1 = snap(f"{tag}.y1", "y", r.y1)
        k = snap(f"{tag}.z", "z", r.z)
        pec["x"][i0:i1, j0:j1 + 1, k] = True
        pec["y"][i0:i1 + 1, j0:j1, k] = True

    feed = geom.feed
    ax = feed.axis
    fixed = [a for a in "xyz" if a != ax]
    start = {"x": feed.x, "y": feed.y, "z": feed.z}
    idx = {a: snap(f"feed.{a}", a, start[a]) for a in fixed}
    g0 = snap(f"feed.{ax}0", ax, start[ax])
    g1 = snap(f"feed.{ax}1", ax, start[ax] + feed.length)
    n_edges = g1 - g0
    if n_edges < 1:
        raise RasterizationError(
            f"feed gap of {feed.length} mm collapses to zero cells at "
            f"d{ax} = {dmm['xyz'.index(ax)]} mm; grid too coarse for this geometry")
    g_src = g0 + (n_edges - 1) // 2
    mask = pec[ax]
    for g in range(g0, g1):
        e_idx = tuple(g if a == ax else idx[a] for a in "xyz")
        if g == g_src:
            if mask[e_idx]:
                raise RasterizationError(f"feed edge {e_idx} is covered by PEC")
        else:
            mask[e_idx] = True
    feed_edge = tuple(g_src if a == ax else idx[a] for a in "xyz") + (ax,)

    mats = MaterialGrid(grid, eps, mu, sig,
                        pec_x=pec["x"], pec_y=pec["y"], pec_z=pec["z"])
    return mats, feed_edge, SnapReport(entries)


def pec_components(materials: MaterialGrid) -> int:
    """Number of electrically connected PEC groups (edge-adjacency flood fill)."""
    parent: dict[int, int] = {}

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(a, b):
        for n in (a, b):
            if n not in parent:
                parent[n] = n
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    g = materials.grid
    sy = g.nz + 2
    sx = (g.ny + 2) * sy

    def node_id(i, j, k):
        return i * sx + j * sy + k

    offsets = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
    for axis in "xyz":
        mask = {"x": materials.pec_x, "y": materials.pec_y,
                "z": materials.pec_z}[axis]
        if mask is None:
            continue
        di, dj, dk = offsets[axis]
        for i, j, k in np.argwhere(mask):
            union(node_id(i, j, k), node_id(i + di, j + dj, k + dk))

    return len({find(n) for n in parent})
