"""Image-method specular ray tracer for box cabins with dielectric walls.

The cabin is a rectangular box with one material per face. Specular paths are
enumerated exactly by mirroring the TX across face sequences up to a maximum
reflection order. Blockers (seats, passengers) are axis-aligned boxes that act
as perfect absorbers: any path segment passing through one is dropped, and no
reflections off blocker faces are generated. Curved fuselages are approximated
by the box; only the material and occupancy axes of the scenario comparison
are synthesized.
"""

from __future__ import annotations

import cmath
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np

from .geometry import (
    SPEED_OF_LIGHT,
    mirror_point,
    point_in_box,
    segments_hit_boxes,
    spherical_angles_deg,
    wrap_azimuth_deg,
)
from .pathdata import (
    Interaction,
    MultipathComponent,
    Provenance,
    RxRecord,
    ScenarioDataset,
    classify,
)


class GeometryError(ValueError):
    """Scene configuration that cannot be traced (TX/RX outside cabin, inside a blocker, ...)."""


# --------------------------------------------------------------------------
# materials and Fresnel reflection
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Material:
    """Wall/blocker material with complex relative permittivity eps' - j eps''."""

    name: str
    permittivity: complex = 1.0 + 0.0j
    thickness_cm: float = 0.0
    is_pec: bool = False

    def __post_init__(self):
        if not self.is_pec:
            if self.permittivity.real < 1.0:
                raise ValueError(f"{self.name}: Re(eps) must be >= 1 for a dielectric")
            if self.permittivity.imag > 0.0:
                raise ValueError(f"{self.name}: loss must be stored as a negative imaginary part")


PEC_METAL = Material("metal_pec", 1.0 + 0.0j, 0.0, is_pec=True)
GLASS_CARBON = Material("glass_carbon_composite", 4.50 - 0.05j, 0.3)
HUMAN_SKIN = Material("human_skin", 19.3 - 19.5j, 0.1)
NYLON = Material("nylon", 3.01 - 0.021j, 0.25)
GLASS = Material("glass", 6.27 - 0.1469j, 0.3)

MATERIALS: dict[str, Material] = {
    m.name: m for m in (PEC_METAL, GLASS_CARBON, HUMAN_SKIN, NYLON, GLASS)
}


def fresnel_reflection(material: Material, incidence_rad: float, polarization: str) -> complex:
    """Complex reflection coefficient at a dielectric (or PEC) boundary.

    ``incidence_rad`` is measured from the surface normal, in [0, pi/2).
    TE is the field transverse to the plane of incidence, TM parallel to it.
    """
    if not (0.0 <= incidence_rad < math.pi / 2.0):
        raise ValueError(f"incidence angle {incidence_rad} outside [0, pi/2)")
    pol = polarization.upper()
    if pol not in ("TE", "TM"):
        raise ValueError(f"polarization must be TE or TM, got {polarization!r}")
    if material.is_pec:
        return complex(-1.0) if pol == "TE" else complex(1.0)
    eps = material.permittivity
    ci = math.cos(incidence_rad)
    s2 = math.sin(incidence_rad) ** 2
    root = cmath.sqrt(eps - s2)
    if pol == "TE":
        return (ci - root) / (ci + root)
    return (eps * ci - root) / (eps * ci + root)


def _fresnel_gain_db(material: Material, cos_inc: np.ndarray, pol: str) -> np.ndarray:
    """Per-bounce power gain 20*log10|Gamma| for an array of incidence cosines."""
    if material.is_pec:
        return np.zeros_like(cos_inc)
    eps = material.permittivity
    ci = cos_inc.astype(complex)
    root = np.sqrt(eps - (1.0 - cos_inc**2))
    if pol == "TE":
        gamma = (ci - root) / (ci + root)
    else:
        gamma = (eps * ci - root) / (eps * ci + root)
    mag = np.abs(gamma)
    with np.errstate(divide="ignore"):
        return 20.0 * np.log10(mag)


# --------------------------------------------------------------------------
# scene
# --------------------------------------------------------------------------

# Face name -> (axis, side); side 0 is the plane at coordinate 0, side 1 at the
# cabin dimension. Vertical TX-RX polarization maps to TM on floor/ceiling
# bounces and TE on the side and end walls.
FACES: tuple[str, ...] = ("front", "back", "left", "right", "floor", "ceiling")
_FACE_AXIS_SIDE: dict[str, tuple[int, int]] = {
    "front": (0, 0),
    "back": (0, 1),
    "left": (1, 0),
    "right": (1, 1),
    "floor": (2, 0),
    "ceiling": (2, 1),
}


def _face_polarization(face: str) -> str:
    return "TM" if face in ("floor", "ceiling") else "TE"


@dataclass(frozen=True)
class Blocker:
    """Axis-aligned absorbing box with an informational material and label."""

    min_m: tuple[float, float, float]
    max_m: tuple[float, float, float]
    material: Material = NYLON
    label: str = "Seat"

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.min_m, self.max_m)):
            raise GeometryError(f"blocker min {self.min_m} not strictly below max {self.max_m}")


@dataclass(frozen=True)
class Scene:
    """Cabin geometry, materials, blockers and the receiver grid to trace."""

    name: str
    cabin_dims_m: tuple[float, float, float]
    wall_materials: dict[str, Material]
    blockers: tuple[Blocker, ...]
    tx_position_m: tuple[float, float, float]
    rx_grid: np.ndarray
    carrier_hz: float = 28e9
    max_reflections: int = 3

    def __post_init__(self):
        object.__setattr__(self, "rx_grid", np.atleast_2d(np.asarray(self.rx_grid, dtype=float)))
        self.validate()

    def validate(self) -> None:
        if self.carrier_hz <= 0:
            raise GeometryError("carrier_hz must be positive")
        if self.max_reflections < 0:
            raise GeometryError("max_reflections must be >= 0")
        if set(self.wall_materials) != set(FACES):
            missing = set(FACES) - set(self.wall_materials)
            raise GeometryError(f"wall_materials must cover all faces, missing {sorted(missing)}")
        dims = np.asarray(self.cabin_dims_m, dtype=float)
        if np.any(dims <= 0):
            raise GeometryError("cabin dimensions must be positive")
        self._require_inside(np.asarray(self.tx_position_m), "TX")
        rx = self.rx_grid
        inside = np.all(rx > 0.0, axis=1) & np.all(rx < dims, axis=1)
        if not inside.all():
            i = int(np.nonzero(~inside)[0][0])
            raise GeometryError(f"RX {i} at {tuple(rx[i])} is not strictly inside the cabin")
        if self.blockers:
            bmin = np.array([b.min_m for b in self.blockers])
            bmax = np.array([b.max_m for b in self.blockers])
            contained = np.all(rx[:, None, :] >= bmin[None], axis=2) & np.all(
                rx[:, None, :] <= bmax[None], axis=2
            )
            if contained.any():
                i, j = map(int, np.argwhere(contained)[0])
                raise GeometryError(f"RX {i} lies inside blocker {self.blockers[j].label} {self.blockers[j].min_m}")
        too_close = np.linalg.norm(rx - np.asarray(self.tx_position_m), axis=1) < 1e-9
        if too_close.any():
            raise GeometryError(f"RX {int(np.nonzero(too_close)[0][0])} coincides with the TX")

    def _require_inside(self, p: np.ndarray, who: str) -> None:
        dims = np.asarray(self.cabin_dims_m, dtype=float)
        if not (np.all(p > 0.0) and np.all(p < dims)):
            raise GeometryError(f"{who} at {tuple(p)} is not strictly inside the cabin {tuple(dims)}")
        for b in self.blockers:
            if point_in_box(p, b.min_m, b.max_m):
                raise GeometryError(f"{who} at {tuple(p)} lies inside blocker {b.label} {b.min_m}")

    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz


def fspl_db(distance_m: float | np.ndarray, wavelength_m: float):
    """Free-space path loss 20*log10(4 pi d / lambda)."""
    return 20.0 * np.log10(4.0 * math.pi * np.asarray(distance_m, dtype=float) / wavelength_m)


# --------------------------------------------------------------------------
# image-method path enumeration
# --------------------------------------------------------------------------


def reflection_sequences(max_order: int) -> list[tuple[str, ...]]:
    """All face sequences up to max_order with no immediate face repeats.

    The empty sequence stands for the direct path. Order is deterministic:
    by reflection count, then lexicographic in FACES index.
    """
    seqs: list[tuple[str, ...]] = [()]
    for order in range(1, max_order + 1):
        for combo in itertools.product(FACES, repeat=order):
            if any(a == b for a, b in zip(combo, combo[1:])):
                continue
            seqs.append(combo)
    return seqs


@dataclass(frozen=True)
class TracedPath:
    """A traced specular path with its folded geometry, for inspection/tests."""

    faces: tuple[str, ...]
    points_m: np.ndarray  # (k + 2, 3): TX, reflection points, RX
    unfolded_length_m: float
    component: MultipathComponent

    def folded_length_m(self) -> float:
        diffs = np.diff(self.points_m, axis=0)
        return float(np.sum(np.linalg.norm(diffs, axis=1)))


_T_EPS = 1e-12
_B_EPS = 1e-12


def _trace_sequence(scene: Scene, rx: np.ndarray, seq: tuple[str, ...]):
    """Vectorized over receivers: geometry of one face sequence.

    Returns (valid mask (N,), unfolded lengths (N,), points (N, k+2, 3)).
    """
    n = rx.shape[0]
    tx = np.asarray(scene.tx_position_m, dtype=float)
    dims = np.asarray(scene.cabin_dims_m, dtype=float)
    k = len(seq)
    points = np.empty((n, k + 2, 3))
    points[:, 0, :] = tx
    points[:, -1, :] = rx
    if k == 0:
        lengths = np.linalg.norm(rx - tx, axis=1)
        return np.ones(n, dtype=bool), lengths, points

    images = []
    img = tx
    for face in seq:
        axis, side = _FACE_AXIS_SIDE[face]
        img = mirror_point(img, axis, side * dims[axis])
        images.append(img)

    valid = np.ones(n, dtype=bool)
    cur = rx
    for j in range(k - 1, -1, -1):
        axis, side = _FACE_AXIS_SIDE[seq[j]]
        plane_c = side * dims[axis]
        s = images[j]
        denom = s[axis] - cur[:, axis]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (plane_c - cur[:, axis]) / denom
        valid &= np.isfinite(t) & (t > _T_EPS) & (t < 1.0 - _T_EPS)
        t = np.where(valid, t, 0.5)  # keep the arithmetic finite on dead rows
        p = cur + t[:, None] * (s[None, :] - cur)
        p[:, axis] = plane_c
        for ax in range(3):
            if ax != axis:
                valid &= (p[:, ax] >= -_B_EPS) & (p[:, ax] <= dims[ax] + _B_EPS)
        points[:, j + 1, :] = p
        cur = p
    lengths = np.linalg.norm(rx - images[-1][None, :], axis=1)
    return valid, lengths, points


def _trace_batch(scene: Scene, rx: np.ndarray, budget, keep_points: bool):
    """Trace all receivers in one pass; returns per-RX lists of path tuples."""
    n = rx.shape[0]
    lam = scene.wavelength_m()
    base_gain = budget.tx_power_dbm + budget.gain_tx_dbi + budget.gain_rx_dbi
    box_min = np.array([b.min_m for b in scene.blockers], dtype=float).reshape(-1, 3)
    box_max = np.array([b.max_m for b in scene.blockers], dtype=float).reshape(-1, 3)

    out: list[list] = [[] for _ in range(n)]
    for seq in reflection_sequences(scene.max_reflections):
        valid, lengths, points = _trace_sequence(scene, rx, seq)
        if not valid.any():
            continue
        k = len(seq)
        if len(scene.blockers) > 0:
            blocked = np.zeros(n, dtype=bool)
            for j in range(k + 1):
                live = valid & ~blocked
                if not live.any():
                    break
                hits = segments_hit_boxes(points[live, j, :], points[live, j + 1, :], box_min, box_max)
                blocked[live] |= hits
            valid &= ~blocked
        if not valid.any():
            continue

        gains_db = np.zeros(n)
        for j, face in enumerate(seq):
            axis, _ = _FACE_AXIS_SIDE[face]
            seg = points[:, j + 1, :] - points[:, j, :]
            seg_len = np.linalg.norm(seg, axis=1)
            cos_inc = np.abs(seg[:, axis]) / np.where(seg_len > 0, seg_len, 1.0)
            cos_inc = np.clip(cos_inc, 0.0, 1.0)
            gains_db += _fresnel_gain_db(
                scene.wall_materials[face], cos_inc, _face_polarization(face)
            )

        power_dbm = base_gain - fspl_db(lengths, lam) + gains_db
        valid &= power_dbm >= budget.sensitivity_dbm
        if not valid.any():
            continue

        delay_ns = lengths / SPEED_OF_LIGHT * 1e9
        aod_az, aod_el = spherical_angles_deg(points[:, 1, :] - points[:, 0, :])
        aoa_az, aoa_el = spherical_angles_deg(points[:, -2, :] - points[:, -1, :])
        tags = (
            (Interaction.DIRECT,) if k == 0 else tuple(Interaction.REFLECT for _ in range(k))
        )
        for i in np.nonzero(valid)[0]:
            comp = MultipathComponent(
                power_dbm=float(power_dbm[i]),
                delay_ns=float(delay_ns[i]),
                aod_az_deg=float(wrap_azimuth_deg(aod_az[i])),
                aod_el_deg=float(aod_el[i]),
                aoa_az_deg=float(wrap_azimuth_deg(aoa_az[i])),
                aoa_el_deg=float(aoa_el[i]),
                interactions=tags,
            )
            if keep_points:
                out[i].append(TracedPath(seq, points[i].copy(), float(lengths[i]), comp))
            else:
                out[i].append(comp)
    return out


def _check_rx(scene: Scene, rx: np.ndarray) -> None:
    scene._require_inside(rx, "RX")


def trace_link(scene: Scene, rx: Sequence[float], budget) -> list[MultipathComponent]:
    """All specular multipath components reaching one receiver."""
    rx_arr = np.asarray(rx, dtype=float)
    _check_rx(scene, rx_arr)
    return _trace_batch(scene, rx_arr[None, :], budget, keep_points=False)[0]


def trace_link_paths(scene: Scene, rx: Sequence[float], budget) -> list[TracedPath]:
    """Like trace_link but retains reflection points for geometry checks."""
    rx_arr = np.asarray(rx, dtype=float)
    _check_rx(scene, rx_arr)
    return _trace_batch(scene, rx_arr[None, :], budget, keep_points=True)[0]


def trace_scenario(scene: Scene, budget, threads: int | None = None) -> ScenarioDataset:
    """Trace every grid receiver; deterministic, record order = grid order."""
    rx = scene.rx_grid
    if threads is not None and threads > 1 and rx.shape[0] > 1:
        chunks = np.array_split(np.arange(rx.shape[0]), min(threads * 4, rx.shape[0]))
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda idx: _trace_batch(scene, rx[idx], budget, False), chunks)
            )
        per_rx = [paths for part in parts for paths in part]
    else:
        per_rx = _trace_batch(scene, rx, budget, keep_points=False)

    tx = tuple(float(v) for v in scene.tx_position_m)
    records = []
    for i, paths in enumerate(per_rx):
        pos = tuple(float(v) for v in rx[i])
        dist = math.dist(pos, tx)
        records.append(RxRecord(i, pos, dist, tuple(paths), classify(paths)))
    return ScenarioDataset(scene.name, tx, budget, tuple(records), Provenance.SYNTHETIC)


# --------------------------------------------------------------------------
# scenario presets
# --------------------------------------------------------------------------


class ScenarioPreset(Enum):
    """Cabin variants: metal vs composite shell, occupied vs empty."""

    BL = "BL"  # metal shell, fully occupied (hyperloop-style box)
    CV = "CV"  # glass-carbon composite shell, fully occupied
    REC_V = "RecV"  # metal rectangular wagon, fully occupied
    EM_V = "EmV"  # metal shell, seats only, no passengers


_PRESET_WALLS = {
    ScenarioPreset.BL: PEC_METAL,
    ScenarioPreset.CV: GLASS_CARBON,
    ScenarioPreset.REC_V: PEC_METAL,
    ScenarioPreset.EM_V: PEC_METAL,
}


@dataclass(frozen=True)
class CabinLayout:
    """Default cabin geometry: 12 rows x 6 seats, 2400 receivers.

    Seat/passenger dimensions and the row pitch are placeholders chosen so
    receiver planes run 0.75 m ahead of each seat row without touching the
    previous row's boxes; all of them are overridable.
    """

    cabin_dims_m: tuple[float, float, float] = (13.5, 4.0, 2.4)
    rows: int = 12
    seats_per_row: int = 6
    row_pitch_m: float = 1.05
    first_row_x_m: float = 1.2
    seat_size_m: tuple[float, float, float] = (0.5, 0.5, 1.2)
    human_size_m: tuple[float, float, float] = (0.35, 0.45, 0.9)
    human_z0_m: float = 0.55
    seat_wall_gap_m: float = 0.05
    tx_standoff_m: float = 0.05
    tx_y_m: float = 1.7
    tx_z_m: float = 2.1
    rx_offset_m: float = 0.75
    rx_heights_m: tuple[float, ...] = (0.6, 0.7, 0.8, 0.9, 1.0)
    rx_lateral_step_m: float = 0.1
    rx_lateral_margin_m: float = 0.05

    def seat_centers_y(self) -> list[float]:
        if self.seats_per_row % 2:
            raise GeometryError("seats_per_row must be even (two banks)")
        per_side = self.seats_per_row // 2
        w = self.seat_size_m[1]
        width = self.cabin_dims_m[1]
        left = [self.seat_wall_gap_m + w * (i + 0.5) for i in range(per_side)]
        right = [width - y for y in reversed(left)]
        return left + right

    def row_x(self) -> list[float]:
        return [self.first_row_x_m + i * self.row_pitch_m for i in range(self.rows)]

    def rx_points(self) -> np.ndarray:
        width = self.cabin_dims_m[1]
        n_lat = int(round((width - 2 * self.rx_lateral_margin_m) / self.rx_lateral_step_m)) + 1
        lats = [self.rx_lateral_margin_m + i * self.rx_lateral_step_m for i in range(n_lat)]
        pts = [
            (x - self.rx_offset_m, y, z)
            for x in self.row_x()
            for z in self.rx_heights_m
            for y in lats
        ]
        return np.array(pts, dtype=float)

    def seat_blockers(self) -> list[Blocker]:
        sx, sy, sz = self.seat_size_m
        out = []
        for x in self.row_x():
            for y in self.seat_centers_y():
                out.append(
                    Blocker(
                        (x - sx / 2, y - sy / 2, 0.0),
                        (x + sx / 2, y + sy / 2, sz),
                        NYLON,
                        "Seat",
                    )
                )
        return out

    def human_blockers(self) -> list[Blocker]:
        hx, hy, hz = self.human_size_m
        out = []
        for x in self.row_x():
            for y in self.seat_centers_y():
                out.append(
                    Blocker(
                        (x - hx / 2, y - hy / 2, self.human_z0_m),
                        (x + hx / 2, y + hy / 2, self.human_z0_m + hz),
                        HUMAN_SKIN,
                        "Human",
                    )
                )
        return out


def build_scenario(
    preset: ScenarioPreset | str,
    layout: CabinLayout | None = None,
    *,
    max_reflections: int = 3,
    carrier_hz: float = 28e9,
    name: str | None = None,
) -> Scene:
    """Scene for one of the preset scenarios, on the shared default layout."""
    preset = ScenarioPreset(preset) if not isinstance(preset, ScenarioPreset) else preset
    layout = layout or CabinLayout()
    wall = _PRESET_WALLS[preset]
    blockers = layout.seat_blockers()
    if preset is not ScenarioPreset.EM_V:
        blockers += layout.human_blockers()
    tx = (layout.tx_standoff_m, layout.tx_y_m, layout.tx_z_m)
    return Scene(
        name=name or preset.value,
        cabin_dims_m=layout.cabin_dims_m,
        wall_materials={f: wall for f in FACES},
        blockers=tuple(blockers),
        tx_position_m=tx,
        rx_grid=layout.rx_points(),
        carrier_hz=carrier_hz,
        max_reflections=max_reflections,
    )


# --------------------------------------------------------------------------
# JSON scene config
# --------------------------------------------------------------------------


def _material_from_json(entry: dict, name: str) -> Material:
    if entry.get("pec", False):
        return Material(name, 1.0 + 0.0j, float(entry.get("thickness_cm", 0.0)), is_pec=True)
    eps = complex(float(entry["eps_re"]), float(entry["eps_im"]))
    return Material(name, eps, float(entry.get("thickness_cm", 0.0)))


def scene_from_json(source: str | Path | dict) -> tuple[Scene, dict]:
    """Build a Scene from a JSON config; returns (scene, extras).

    ``extras`` currently carries ``sensitivity_dbm`` when the config sets it,
    so the caller can fold it into the link budget.
    """
    if isinstance(source, (str, Path)):
        cfg = json.loads(Path(source).read_text())
    else:
        cfg = dict(source)

    materials = dict(MATERIALS)
    for mname, mspec in cfg.get("materials", {}).items():
        materials[mname] = _material_from_json(mspec, mname)

    def lookup(mname: str) -> Material:
        try:
            return materials[mname]
        except KeyError:
            raise GeometryError(f"unknown material {mname!r} in scene config") from None

    layout_kwargs = {}
    rx_cfg = dict(cfg.get("rx_grid", {}))
    if "rows" in rx_cfg:
        layout_kwargs["rows"] = int(rx_cfg["rows"])
    if "heights_m" in rx_cfg:
        layout_kwargs["rx_heights_m"] = tuple(float(v) for v in rx_cfg["heights_m"])
    if "lateral_step_m" in rx_cfg:
        layout_kwargs["rx_lateral_step_m"] = float(rx_cfg["lateral_step_m"])
    for key, attr in (
        ("first_row_x_m", "first_row_x_m"),
        ("row_pitch_m", "row_pitch_m"),
        ("rx_offset_m", "rx_offset_m"),
        ("lateral_margin_m", "rx_lateral_margin_m"),
    ):
        if key in rx_cfg:
            layout_kwargs[attr] = float(rx_cfg[key])
    if "cabin_dims_m" in cfg:
        layout_kwargs["cabin_dims_m"] = tuple(float(v) for v in cfg["cabin_dims_m"])
    layout = CabinLayout(**layout_kwargs)

    walls_cfg = cfg.get("walls", {})
    default_wall = lookup(walls_cfg["all"]) if "all" in walls_cfg else PEC_METAL
    wall_materials = {f: default_wall for f in FACES}
    for face, mname in walls_cfg.items():
        if face == "all":
            continue
        if face not in FACES:
            raise GeometryError(f"unknown wall face {face!r}")
        wall_materials[face] = lookup(mname)

    blockers = []
    for b in cfg.get("blockers", []):
        blockers.append(
            Blocker(
                tuple(float(v) for v in b["min_m"]),
                tuple(float(v) for v in b["max_m"]),
                lookup(b["material"]) if "material" in b else NYLON,
                str(b.get("label", "Seat")),
            )
        )

    tx = tuple(float(v) for v in cfg.get("tx_m", (layout.tx_standoff_m, layout.tx_y_m, layout.tx_z_m)))
    scene = Scene(
        name=str(cfg.get("name", "custom")),
        cabin_dims_m=layout.cabin_dims_m,
        wall_materials=wall_materials,
        blockers=tuple(blockers),
        tx_position_m=tx,
        rx_grid=layout.rx_points(),
        carrier_hz=float(cfg.get("carrier_hz", 28e9)),
        max_reflections=int(cfg.get("max_reflections", 3)),
    )
    extras = {}
    if "sensitivity_dbm" in cfg:
        extras["sensitivity_dbm"] = float(cfg["sensitivity_dbm"])
    return scene, extras
