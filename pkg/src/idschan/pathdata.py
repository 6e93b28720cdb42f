"""Multipath data model, dataset CSV (de)serialization, and condition classification.

A dataset is a CSV with one row per (receiver, path) plus a JSON sidecar
``<name>.meta.json`` carrying the scenario name, TX position, link budget and
provenance. Receivers with no paths (outage) appear as a single row with an
empty interaction field and ``power_dbm = -INF``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .linksim import LinkBudget


class Interaction(Enum):
    """Per-path interaction tags; values are the single-letter CSV codes."""

    DIRECT = "L"
    REFLECT = "R"
    DIFFRACT = "D"
    DIFFUSE_SCATTER = "S"


class Condition(Enum):
    LOS = "LOS"
    NLOS = "NLOS"
    DS = "DS"
    OUTAGE = "Outage"


class Provenance(Enum):
    SYNTHETIC = "Synthetic"
    INGESTED = "Ingested"


class DatasetFormatError(ValueError):
    """Malformed dataset file (bad row, bad sidecar); message names the location."""


class DatasetValidationError(ValueError):
    """Well-formed file whose values violate a data-model invariant."""


def dbm_to_mw(p_dbm: float) -> float:
    return 10.0 ** (p_dbm / 10.0)


def mw_to_dbm(p_mw: float) -> float:
    if p_mw <= 0.0:
        return -math.inf
    return 10.0 * math.log10(p_mw)


@dataclass(frozen=True, slots=True)
class MultipathComponent:
    """One ray path at a receiver.

    Powers are stored in dBm; every statistic converts to linear milliwatts
    at a single point (:func:`dbm_to_mw`). Azimuths live in (-180, 180],
    elevations in [-90, 90], delays are strictly positive nanoseconds.
    """

    power_dbm: float
    delay_ns: float
    aod_az_deg: float
    aod_el_deg: float
    aoa_az_deg: float
    aoa_el_deg: float
    interactions: tuple[Interaction, ...]

    def __post_init__(self):
        if not math.isfinite(self.power_dbm):
            raise DatasetValidationError(f"non-finite power_dbm {self.power_dbm!r}")
        if not (self.delay_ns > 0.0 and math.isfinite(self.delay_ns)):
            raise DatasetValidationError(f"delay_ns must be > 0, got {self.delay_ns!r}")
        for name in ("aod_az_deg", "aoa_az_deg"):
            v = getattr(self, name)
            if not (-180.0 < v <= 180.0):
                raise DatasetValidationError(f"{name}={v!r} outside (-180, 180]")
        for name in ("aod_el_deg", "aoa_el_deg"):
            v = getattr(self, name)
            if not (-90.0 <= v <= 90.0):
                raise DatasetValidationError(f"{name}={v!r} outside [-90, 90]")
        if not self.interactions:
            raise DatasetValidationError("interactions list must not be empty")
        if Interaction.DIRECT in self.interactions and self.interactions != (Interaction.DIRECT,):
            raise DatasetValidationError("Direct must appear alone in interactions")

    @property
    def power_mw(self) -> float:
        return dbm_to_mw(self.power_dbm)

    def is_direct(self) -> bool:
        return self.interactions == (Interaction.DIRECT,)


def classify(paths: Sequence[MultipathComponent]) -> Condition:
    """Propagation condition from interaction tags alone.

    LOS when a pure direct path is present, DS when every path involves
    diffuse scattering, Outage when there are no paths, NLOS otherwise.
    """
    if len(paths) == 0:
        return Condition.OUTAGE
    if any(p.is_direct() for p in paths):
        return Condition.LOS
    if all(Interaction.DIFFUSE_SCATTER in p.interactions for p in paths):
        return Condition.DS
    return Condition.NLOS


@dataclass(frozen=True, slots=True)
class RxRecord:
    """A receiver position with its path list and propagation condition."""

    rx_id: int
    position_m: tuple[float, float, float]
    distance_3d_m: float
    paths: tuple[MultipathComponent, ...]
    condition: Condition

    def __post_init__(self):
        expected = classify(self.paths)
        if self.condition is not expected:
            raise DatasetValidationError(
                f"rx {self.rx_id}: condition {self.condition} inconsistent with paths ({expected})"
            )

    @property
    def total_power_mw(self) -> float:
        return math.fsum(p.power_mw for p in self.paths)


def make_record(
    rx_id: int,
    position_m: Sequence[float],
    tx_position_m: Sequence[float],
    paths: Iterable[MultipathComponent],
) -> RxRecord:
    """Build a record with the distance and condition derived, not trusted."""
    pos = tuple(float(v) for v in position_m)
    dist = math.dist(pos, tuple(float(v) for v in tx_position_m))
    paths = tuple(paths)
    return RxRecord(rx_id, pos, dist, paths, classify(paths))


@dataclass(frozen=True)
class ScenarioDataset:
    """All receiver records of one scenario plus the producing configuration."""

    scenario_name: str
    tx_position_m: tuple[float, float, float]
    link_budget: "LinkBudget"
    records: tuple[RxRecord, ...]
    provenance: Provenance

    def __post_init__(self):
        seen: set[int] = set()
        for rec in self.records:
            if rec.rx_id in seen:
                raise DatasetValidationError(f"duplicate rx_id {rec.rx_id}")
            seen.add(rec.rx_id)
            d = math.dist(rec.position_m, self.tx_position_m)
            if abs(d - rec.distance_3d_m) > 1e-6:
                raise DatasetValidationError(
                    f"rx {rec.rx_id}: distance_3d_m {rec.distance_3d_m} != TX-RX distance {d}"
                )

    def records_of(self, condition: Condition) -> list[RxRecord]:
        return [r for r in self.records if r.condition is condition]


CSV_COLUMNS = (
    "rx_id",
    "rx_x_m",
    "rx_y_m",
    "rx_z_m",
    "power_dbm",
    "delay_ns",
    "aod_az_deg",
    "aod_el_deg",
    "aoa_az_deg",
    "aoa_el_deg",
    "interactions",
)

_NEG_INF_TOKEN = "-INF"


def meta_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".meta.json")


def _fmt(x: float) -> str:
    return repr(float(x))


def _interactions_str(path: MultipathComponent) -> str:
    return "+".join(tag.value for tag in path.interactions)


def save_dataset(ds: ScenarioDataset, path: str | Path) -> None:
    """Write the CSV and its JSON sidecar; round-trips losslessly."""
    path = Path(path)
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in ds.records:
            x, y, z = (_fmt(v) for v in rec.position_m)
            if not rec.paths:
                w.writerow([rec.rx_id, x, y, z, _NEG_INF_TOKEN, "0.0", "0.0", "0.0", "0.0", "0.0", ""])
                continue
            for p in rec.paths:
                w.writerow(
                    [
                        rec.rx_id,
                        x,
                        y,
                        z,
                        _fmt(p.power_dbm),
                        _fmt(p.delay_ns),
                        _fmt(p.aod_az_deg),
                        _fmt(p.aod_el_deg),
                        _fmt(p.aoa_az_deg),
                        _fmt(p.aoa_el_deg),
                        _interactions_str(p),
                    ]
                )
    meta = {
        "scenario_name": ds.scenario_name,
        "tx_position_m": list(ds.tx_position_m),
        "link_budget": ds.link_budget.to_dict(),
        "provenance": ds.provenance.value,
    }
    with open(meta_path(path), "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def _parse_float(token: str, line_no: int, column: str) -> float:
    if token.strip().upper() in ("-INF", "-INFINITY"):
        return -math.inf
    try:
        return float(token)
    except ValueError:
        raise DatasetFormatError(f"line {line_no}: bad {column} value {token!r}") from None


def _parse_interactions(token: str, line_no: int) -> tuple[Interaction, ...]:
    token = token.strip()
    if not token:
        return ()
    tags = []
    for part in token.split("+"):
        try:
            tags.append(Interaction(part.strip()))
        except ValueError:
            raise DatasetFormatError(f"line {line_no}: unknown interaction tag {part!r}") from None
    return tuple(tags)


def load_dataset(path: str | Path) -> ScenarioDataset:
    """Read a dataset CSV + sidecar, recomputing every record's condition.

    Any condition column in third-party exports is ignored; classification is
    always recomputed from the interaction tags.
    """
    from .linksim import LinkBudget

    path = Path(path)
    if not path.exists():
        raise DatasetFormatError(f"no such dataset file: {path}")
    mpath = meta_path(path)
    if not mpath.exists():
        raise DatasetFormatError(f"missing sidecar {mpath.name} next to {path.name}")
    try:
        meta = json.loads(mpath.read_text())
        scenario_name = str(meta["scenario_name"])
        tx = tuple(float(v) for v in meta["tx_position_m"])
        budget = LinkBudget.from_dict(meta.get("link_budget", {}))
        provenance = Provenance(meta.get("provenance", "Ingested"))
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormatError(f"{mpath.name}: {exc}") from None
    if len(tx) != 3:
        raise DatasetFormatError(f"{mpath.name}: tx_position_m must have 3 entries")

    order: list[int] = []
    positions: dict[int, tuple[float, float, float]] = {}
    paths_by_rx: dict[int, list[MultipathComponent]] = {}
    outage_rx: set[int] = set()

    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetFormatError("line 1: empty file, expected header") from None
        if tuple(h.strip() for h in header[: len(CSV_COLUMNS)]) != CSV_COLUMNS:
            raise DatasetFormatError("line 1: unexpected header columns")
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < len(CSV_COLUMNS):
                raise DatasetFormatError(f"line {line_no}: expected {len(CSV_COLUMNS)} columns, got {len(row)}")
            try:
                rx_id = int(row[0])
            except ValueError:
                raise DatasetFormatError(f"line {line_no}: bad rx_id {row[0]!r}") from None
            pos = tuple(_parse_float(row[i], line_no, CSV_COLUMNS[i]) for i in (1, 2, 3))
            if rx_id not in positions:
                positions[rx_id] = pos
                paths_by_rx[rx_id] = []
                order.append(rx_id)
            elif positions[rx_id] != pos:
                raise DatasetValidationError(f"rx {rx_id}: inconsistent positions across rows")
            power = _parse_float(row[4], line_no, "power_dbm")
            tags = _parse_interactions(row[10], line_no)
            if not tags:
                if power != -math.inf:
                    raise DatasetFormatError(
                        f"line {line_no}: empty interactions requires power_dbm = -INF"
                    )
                outage_rx.add(rx_id)
                continue
            values = tuple(_parse_float(row[i], line_no, CSV_COLUMNS[i]) for i in range(5, 10))
            try:
                comp = MultipathComponent(power, *values, interactions=tags)
            except DatasetValidationError as exc:
                raise DatasetValidationError(f"rx {rx_id}: {exc}") from None
            paths_by_rx[rx_id].append(comp)

    records = []
    for rx_id in order:
        paths = paths_by_rx[rx_id]
        if rx_id in outage_rx and paths:
            raise DatasetValidationError(f"rx {rx_id}: outage row mixed with path rows")
        records.append(make_record(rx_id, positions[rx_id], tx, paths))
    return ScenarioDataset(scenario_name, tx, budget, tuple(records), provenance)
