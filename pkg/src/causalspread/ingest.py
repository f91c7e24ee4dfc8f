"""File ingestion: case panels, policy schedules, geography, model files.

All readers are strict: malformed rows raise :class:`IngestionError` carrying
the offending row number.  Bundled fixtures live under ``causalspread/data``
and stand in for the regional reporting data and the recreated geography
supplement (see the README for provenance and caveats).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date, timedelta
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

import numpy as np
import yaml

from .geo import Airport, RegionGeo
from .panel import TimeSeriesPanel
from .scm import Edge, SCMSpec

POLICY_IDS = (
    "schools",
    "universities",
    "gather>1000",
    "gather>10",
    "quarantine-14d",
    "gather>2",
    "restaurants",
    "hotels",
    "hospital-visits",
)

FIXTURES = {
    "cases-federal": "cases_federal.csv",
    "cases-district": "cases_district.csv",
    "policies-federal": "policies_federal.csv",
    "geo-regions": "geo_regions.csv",
    "adjacency": "adjacency.csv",
    "airports": "airports.csv",
}


class IngestionError(ValueError):
    """Malformed input file; message carries the path and row number."""


def fixture_path(key: str) -> Path:
    try:
        name = FIXTURES[key]
    except KeyError:
        raise KeyError(f"unknown fixture {key!r}; have {sorted(FIXTURES)}") from None
    return Path(resources.files("causalspread.data").joinpath(name))


def _parse_date(text: str, path, row: int) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise IngestionError(f"{path}: row {row}: bad ISO date {text!r}") from None


def ingest_cases(path) -> TimeSeriesPanel:
    """Read a `date,<region>,...` CSV of daily non-negative counts.

    Missing cells count as zero.  Duplicate, unordered, or gapped dates and
    negative counts are ingestion errors with the offending row number.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        if len(header) < 2 or header[0].strip().lower() != "date":
            raise IngestionError(
                f"{path}: row 1: header must be 'date,<region>,...'"
            )
        regions = [h.strip() for h in header[1:]]
        if len(set(regions)) != len(regions):
            raise IngestionError(f"{path}: row 1: duplicate region names")
        dates: list[date] = []
        rows: list[list[float]] = []
        for i, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            day = _parse_date(row[0], path, i)
            if dates:
                if day == dates[-1]:
                    raise IngestionError(f"{path}: row {i}: duplicate date {day}")
                if day < dates[-1]:
                    raise IngestionError(f"{path}: row {i}: dates not increasing at {day}")
                if day - dates[-1] != timedelta(days=1):
                    raise IngestionError(f"{path}: row {i}: gap in date axis before {day}")
            values = []
            for j, cell in enumerate(row[1:], start=1):
                cell = cell.strip()
                if not cell:
                    values.append(0.0)
                    continue
                try:
                    count = int(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}: row {i}: non-integer count {cell!r}"
                    ) from None
                if count < 0:
                    raise IngestionError(f"{path}: row {i}: negative count {count}")
                values.append(float(count))
            if len(values) != len(regions):
                raise IngestionError(
                    f"{path}: row {i}: expected {len(regions)} counts, got {len(values)}"
                )
            dates.append(day)
            rows.append(values)
    if not dates:
        raise IngestionError(f"{path}: no data rows")
    data = np.asarray(rows)
    return TimeSeriesPanel(tuple(dates),
                           {r: data[:, j] for j, r in enumerate(regions)})


@dataclass(frozen=True)
class PolicySchedule:
    """Active intervals per (state, policy); rendered as 0/1 daily series."""

    intervals: Mapping[tuple[str, str], tuple[tuple[date, date], ...]]

    def states(self) -> tuple[str, ...]:
        return tuple(sorted({state for state, _ in self.intervals}))

    def policies_of(self, state: str) -> tuple[str, ...]:
        return tuple(p for p in POLICY_IDS if (state, p) in self.intervals)

    def indicator(self, state: str, policy: str,
                  dates: tuple[date, ...]) -> np.ndarray:
        spans = self.intervals.get((state, policy), ())
        out = np.zeros(len(dates))
        for start, end in spans:
            for i, day in enumerate(dates):
                if start <= day <= end:
                    out[i] = 1.0
        return out

    def indicators_for(self, state: str,
                       dates: tuple[date, ...]) -> dict[str, np.ndarray]:
        return {p: self.indicator(state, p, dates) for p in self.policies_of(state)}


def load_policies(path) -> PolicySchedule:
    """Read `state,policy_id,start_date,end_date` rows."""
    path = Path(path)
    intervals: dict[tuple[str, str], list[tuple[date, date]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"state", "policy_id", "start_date", "end_date"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise IngestionError(
                f"{path}: header must contain {sorted(required)}"
            )
        for i, row in enumerate(reader, start=2):
            policy = row["policy_id"].strip()
            if policy not in POLICY_IDS:
                raise IngestionError(f"{path}: row {i}: unknown policy {policy!r}")
            start = _parse_date(row["start_date"], path, i)
            end = _parse_date(row["end_date"], path, i)
            if end < start:
                raise IngestionError(f"{path}: row {i}: interval ends before it starts")
            intervals.setdefault((row["state"].strip(), policy), []).append((start, end))
    return PolicySchedule({k: tuple(v) for k, v in intervals.items()})


def load_adjacency(path) -> dict[str, set[str]]:
    """Read `region_a,region_b` pairs; the symmetric closure is applied."""
    path = Path(path)
    neighbors: dict[str, set[str]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise IngestionError(f"{path}: empty file")
        for i, row in enumerate(reader, start=2):
            if len(row) < 2:
                raise IngestionError(f"{path}: row {i}: expected two regions")
            a, b = row[0].strip(), row[1].strip()
            if a == b:
                raise IngestionError(f"{path}: row {i}: self-adjacency {a!r}")
            neighbors.setdefault(a, set()).add(b)
            neighbors.setdefault(b, set()).add(a)
    return neighbors


def load_geo(path, adjacency: Optional[Mapping[str, set[str]]] = None
             ) -> dict[str, RegionGeo]:
    """Read `region,lat,lon,level,parent` rows into RegionGeo records."""
    path = Path(path)
    adjacency = adjacency or {}
    geo: dict[str, RegionGeo] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"region", "lat", "lon", "level", "parent"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise IngestionError(f"{path}: header must contain {sorted(required)}")
        for i, row in enumerate(reader, start=2):
            region = row["region"].strip()
            try:
                record = RegionGeo(
                    region=region,
                    level=row["level"].strip(),
                    lat=float(row["lat"]),
                    lon=float(row["lon"]),
                    neighbors=tuple(sorted(adjacency.get(region, ()))),
                    parent=row["parent"].strip() or None,
                )
            except ValueError as err:
                raise IngestionError(f"{path}: row {i}: {err}") from None
            if region in geo:
                raise IngestionError(f"{path}: row {i}: duplicate region {region!r}")
            geo[region] = record
    return geo


def load_airports(path) -> tuple[Airport, ...]:
    """Read `iata,lat,lon,rank` rows for the large-airport list."""
    path = Path(path)
    airports = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"iata", "lat", "lon", "rank"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise IngestionError(f"{path}: header must contain {sorted(required)}")
        for i, row in enumerate(reader, start=2):
            try:
                airports.append(Airport(
                    code=row["iata"].strip(),
                    lat=float(row["lat"]),
                    lon=float(row["lon"]),
                    rank=int(row["rank"]),
                ))
            except ValueError as err:
                raise IngestionError(f"{path}: row {i}: {err}") from None
    return tuple(airports)


def write_panel_csv(panel: TimeSeriesPanel, path, as_int: bool = False) -> None:
    """Write a panel in the same `date,<series>,...` shape the readers expect."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", *panel.names])
        for i, day in enumerate(panel.dates):
            row = [day.isoformat()]
            for name in panel.names:
                v = panel.values(name)[i]
                row.append(str(int(round(v))) if as_int else repr(float(v)))
            writer.writerow(row)


def load_scm_spec(path) -> SCMSpec:
    """Read a generative-model file (YAML mapping with an edge list).

    Expected keys: target, observed, hidden, ar, noise_std, seed, name and
    edges as [src, dst, lag, weight] rows; see the README for an example.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict) or "target" not in raw:
        raise IngestionError(f"{path}: expected a mapping with a 'target' key")
    try:
        edges = tuple(
            Edge(str(src), str(dst), int(lag), float(weight))
            for src, dst, lag, weight in raw.get("edges", [])
        )
        spec = SCMSpec(
            observed=tuple(raw.get("observed", ())),
            hidden=tuple(raw.get("hidden", ())),
            target=str(raw["target"]),
            edges=edges,
            ar={str(k): float(v) for k, v in (raw.get("ar") or {}).items()},
            noise_std={str(k): float(v) for k, v in (raw.get("noise_std") or {}).items()},
            seed=int(raw.get("seed", 0)),
            name=str(raw.get("name", path.stem)),
        )
    except (TypeError, ValueError) as err:
        raise IngestionError(f"{path}: {err}") from None
    spec.validate()
    return spec
