"""Region geography: centroids, adjacency, airports, cause categorization.

Distances are great-circle kilometers on a 6371 km sphere.  "Near" means a
centroid-to-centroid or centroid-to-airport distance of at most 40 km, the
diameter of a medium-sized district.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

EARTH_RADIUS_KM = 6371.0
NEAR_KM = 40.0

LAT_RANGE = (47.0, 55.0)
LON_RANGE = (5.0, 16.0)

# The 18 large airports by yearly passengers carried in the geography file.
AIRPORT_CODES = frozenset({
    "MUC", "STR", "TXL", "FDH", "FMM", "NUE", "HAM", "FRA", "HHN",
    "HAJ", "NRN", "CGN", "DUC", "DMT", "DRS", "BRE", "KSF", "SCN",
})

CATEGORY_NEIGHBOR = "neighbor"
CATEGORY_NEAR_TARGET = "near-target-40km"
CATEGORY_NEAR_AIRPORT = "near-airport"
CATEGORY_DISTANT = "distant-uncategorized"
CATEGORIES = (CATEGORY_NEIGHBOR, CATEGORY_NEAR_TARGET,
              CATEGORY_NEAR_AIRPORT, CATEGORY_DISTANT)

LEVEL_STATE = "federal-state"
LEVEL_DISTRICT = "district"


@dataclass(frozen=True)
class RegionGeo:
    region: str
    level: str
    lat: float
    lon: float
    neighbors: tuple[str, ...]
    parent: Optional[str] = None

    def __post_init__(self):
        if self.level not in (LEVEL_STATE, LEVEL_DISTRICT):
            raise ValueError(f"unknown level {self.level!r}")
        if not (LAT_RANGE[0] <= self.lat <= LAT_RANGE[1]
                and LON_RANGE[0] <= self.lon <= LON_RANGE[1]):
            raise ValueError(
                f"{self.region}: centroid ({self.lat}, {self.lon}) outside "
                f"the {LAT_RANGE[0]}-{LAT_RANGE[1]}N, {LON_RANGE[0]}-{LON_RANGE[1]}E box"
            )

    @property
    def centroid(self) -> tuple[float, float]:
        return (self.lat, self.lon)


@dataclass(frozen=True)
class Airport:
    code: str
    lat: float
    lon: float
    rank: int

    def __post_init__(self):
        if self.code not in AIRPORT_CODES:
            raise ValueError(f"unknown airport code {self.code!r}")

    @property
    def centroid(self) -> tuple[float, float]:
        return (self.lat, self.lon)


def haversine_km(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance between (lat, lon) points in degrees."""
    lat1, lon1 = map(math.radians, a)
    lat2, lon2 = map(math.radians, b)
    s = (
        math.sin((lat2 - lat1) / 2.0) ** 2
        + math.cos(lat1) * math.cos(lat2) * math.sin((lon2 - lon1) / 2.0) ** 2
    )
    return EARTH_RADIUS_KM * 2.0 * math.asin(min(1.0, math.sqrt(s)))


def _lookup(geo: Mapping[str, RegionGeo], region: str) -> RegionGeo:
    try:
        return geo[region]
    except KeyError:
        raise KeyError(f"unknown region {region!r}") from None


def nearest_airport_within(point: tuple[float, float],
                           airports: Sequence[Airport],
                           radius_km: float = NEAR_KM) -> Optional[Airport]:
    best = None
    best_km = radius_km
    for airport in airports:
        d = haversine_km(point, airport.centroid)
        if d <= best_km:
            best, best_km = airport, d
    return best


def categorize_cause(cause: str, target: str, geo: Mapping[str, RegionGeo],
                     airports: Sequence[Airport]) -> str:
    """First matching rule wins: shared border, within 40 km of the target,
    within 40 km of a large airport, otherwise distant."""
    cause_geo = _lookup(geo, cause)
    target_geo = _lookup(geo, target)
    if cause in target_geo.neighbors:
        return CATEGORY_NEIGHBOR
    if haversine_km(cause_geo.centroid, target_geo.centroid) <= NEAR_KM:
        return CATEGORY_NEAR_TARGET
    if nearest_airport_within(cause_geo.centroid, airports) is not None:
        return CATEGORY_NEAR_AIRPORT
    return CATEGORY_DISTANT


def attribute_airport_pair(cause: str, target: str,
                           geo: Mapping[str, RegionGeo],
                           airports: Sequence[Airport]) -> Optional[str]:
    """Cause-side airport code when both ends sit near large airports.

    The cause must lie within 40 km of some airport and the target within
    40 km of a different one; returns the nearest cause-side code, else None.
    """
    cause_geo = _lookup(geo, cause)
    target_geo = _lookup(geo, target)
    cause_airport = nearest_airport_within(cause_geo.centroid, airports)
    if cause_airport is None:
        return None
    for airport in airports:
        if airport.code == cause_airport.code:
            continue
        if haversine_km(target_geo.centroid, airport.centroid) <= NEAR_KM:
            return cause_airport.code
    return None


def regions_near_airports(geo: Mapping[str, RegionGeo],
                          airports: Sequence[Airport],
                          level: str = LEVEL_DISTRICT) -> tuple[str, ...]:
    """Regions of the given level within 40 km of any listed airport."""
    return tuple(
        r.region
        for r in geo.values()
        if r.level == level
        and nearest_airport_within(r.centroid, airports) is not None
    )
