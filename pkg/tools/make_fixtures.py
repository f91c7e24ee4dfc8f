#!/usr/bin/env python3
"""Regenerate the bundled data fixtures under src/causalspread/data/.

The case panels are synthetic recreations with known planted structure:
a latent stationary system with state-to-state (or district-to-district)
edges plus hidden common factors modulates smooth epidemic waves, which are
rounded to daily counts that start at each region's first-report date.

The federal generator searches a seed window until the planted
Rheinland-Pfalz -> Thueringen link lands with its condition-1 p-value in the
borderline band (0.01, 0.05] with a comfortably high condition-2 p-value,
and the penalized-regression baseline selects at least as many causes as the
two-condition procedure for every state.  The first passing seed is frozen
by construction, so re-running the script reproduces identical files.

Run from the repository root:  python3 tools/make_fixtures.py
"""

from __future__ import annotations

import csv
import sys
import tempfile
from datetime import date, timedelta
from pathlib import Path

import numpy as np
from scipy.spatial import Delaunay

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from causalspread.geo import haversine_km  # noqa: E402
from causalspread.ingest import POLICY_IDS  # noqa: E402
from causalspread.pipeline import (  # noqa: E402
    DistrictConfig,
    FederalConfig,
    run_district_analysis,
    run_federal_analysis,
)
from causalspread.scm import Edge, SCMSpec, seeded_stream, simulate  # noqa: E402
from causalspread.sypi import ThresholdPair  # noqa: E402

DATA = REPO / "src" / "causalspread" / "data"

START = date(2020, 1, 28)
END = date(2020, 5, 15)
N_DAYS = (END - START).days + 1  # 109 calendar days
DATES = tuple(START + timedelta(days=i) for i in range(N_DAYS))

STATES = [
    # name, first report date, peak daily cases, (lat, lon)
    ("Bayern", date(2020, 1, 28), 1900, (48.9, 11.5)),
    ("Nordrhein-Westfalen", date(2020, 2, 25), 1700, (51.5, 7.5)),
    ("Baden-Wuerttemberg", date(2020, 2, 25), 1500, (48.6, 9.1)),
    ("Rheinland-Pfalz", date(2020, 2, 26), 380, (49.9, 7.4)),
    ("Hessen", date(2020, 2, 27), 520, (50.6, 9.0)),
    ("Hamburg", date(2020, 2, 27), 260, (53.55, 10.0)),
    ("Schleswig-Holstein", date(2020, 2, 28), 190, (54.2, 9.8)),
    ("Niedersachsen", date(2020, 2, 29), 620, (52.75, 9.2)),
    ("Bremen", date(2020, 2, 29), 80, (53.1, 8.8)),
    ("Berlin", date(2020, 3, 1), 380, (52.52, 13.4)),
    ("Brandenburg", date(2020, 3, 2), 170, (52.45, 13.2)),
    ("Sachsen", date(2020, 3, 2), 300, (51.0, 13.3)),
    ("Thueringen", date(2020, 3, 2), 160, (50.9, 11.0)),
    ("Saarland", date(2020, 3, 3), 140, (49.4, 7.0)),
    ("Mecklenburg-Vorpommern", date(2020, 3, 4), 90, (53.7, 12.5)),
    ("Sachsen-Anhalt", date(2020, 3, 8), 110, (52.0, 11.7)),
]

# Planted state-to-state transmission edges (src reports before dst).
FEDERAL_EDGES = [
    ("Bayern", "Baden-Wuerttemberg", 3, 0.45),
    ("Bayern", "Sachsen", 4, 0.40),
    ("Bayern", "Thueringen", 4, 0.30),
    ("Nordrhein-Westfalen", "Niedersachsen", 3, 0.45),
    ("Nordrhein-Westfalen", "Rheinland-Pfalz", 3, 0.40),
    ("Nordrhein-Westfalen", "Hessen", 3, 0.40),
    ("Baden-Wuerttemberg", "Saarland", 4, 0.35),
    ("Hamburg", "Schleswig-Holstein", 2, 0.45),
    ("Hamburg", "Mecklenburg-Vorpommern", 3, 0.40),
    ("Berlin", "Brandenburg", 2, 0.45),
    ("Hessen", "Thueringen", 3, 0.25),
]

RP_TH_LAG = 3
RP_TH_WEIGHT = 0.08  # tuned so the borderline band is reachable

WAVE_RISE = 9.0
WAVE_FALL = 24.0
WAVE_PEAK_AFTER_FIRST_REPORT = 28
MODULATION = 0.30

# District growth-process parameters.
GROWTH_START = 0.35      # mean initial daily log growth after first report
GROWTH_START_SD = 0.07
GROWTH_DECAY = 0.016     # mean daily decline of the growth rate
GROWTH_DECAY_SD = 0.0035
GROWTH_FLOOR = -0.07     # late-phase decay rate
GROWTH_NOISE = 0.20     # sd of idiosyncratic daily growth shocks
SHOCK_TRANSFER = 1.3     # scale on planted edge weights for shock transfer
FACTOR_WEIGHT = 0.20     # hidden state-factor shock loading
FACTOR_WEIGHT_DE = 0.14  # hidden national-factor shock loading

POLICY_BASE = {
    "gather>1000": (date(2020, 3, 10), date(2020, 5, 15)),
    "schools": (date(2020, 3, 16), date(2020, 4, 19)),
    "universities": (date(2020, 3, 16), date(2020, 4, 19)),
    "gather>10": (date(2020, 3, 17), date(2020, 5, 5)),
    "quarantine-14d": (date(2020, 4, 10), date(2020, 5, 15)),
    "gather>2": (date(2020, 3, 22), date(2020, 5, 5)),
    "restaurants": (date(2020, 3, 21), date(2020, 5, 10)),
    "hotels": (date(2020, 3, 22), date(2020, 5, 15)),
    "hospital-visits": (date(2020, 3, 18), date(2020, 5, 15)),
}

# Policies some states never enacted; Niedersachsen has no policy data at all.
POLICY_GAPS = {
    "Niedersachsen": set(POLICY_IDS),
    "Mecklenburg-Vorpommern": {"quarantine-14d"},
    "Berlin": {"hotels"},
    "Schleswig-Holstein": {"gather>2"},
    "Bremen": {"quarantine-14d", "hotels"},
    "Saarland": {"gather>1000"},
}

DISTRICT_COUNTS = {
    "BW": 44, "BY": 96, "BE": 12, "BB": 18, "HB": 2, "HH": 1, "HE": 26,
    "MV": 8, "NI": 45, "NW": 53, "RP": 36, "SL": 6, "SN": 13, "ST": 14,
    "SH": 15, "TH": 23,
}

STATE_ABBR = {
    "Baden-Wuerttemberg": "BW", "Bayern": "BY", "Berlin": "BE",
    "Brandenburg": "BB", "Bremen": "HB", "Hamburg": "HH", "Hessen": "HE",
    "Mecklenburg-Vorpommern": "MV", "Niedersachsen": "NI",
    "Nordrhein-Westfalen": "NW", "Rheinland-Pfalz": "RP", "Saarland": "SL",
    "Sachsen": "SN", "Sachsen-Anhalt": "ST", "Schleswig-Holstein": "SH",
    "Thueringen": "TH",
}

STATE_SCATTER = {
    "BW": (0.70, 0.80), "BY": (1.00, 1.15), "BE": (0.07, 0.11),
    "BB": (0.65, 0.85), "HB": (0.04, 0.07), "HH": (0.04, 0.07),
    "HE": (0.65, 0.45), "MV": (0.40, 0.95), "NI": (0.85, 1.20),
    "NW": (0.75, 0.85), "RP": (0.60, 0.50), "SL": (0.10, 0.16),
    "SN": (0.40, 0.70), "ST": (0.50, 0.45), "SH": (0.45, 0.65),
    "TH": (0.32, 0.55),
}

AIRPORTS = [
    # code, lat, lon, passenger rank
    ("FRA", 50.0379, 8.5622, 1),
    ("MUC", 48.3538, 11.7861, 2),
    ("DUC", 51.2895, 6.7668, 3),
    ("TXL", 52.5597, 13.2877, 4),
    ("HAM", 53.6304, 9.9882, 5),
    ("STR", 48.6899, 9.2220, 6),
    ("CGN", 50.8659, 7.1427, 7),
    ("HAJ", 52.4611, 9.6850, 8),
    ("NUE", 49.4987, 11.0669, 9),
    ("BRE", 53.0475, 8.7867, 10),
    ("DMT", 51.5183, 7.6122, 11),
    ("FMM", 47.9888, 10.2395, 12),
    ("FDH", 47.6713, 9.5115, 13),
    ("DRS", 51.1343, 13.7680, 14),
    ("HHN", 49.9487, 7.2639, 15),
    ("NRN", 51.6024, 6.1417, 16),
    ("KSF", 51.4083, 9.3775, 17),
    ("SCN", 49.2146, 7.1095, 18),
]

LAT_CLIP = (47.05, 54.95)
LON_CLIP = (5.10, 15.90)


def wave(t: np.ndarray, peak: float, rise: float = WAVE_RISE,
         fall: float = WAVE_FALL) -> np.ndarray:
    """Skewed epidemic hump: fast rise, slow decay, unit height."""
    width = np.where(t <= peak, rise, fall)
    return np.exp(-0.5 * ((t - peak) / width) ** 2)


def federal_latent_spec(seed: int, rp_th_weight: float) -> SCMSpec:
    names = [s[0] for s in STATES]
    hidden = ("factor-national", "factor-south", "factor-west")
    edges = [Edge(src, dst, lag, w) for src, dst, lag, w in FEDERAL_EDGES]
    edges.append(Edge("Rheinland-Pfalz", "Thueringen", RP_TH_LAG, rp_th_weight))
    rng = seeded_stream(seed, "hidden-wiring")
    for state in names:
        edges.append(Edge("factor-national", state, int(rng.integers(1, 4)), 0.30))
    for state in ("Bayern", "Baden-Wuerttemberg", "Hessen", "Sachsen", "Thueringen"):
        edges.append(Edge("factor-south", state, int(rng.integers(1, 4)), 0.35))
    for state in ("Nordrhein-Westfalen", "Rheinland-Pfalz", "Saarland",
                  "Hessen", "Niedersachsen"):
        edges.append(Edge("factor-west", state, int(rng.integers(1, 4)), 0.35))
    ar = {s: 0.5 for s in names}
    ar.update({h: 0.35 for h in hidden})
    ar["_unused"] = 0.0
    return SCMSpec(
        observed=tuple(names), hidden=hidden, target="_unused",
        edges=tuple(edges), ar=ar,
        noise_std={"_unused": 1.0}, seed=seed, name="federal-latent",
    )


def federal_counts(seed: int, rp_th_weight: float = RP_TH_WEIGHT) -> dict[str, np.ndarray]:
    spec = federal_latent_spec(seed, rp_th_weight)
    latent = simulate(spec, N_DAYS)
    t = np.arange(N_DAYS, dtype=float)
    counts = {}
    for name, first, peak_cases, _ in STATES:
        fr = (first - START).days
        shape = wave(t, peak=fr + WAVE_PEAK_AFTER_FIRST_REPORT)
        z = latent.values(name)
        z = z / max(np.std(z), 1e-9)
        raw = peak_cases * shape * (1.0 + MODULATION * z)
        raw = np.where(t < fr, 0.0, np.maximum(raw, 0.0))
        values = np.round(raw)
        values[fr] = max(values[fr], 1.0)
        counts[name] = values
    return counts


def jitter_days(state: str, policy: str, span: int = 4) -> int:
    return int(seeded_stream(2020, f"policy:{state}:{policy}").integers(0, span))


def build_policy_rows() -> list[tuple[str, str, str, str]]:
    rows = []
    for name, *_ in STATES:
        gaps = POLICY_GAPS.get(name, set())
        for policy in POLICY_IDS:
            if policy in gaps:
                continue
            base_start, base_end = POLICY_BASE[policy]
            offset = jitter_days(name, policy)
            start = base_start + timedelta(days=offset)
            end = min(base_end + timedelta(days=offset), END)
            rows.append((name, policy, start.isoformat(), end.isoformat()))
    return rows


def write_cases_csv(path: Path, names: list[str], counts: dict[str, np.ndarray]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", *names])
        for i, day in enumerate(DATES):
            writer.writerow([day.isoformat()] +
                            [str(int(counts[name][i])) for name in names])


def federal_fixture_ok(tmp: Path, verbose: bool = False) -> tuple[bool, str]:
    """Check the tuned properties on a candidate federal fixture."""
    strict = ThresholdPair(0.01, 0.2)
    loose = ThresholdPair(0.05, 0.1)
    config = FederalConfig(
        cases=tmp / "cases_federal.csv", policies=DATA / "policies_federal.csv",
        thresholds=(strict, loose), with_granger=False,
    )
    report = run_federal_analysis(config)
    strict_run = report["runs"]["thr1=0.01,thr2=0.2"]["targets"]["Thueringen"]
    loose_run = report["runs"]["thr1=0.05,thr2=0.1"]["targets"]["Thueringen"]
    v_strict = next(v for v in strict_run["verdicts"]
                    if v["candidate"] == "Rheinland-Pfalz")
    v_loose = next(v for v in loose_run["verdicts"]
                   if v["candidate"] == "Rheinland-Pfalz")
    msg = (f"RP->TH strict: p_lag={v_strict['lag_p']:.2e} lag={v_strict['lag']} "
           f"p1={v_strict['p1']:.4f} p2={v_strict['p2']:.3f} {v_strict['decision']} | "
           f"loose: p1={v_loose['p1']:.4f} {v_loose['decision']}")
    if verbose:
        print("   ", msg)
    ok = (
        v_strict["lag_p"] < 0.005
        and 0.015 <= v_strict["p1"] <= 0.045
        and 0.015 <= v_loose["p1"] <= 0.045
        and v_strict["p2"] > 0.25
        and v_loose["p2"] > 0.25
        and v_strict["decision"] == "non-cause"
        and v_loose["decision"] == "cause"
    )
    return ok, msg


def granger_superset_ok(tmp: Path) -> bool:
    config = FederalConfig(
        cases=tmp / "cases_federal.csv", policies=DATA / "policies_federal.csv",
        thresholds=(ThresholdPair(0.05, 0.1),), with_granger=True,
    )
    report = run_federal_analysis(config)
    for row in report["comparison"]["rows"]:
        if len(row["granger_causes"]) < len(row["sypi_causes"]):
            print(f"    superset violated for {row['target']}: "
                  f"{len(row['granger_causes'])} < {len(row['sypi_causes'])}")
            return False
    return True


def make_federal():
    DATA.mkdir(parents=True, exist_ok=True)
    with open(DATA / "policies_federal.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state", "policy_id", "start_date", "end_date"])
        writer.writerows(build_policy_rows())
    names = [s[0] for s in STATES]
    with tempfile.TemporaryDirectory() as tmps:
        tmp = Path(tmps)
        for seed in range(300):
            counts = federal_counts(seed)
            write_cases_csv(tmp / "cases_federal.csv", names, counts)
            ok, msg = federal_fixture_ok(tmp)
            if not ok:
                continue
            print(f"  seed {seed} passes the borderline-pair check: {msg}")
            if granger_superset_ok(tmp):
                print(f"  seed {seed} passes the baseline-superset check")
                write_cases_csv(DATA / "cases_federal.csv", names, counts)
                return seed
    raise SystemExit("no federal seed satisfied the fixture constraints")


def make_district_geography(rng) -> tuple[list[str], dict[str, tuple[float, float]], dict[str, str]]:
    state_center = {STATE_ABBR[name]: centroid for name, _, _, centroid in STATES}
    names, centroids, parents = [], {}, {}
    for abbr in sorted(DISTRICT_COUNTS):
        lat0, lon0 = state_center[abbr]
        sd_lat, sd_lon = STATE_SCATTER[abbr]
        for i in range(1, DISTRICT_COUNTS[abbr] + 1):
            name = f"{abbr}-{i:03d}"
            # Urban clusters pull districts toward the state center, where
            # the large airports sit.
            shrink = 0.35 if rng.random() < 0.45 else 1.0
            lat = float(np.clip(lat0 + rng.normal(0, sd_lat * shrink), *LAT_CLIP))
            lon = float(np.clip(lon0 + rng.normal(0, sd_lon * shrink), *LON_CLIP))
            names.append(name)
            centroids[name] = (lat, lon)
            parents[name] = abbr
    return names, centroids, parents


def delaunay_adjacency(names, centroids, max_km=85.0) -> set[tuple[str, str]]:
    pts = np.array([[centroids[n][0], centroids[n][1]] for n in names])
    tri = Delaunay(pts)
    pairs = set()
    for simplex in tri.simplices:
        for a in range(3):
            for b in range(a + 1, 3):
                i, j = sorted((simplex[a], simplex[b]))
                if haversine_km(tuple(pts[i]), tuple(pts[j])) <= max_km:
                    pairs.add((names[i], names[j]))
    return pairs


def make_district():
    rng = seeded_stream(2020, "district-geography")
    names, centroids, parents = make_district_geography(rng)
    pairs = delaunay_adjacency(names, centroids)
    neighbors: dict[str, set[str]] = {n: set() for n in names}
    for a, b in pairs:
        neighbors[a].add(b)
        neighbors[b].add(a)

    origin = min(
        (n for n in names if parents[n] == "BY"),
        key=lambda n: haversine_km(centroids[n], (49.9, 12.3)),
    )
    fr_rng = seeded_stream(2020, "district-first-report")
    first_idx = {}
    for n in names:
        km = haversine_km(centroids[n], centroids[origin])
        base = 4.0 + km / 22.0 + fr_rng.normal(0, 2.5)
        first_idx[n] = int(np.clip(round(base), 0, 42))
    first_idx[origin] = 0

    edge_rng = seeded_stream(2020, "district-edges")
    edges = []
    for n in names:
        earlier = [m for m in sorted(neighbors[n]) if first_idx[m] < first_idx[n]]
        if earlier and edge_rng.random() < 0.75:
            k = min(len(earlier), int(edge_rng.integers(1, 3)))
            chosen = edge_rng.choice(len(earlier), size=k, replace=False)
            for c in sorted(chosen):
                edges.append(Edge(earlier[c], n, int(edge_rng.integers(2, 5)),
                                  float(edge_rng.uniform(0.35, 0.55))))
    # Long-range transmission between airport neighborhoods.
    airport_pts = {code: (lat, lon) for code, lat, lon, _ in AIRPORTS}
    near_airport = {
        code: [n for n in names if haversine_km(centroids[n], pt) <= 40.0]
        for code, pt in airport_pts.items()
    }
    hub_rng = seeded_stream(2020, "district-hubs")
    hub_routes = [("TXL", "MUC"), ("TXL", "FRA"), ("DUC", "MUC"), ("CGN", "MUC"),
                  ("DUC", "TXL"), ("STR", "HAM"), ("FRA", "MUC"), ("TXL", "STR")]
    for a, b in hub_routes:
        for src_code, dst_code in ((a, b), (b, a)):
            src_pool = near_airport[src_code]
            dst_pool = near_airport[dst_code]
            if not src_pool or not dst_pool:
                continue
            for _ in range(6):
                src = src_pool[int(hub_rng.integers(0, len(src_pool)))]
                dst = dst_pool[int(hub_rng.integers(0, len(dst_pool)))]
                if src == dst or first_idx[src] >= first_idx[dst]:
                    continue
                edges.append(Edge(src, dst, int(hub_rng.integers(2, 5)),
                                  float(hub_rng.uniform(0.4, 0.6))))

    wiring = seeded_stream(2020, "district-hidden")
    factor_links = {}
    for n in names:
        links = [(f"factor-{parents[n]}", int(wiring.integers(1, 4)), FACTOR_WEIGHT)]
        if wiring.random() < 0.5:
            links.append(("factor-DE", int(wiring.integers(1, 4)), FACTOR_WEIGHT_DE))
        factor_links[n] = links
    print(f"  district shock graph: {len(edges)} edges")

    # Multiplicative growth process: log intensity follows its own declining
    # growth curve plus growth shocks, and shocks propagate along the planted
    # edges and down from the hidden state/national factors.  The trend of a
    # curve then lives in its own past, where the conditioning can see it.
    factor_series = {
        f: GROWTH_NOISE * seeded_stream(2020, f"shock:{f}").normal(size=N_DAYS)
        for f in [f"factor-{abbr}" for abbr in sorted(DISTRICT_COUNTS)] + ["factor-DE"]
    }
    own_shocks = {}
    for n in names:
        shock = GROWTH_NOISE * seeded_stream(2020, f"shock:{n}").normal(size=N_DAYS)
        for factor, lag, weight in factor_links[n]:
            shifted = np.zeros(N_DAYS)
            shifted[lag:] = factor_series[factor][:-lag]
            shock = shock + weight * shifted
        own_shocks[n] = shock
    in_edges: dict[str, list[Edge]] = {n: [] for n in names}
    for e in edges:
        in_edges[e.dst].append(e)
    size_rng = seeded_stream(2020, "district-size")
    t = np.arange(N_DAYS, dtype=float)
    counts = {}
    for n in names:
        fr = first_idx[n]
        tau = t - fr
        start = size_rng.normal(GROWTH_START, GROWTH_START_SD)
        decay = max(size_rng.normal(GROWTH_DECAY, GROWTH_DECAY_SD), 0.008)
        growth = np.clip(start - decay * tau, GROWTH_FLOOR, None)
        growth = growth + own_shocks[n]
        for e in in_edges[n]:
            shifted = np.zeros(N_DAYS)
            shifted[e.lag:] = own_shocks[e.src][:-e.lag]
            growth = growth + (e.weight * SHOCK_TRANSFER) * shifted
        log_level = np.log(1.0 + size_rng.uniform(0.0, 2.0)) + np.cumsum(
            np.where(tau > 0, growth, 0.0)
        )
        raw = np.where(tau >= 0, np.exp(np.minimum(log_level, 12.0)), 0.0)
        values = np.round(raw)
        values[fr] = max(values[fr], 1.0)
        counts[n] = values

    write_cases_csv(DATA / "cases_district.csv", names, counts)
    with open(DATA / "adjacency.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_a", "region_b"])
        for a, b in sorted(pairs):
            writer.writerow([a, b])
    with open(DATA / "geo_regions.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region", "lat", "lon", "level", "parent"])
        for name, _, _, (lat, lon) in STATES:
            writer.writerow([name, f"{lat:.4f}", f"{lon:.4f}", "federal-state", ""])
        for n in names:
            lat, lon = centroids[n]
            writer.writerow([n, f"{lat:.4f}", f"{lon:.4f}", "district", parents[n]])
    with open(DATA / "airports.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iata", "lat", "lon", "rank"])
        for code, lat, lon, rank in AIRPORTS:
            writer.writerow([code, f"{lat:.4f}", f"{lon:.4f}", str(rank)])

    report = run_district_analysis(DistrictConfig())
    summary = report["summary"]
    print(f"  district analysis: {summary['total_causes']} causes "
          f"(reference {summary['reference_total']}); categories {summary['categories']}; "
          f"near-airport districts {report['near_airport_districts']['count']} "
          f"(reference 169)")


def main():
    print("building policy schedule and federal case panel ...")
    seed = make_federal()
    print(f"federal fixture frozen at generator seed {seed}")
    print("building district geography and case panel ...")
    make_district()
    print("fixtures written to", DATA)


if __name__ == "__main__":
    main()
