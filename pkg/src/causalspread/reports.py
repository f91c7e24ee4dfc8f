"""Run outputs: JSON report, delimited edge lists, DOT graphs, figures.

Every run directory gets a manifest capturing the exact configuration and
input digests; nothing here embeds wall-clock state, so identical runs
produce byte-identical reports.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import __version__
from .geo import CATEGORIES
from .panel import TimeSeriesPanel

log = logging.getLogger(__name__)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return obj.item()
    return obj


def write_json(payload: dict, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(outdir: Path, command: str, config: dict,
                   inputs: dict[str, Path]) -> Path:
    manifest = {
        "command": command,
        "package_version": __version__,
        "config": config,
        "inputs": {
            key: {"path": str(p), "sha256": file_sha256(Path(p))}
            for key, p in inputs.items()
        },
    }
    path = outdir / "manifest.json"
    write_json(manifest, path)
    return path


def write_edges_csv(rows: list[dict], fields: list[str], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in fields})


def write_dot(edges: list[tuple[str, str, str]], path: Path,
              name: str = "causes") -> None:
    """Directed graph in DOT syntax; the third tuple entry is the edge style
    (solid for neighbor/state causes, dashed otherwise)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"digraph {name} {{", "  rankdir=LR;", "  node [shape=box];"]
    for src, dst, style in edges:
        lines.append(f'  "{src}" -> "{dst}" [style={style}];')
    lines.append("}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _save(fig, path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    log.info("wrote %s", path)


def federal_outputs(report: dict, outdir: Path) -> None:
    outdir = Path(outdir)
    write_json(report, outdir / "report.json")
    rows = []
    for pair_key, run in report["runs"].items():
        for target, entry in run["targets"].items():
            for v in entry["verdicts"]:
                rows.append({
                    "pair": pair_key,
                    "target": target,
                    "candidate": v["candidate"],
                    "candidate_type": v["candidate_type"],
                    "lag": v["lag"],
                    "lag_p": v["lag_p"],
                    "p1": v["p1"],
                    "p2": v["p2"],
                    "decision": v["decision"],
                })
    write_edges_csv(rows, ["pair", "target", "candidate", "candidate_type",
                           "lag", "lag_p", "p1", "p2", "decision"],
                    outdir / "edges.csv")
    comparison = report["comparison"]
    dot_edges = []
    for row in comparison["rows"]:
        for cause in row["sypi_causes"]:
            style = "dashed" if cause in report["runs"][
                next(iter(report["runs"]))
            ]["targets"][row["target"]]["policy_candidates"] else "solid"
            dot_edges.append((cause, row["target"], style))
    write_dot(dot_edges, outdir / "graph.dot")
    targets = [row["target"] for row in comparison["rows"]]
    sypi_counts = [len(row["sypi_causes"]) for row in comparison["rows"]]
    granger_counts = [len(row["granger_causes"]) for row in comparison["rows"]]
    fig, ax = plt.subplots(figsize=(11, 4.5))
    pos = range(len(targets))
    ax.bar([p - 0.2 for p in pos], sypi_counts, width=0.4, label="SyPI")
    ax.bar([p + 0.2 for p in pos], granger_counts, width=0.4, label="Lasso-Granger")
    ax.set_xticks(list(pos))
    ax.set_xticklabels(targets, rotation=60, ha="right", fontsize=7)
    thr = comparison["thresholds"]
    ax.set_ylabel("detected causes")
    ax.set_title(f"Detected causes per state at thresholds ({thr[0]:g}, {thr[1]:g})")
    ax.legend()
    fig.tight_layout()
    _save(fig, outdir / "cause_counts.png")


def district_outputs(report: dict, outdir: Path) -> None:
    outdir = Path(outdir)
    write_json(report, outdir / "report.json")
    rows = []
    dot_edges = []
    for target, entry in report["targets"].items():
        cause_info = {c["cause"]: c for c in entry["causes"]}
        for v in entry["verdicts"]:
            cause = cause_info.get(v["candidate"])
            rows.append({
                "target": target,
                "candidate": v["candidate"],
                "mode": v["mode"],
                "lag": v["lag"],
                "p1": v["p1"],
                "p2": v["p2"],
                "decision": v["decision"],
                "category": cause["category"] if cause else "",
                "airport": (cause["airport"] or "") if cause else "",
            })
        for c in entry["causes"]:
            style = "solid" if c["category"] == "neighbor" else "dashed"
            dot_edges.append((c["cause"], target, style))
    write_edges_csv(rows, ["target", "candidate", "mode", "lag", "p1", "p2",
                           "decision", "category", "airport"],
                    outdir / "edges.csv")
    write_dot(dot_edges, outdir / "graph.dot")
    summary = report["summary"]
    fig, ax = plt.subplots(figsize=(6.5, 4))
    values = [summary["category_percent"][cat] for cat in CATEGORIES]
    ax.bar(range(len(CATEGORIES)), values, color="tab:blue")
    ax.set_xticks(range(len(CATEGORIES)))
    ax.set_xticklabels(CATEGORIES, rotation=20, ha="right", fontsize=8)
    ax.set_ylabel("% of detected causes")
    ax.set_title(f"Cause categories ({summary['total_causes']} causes)")
    fig.tight_layout()
    _save(fig, outdir / "categories.png")
    hist = summary["airport_histogram"]
    fig, ax = plt.subplots(figsize=(7, 4))
    if hist:
        codes = list(hist)
        ax.bar(range(len(codes)), [hist[c] for c in codes], color="tab:orange")
        ax.set_xticks(range(len(codes)))
        ax.set_xticklabels(codes, fontsize=8)
    ax.set_ylabel("distant causes near airport")
    ax.set_title("Airport attribution of distant causes")
    fig.tight_layout()
    _save(fig, outdir / "airports.png")


def validation_outputs(rows: list[dict], outdir: Path) -> None:
    outdir = Path(outdir)
    write_json({"scenarios": rows}, outdir / "report.json")
    fields = sorted({k for row in rows for k in row})
    fields = ["scenario", "seeds"] + [f for f in fields
                                      if f not in ("scenario", "seeds")]
    write_edges_csv(rows, fields, outdir / "metrics.csv")
    fig, ax = plt.subplots(figsize=(9, 4.5))
    names = [row["scenario"] for row in rows]
    pos = range(len(names))
    det = [row.get("sypi_direct_detection") or 0.0 for row in rows]
    fpr = [row.get("sypi_confounded_fpr") or 0.0 for row in rows]
    ax.bar([p - 0.2 for p in pos], det, width=0.4, label="direct-cause detection")
    ax.bar([p + 0.2 for p in pos], fpr, width=0.4, label="confounded-only FPR")
    ax.set_xticks(list(pos))
    ax.set_xticklabels(names, rotation=30, ha="right", fontsize=8)
    ax.set_ylim(0, 1)
    ax.set_ylabel("rate")
    ax.set_title("Synthetic validation rates")
    ax.legend()
    fig.tight_layout()
    _save(fig, outdir / "rates.png")


def simulation_outputs(panel: TimeSeriesPanel, truth_labels: dict,
                       outdir: Path, name: str) -> None:
    from .ingest import write_panel_csv

    outdir = Path(outdir)
    write_panel_csv(panel, outdir / f"{name}_panel.csv")
    write_json({"scenario": name, "labels": truth_labels},
               outdir / f"{name}_ground_truth.json")
    fig, ax = plt.subplots(figsize=(9, 4))
    for series in panel.names:
        ax.plot(range(panel.n), panel.values(series), label=series, linewidth=0.9)
    ax.set_xlabel("day")
    ax.set_ylabel("value")
    ax.set_title(f"Simulated panel: {name}")
    ax.legend(fontsize=7)
    fig.tight_layout()
    _save(fig, outdir / f"{name}_panel.png")
