"""Synthetic validation: both selection methods against simulator ground truth.

Runs every scenario over a block of seeds, tallies detections per
ground-truth label, and derives the headline quantities: detection rate on
direct unconfounded causes, false-positive rate on confounded-only
candidates, per-label precision and recall.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .granger import granger_causes
from .scenarios import scenario_suite
from .scm import GroundTruth, Label, SCMSpec, simulate
from .sypi import DEFAULT_THRESHOLDS, Decision, ThresholdPair, sypi_analyze_target

log = logging.getLogger(__name__)

CAUSE_LABELS = (Label.DIRECT, Label.INDIRECT)


@dataclass
class MethodTally:
    """Detections vs. candidate counts, keyed by ground-truth label."""

    detected: dict[Label, int] = field(default_factory=lambda: {l: 0 for l in Label})
    total: dict[Label, int] = field(default_factory=lambda: {l: 0 for l in Label})

    def add(self, label: Label, hit: bool):
        self.total[label] += 1
        self.detected[label] += bool(hit)

    def rate(self, label: Label) -> Optional[float]:
        n = self.total[label]
        return self.detected[label] / n if n else None

    def precision(self) -> Optional[float]:
        hits = sum(self.detected.values())
        true_hits = sum(self.detected[l] for l in CAUSE_LABELS)
        return true_hits / hits if hits else None

    def recall(self) -> Optional[float]:
        pool = sum(self.total[l] for l in CAUSE_LABELS)
        found = sum(self.detected[l] for l in CAUSE_LABELS)
        return found / pool if pool else None


@dataclass
class ScenarioRates:
    scenario: str
    seeds: int
    sypi: MethodTally
    granger: Optional[MethodTally]

    def row(self) -> dict:
        out = {
            "scenario": self.scenario,
            "seeds": self.seeds,
            "sypi_precision": self.sypi.precision(),
            "sypi_recall": self.sypi.recall(),
            "sypi_direct_detection": self.sypi.rate(Label.DIRECT),
            "sypi_confounded_fpr": self.sypi.rate(Label.CONFOUNDED),
            "sypi_effect_fpr": self.sypi.rate(Label.EFFECT),
            "sypi_independent_fpr": self.sypi.rate(Label.INDEPENDENT),
        }
        if self.granger is not None:
            out.update({
                "granger_precision": self.granger.precision(),
                "granger_recall": self.granger.recall(),
                "granger_direct_detection": self.granger.rate(Label.DIRECT),
                "granger_confounded_fpr": self.granger.rate(Label.CONFOUNDED),
            })
        return out


def evaluate_scenario(spec: SCMSpec, truth: GroundTruth, seeds: Sequence[int],
                      n: int = 1000,
                      thresholds: ThresholdPair = DEFAULT_THRESHOLDS,
                      max_lag: int = 14,
                      with_granger: bool = False) -> ScenarioRates:
    """Tally both methods over seeded replicates of one scenario."""
    sypi_tally = MethodTally()
    granger_tally = MethodTally() if with_granger else None
    quiet = logging.getLogger("causalspread.sypi")
    previous = quiet.level
    quiet.setLevel(logging.ERROR)  # per-seed lag warnings add nothing here
    try:
        for seed in seeds:
            seeded = spec.with_seed(seed)
            panel = simulate(seeded, n)
            verdicts = sypi_analyze_target(panel, spec.target, seeded.observed,
                                           thresholds, max_lag)
            for v in verdicts:
                sypi_tally.add(truth.of(v.candidate), v.decision is Decision.CAUSE)
            if granger_tally is not None:
                fit = granger_causes(panel, spec.target, list(seeded.observed),
                                     max_lag)
                for cand in seeded.observed:
                    granger_tally.add(truth.of(cand), cand in fit.selected)
    finally:
        quiet.setLevel(previous)
    return ScenarioRates(spec.name, len(list(seeds)), sypi_tally, granger_tally)


def run_validation(seeds: int = 200, n: int = 1000,
                   thresholds: ThresholdPair = DEFAULT_THRESHOLDS,
                   max_lag: int = 14,
                   granger_scenarios: Sequence[str] = ("confounded-pair",),
                   scenario_names: Optional[Sequence[str]] = None) -> list[ScenarioRates]:
    """Evaluate the whole suite; the baseline runs where a contrast is wanted."""
    results = []
    for spec, truth in scenario_suite():
        if scenario_names is not None and spec.name not in scenario_names:
            continue
        log.info("validating scenario %s over %d seeds", spec.name, seeds)
        results.append(
            evaluate_scenario(
                spec, truth, range(seeds), n=n, thresholds=thresholds,
                max_lag=max_lag,
                with_granger=spec.name in set(granger_scenarios),
            )
        )
    return results
