"""SyPI decision procedure for causal feature selection on time series.

For every candidate series the procedure estimates a single dependency lag
with the target, builds a conditioning set from the target's predecessor node
and the nodes of the other lag-significant candidates entering it, and tests
two conditions: the candidate's current node must stay dependent on the
target node given that set (condition 1), and the candidate's previous node
must become independent of the target node once the current node joins the
set (condition 2).  A candidate passing both is declared a cause.  The
construction makes a hidden-confounder path open a collider at the
candidate's current node, so confounded-only candidates fail condition 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Mapping, Optional, Sequence

import numpy as np

from .citest import ci_test, fisher_z_pvalue
from .panel import TimeSeriesPanel

log = logging.getLogger(__name__)

DEFAULT_MAX_LAG = 14

# A second lag this close (relative) to the best one marks the single-lag
# assumption as shaky for the pair; surfaced as a warning, not an error.
AMBIGUITY_RATIO = 0.9


@dataclass(frozen=True)
class ThresholdPair:
    """Significance levels: thr1 rejects independence (condition 1 and lag
    screening), thr2 accepts independence (condition 2)."""

    thr1: float
    thr2: float

    def __post_init__(self):
        for value in (self.thr1, self.thr2):
            if not 0.0 < value < 1.0:
                raise ValueError(f"thresholds must lie in (0, 1), got {value}")


DEFAULT_THRESHOLDS = ThresholdPair(0.01, 0.2)
LOOSE_THRESHOLDS = ThresholdPair(0.05, 0.1)
THRESHOLD_GRID = (
    ThresholdPair(0.01, 0.1),
    ThresholdPair(0.01, 0.2),
    ThresholdPair(0.05, 0.1),
    ThresholdPair(0.05, 0.2),
)


@dataclass(frozen=True)
class LagEstimate:
    """Best single lag of a candidate against the target.

    ``lag`` maximizes the absolute cross-correlation of candidate values
    ``lag`` days back with current target values; ``p_value`` is the
    unconditional Fisher z p-value at that lag.
    """

    candidate: str
    lag: int
    strength: float
    p_value: float
    significant: bool
    ambiguous: bool = False
    degenerate: bool = False


@dataclass(frozen=True)
class ConditioningSet:
    """Members as (series, day offset) pairs relative to the tested target node.

    Always contains the target's predecessor ``(target, -1)``; never contains
    any node of the candidate under test; offsets are all <= -1.
    """

    members: tuple[tuple[str, int], ...]


class Decision(str, Enum):
    CAUSE = "cause"
    NON_CAUSE = "non-cause"
    NO_LAG_DEPENDENCE = "no-lag-dependence"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class CausalVerdict:
    """Per (candidate, target) outcome at one threshold pair."""

    candidate: str
    target: str
    lag: LagEstimate
    p1: Optional[float]
    p2: Optional[float]
    decision: Decision
    thresholds: ThresholdPair

    def at(self, thresholds: ThresholdPair) -> "CausalVerdict":
        """Re-apply the decision table to the stored p-values.

        Decision-level only: conditioning sets are not rebuilt, so this is the
        fixed-p-value monotonicity view of a threshold change.
        """
        if self.decision is Decision.DEGENERATE:
            return replace(self, thresholds=thresholds)
        significant = self.lag.p_value < thresholds.thr1 and not self.lag.degenerate
        if not significant:
            decision = Decision.NO_LAG_DEPENDENCE
        else:
            decision = decide(self.p1, self.p2, True, thresholds)
        return replace(self, decision=decision, thresholds=thresholds)


def decide(p1: Optional[float], p2: Optional[float], lag_significant: bool,
           thresholds: ThresholdPair) -> Decision:
    """Decision table: cause iff p1 < thr1 and p2 > thr2 and the lag holds."""
    if not lag_significant:
        return Decision.NO_LAG_DEPENDENCE
    if p1 is None or p2 is None:
        return Decision.DEGENERATE
    if p1 < thresholds.thr1 and p2 > thresholds.thr2:
        return Decision.CAUSE
    return Decision.NON_CAUSE


def estimate_lag(x: np.ndarray, y: np.ndarray, max_lag: int,
                 screen_level: float, candidate: str = "x") -> LagEstimate:
    """Pick the lag in 0..max_lag maximizing |corr(x shifted back, y)|.

    Ties break toward the smallest lag.  Significance screens the
    unconditional Fisher z p-value at the chosen lag against
    ``screen_level``.  Flat inputs yield a degenerate, insignificant
    estimate.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    if y.shape[0] != n:
        raise ValueError("candidate and target must have equal length")
    if max_lag >= n / 4:
        raise ValueError(f"max_lag {max_lag} too large for n = {n} (need < n/4)")
    if np.ptp(x) == 0.0 or np.ptp(y) == 0.0:
        return LagEstimate(candidate, 0, 0.0, 1.0, False, degenerate=True)
    corrs = np.zeros(max_lag + 1)
    for w in range(max_lag + 1):
        xs = x[: n - w] if w else x
        ys = y[w:]
        if np.ptp(xs) == 0.0 or np.ptp(ys) == 0.0:
            corrs[w] = 0.0
        else:
            corrs[w] = np.corrcoef(xs, ys)[0, 1]
    strengths = np.abs(corrs)
    w = int(np.argmax(strengths))
    strength = float(strengths[w])
    others = np.delete(strengths, w)
    ambiguous = bool(others.size and np.max(others) >= AMBIGUITY_RATIO * strength > 0)
    p = fisher_z_pvalue(float(np.clip(corrs[w], -1, 1)), n - w, 0)
    significant = p < screen_level
    if ambiguous and significant:
        log.warning(
            "lag ambiguity for %s: |corr| at another lag within %.0f%% of best lag %d",
            candidate, AMBIGUITY_RATIO * 100, w,
        )
    return LagEstimate(candidate, w, strength, p, significant, ambiguous)


def build_conditioning_set(candidate: str, target: str,
                           lags: Mapping[str, LagEstimate]) -> ConditioningSet:
    """Target predecessor plus the other significant candidates' nodes entering it.

    A candidate with lag ``w_j`` enters the target's predecessor node through
    its node ``w_j + 1`` days before the tested target node, hence offset
    ``-1 - w_j``.
    """
    members: list[tuple[str, int]] = [(target, -1)]
    for name, est in lags.items():
        if name == candidate or not est.significant:
            continue
        members.append((name, -1 - est.lag))
    return ConditioningSet(tuple(members))


def _lagged_columns(panel: TimeSeriesPanel,
                    nodes: Sequence[tuple[str, int]]) -> list[np.ndarray]:
    """Time-align (series, offset<=0) nodes onto the maximal common window."""
    shift = max(-offset for _, offset in nodes)
    n = panel.n
    cols = []
    for name, offset in nodes:
        start = shift + offset
        cols.append(panel.values(name)[start : n + offset])
    return cols


def sypi_decide(panel: TimeSeriesPanel, candidate: str, target: str,
                thresholds: ThresholdPair = DEFAULT_THRESHOLDS,
                max_lag: int = DEFAULT_MAX_LAG,
                lags: Optional[Mapping[str, LagEstimate]] = None,
                candidates: Optional[Sequence[str]] = None) -> CausalVerdict:
    """Run both conditions for one candidate and return the verdict.

    ``lags`` may carry precomputed lag estimates for the whole candidate pool
    (as :func:`sypi_analyze_target` does); otherwise every non-target series
    in the panel is treated as the pool.  Insufficient overlap after lag
    trimming or a degenerate CI test yields a degenerate decision instead of
    an exception.  Both condition p-values are computed and stored even when
    lag screening fails, so verdicts support decision-level re-thresholding
    via :meth:`CausalVerdict.at`.
    """
    if lags is None:
        pool = list(candidates) if candidates is not None else [
            s for s in panel.names if s != target
        ]
        if candidate not in pool:
            raise ValueError(f"candidate {candidate!r} not in pool")
        y = panel.values(target)
        lags = {
            name: estimate_lag(panel.values(name), y, max_lag, thresholds.thr1, name)
            for name in pool
        }
    est = lags[candidate]
    if est.degenerate:
        return CausalVerdict(candidate, target, est, None, None,
                             Decision.DEGENERATE, thresholds)
    w = est.lag
    cond_set = build_conditioning_set(candidate, target, lags)
    target_node = (target, 0)
    current = (candidate, -w)
    previous = (candidate, -w - 1)
    cond1_z = list(cond_set.members)
    cond2_z = cond1_z + [current]
    overlap = panel.n - max(
        -offset for _, offset in [target_node, previous] + cond2_z
    )
    if overlap - (len(cond2_z)) - 3 < 1:
        log.warning("insufficient overlap for %s -> %s after lag trimming",
                    candidate, target)
        return CausalVerdict(candidate, target, est, None, None,
                             Decision.DEGENERATE, thresholds)
    col1 = _lagged_columns(panel, [current, target_node] + cond1_z)
    res1 = ci_test(col1[0], col1[1], col1[2:])
    col2 = _lagged_columns(panel, [previous, target_node] + cond2_z)
    res2 = ci_test(col2[0], col2[1], col2[2:])
    if res1.degenerate or res2.degenerate:
        return CausalVerdict(candidate, target, est, res1.p, res2.p,
                             Decision.DEGENERATE, thresholds)
    decision = decide(res1.p, res2.p, est.significant, thresholds)
    return CausalVerdict(candidate, target, est, res1.p, res2.p, decision,
                         thresholds)


def sypi_analyze_target(panel: TimeSeriesPanel, target: str,
                        candidates: Sequence[str],
                        thresholds: ThresholdPair = DEFAULT_THRESHOLDS,
                        max_lag: int = DEFAULT_MAX_LAG) -> list[CausalVerdict]:
    """One verdict per candidate for a single target.

    Deterministic given the panel and parameters.  An empty candidate pool
    yields an empty list (logged, not an error): the target simply has no
    admissible candidates.
    """
    candidates = list(candidates)
    if not candidates:
        log.info("target %s: empty candidate pool, nothing to test", target)
        return []
    y = panel.values(target)
    lags = {
        name: estimate_lag(panel.values(name), y, max_lag, thresholds.thr1, name)
        for name in candidates
    }
    return [
        sypi_decide(panel, name, target, thresholds, max_lag, lags=lags)
        for name in candidates
    ]
