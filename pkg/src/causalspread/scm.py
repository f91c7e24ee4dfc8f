"""Linear-Gaussian structural causal models over full time graphs.

Ground-truth generator for validating the feature-selection methods:
observed candidate series, hidden series, and one target evolve under lagged
weighted edges plus AR(1) self-edges and independent Gaussian noise.  Hidden
series are never emitted.  Every series draws its noise from an independent
stream keyed by (seed, series name), so removing a sink series from a model
leaves all other series bit-identical.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from datetime import date, timedelta
from enum import Enum
from typing import Mapping

import networkx as nx
import numpy as np

from .panel import TimeSeriesPanel

BURN_IN = 200
_EPOCH = date(2020, 1, 1)


class UnstableModelError(ValueError):
    """Raised when the lagged system is not stationary."""

    def __init__(self, spectral_radius: float):
        self.spectral_radius = spectral_radius
        super().__init__(
            f"unstable model: companion spectral radius {spectral_radius:.4f} >= 1"
        )


@dataclass(frozen=True)
class Edge:
    """Weighted lagged edge ``src -> dst``; lag 0 means within-slice."""

    src: str
    dst: str
    lag: int
    weight: float

    def __post_init__(self):
        if self.lag < 0:
            raise ValueError(f"edge {self.src}->{self.dst}: no backward arrows in time")


class Label(str, Enum):
    """Ground-truth role of a candidate series relative to the target."""

    DIRECT = "direct-cause"
    INDIRECT = "indirect-cause"
    EFFECT = "effect-of-target"
    CONFOUNDED = "confounded-only"
    INDEPENDENT = "independent"


@dataclass(frozen=True)
class GroundTruth:
    labels: dict[str, Label]

    def of(self, candidate: str) -> Label:
        return self.labels[candidate]


@dataclass(frozen=True)
class SCMSpec:
    """Generative model: series names, lagged edges, AR coefficients, noise.

    Invariants enforced by :meth:`validate`: unique names, edges over known
    series, |AR| < 1, an acyclic lag-0 sub-slice, and a companion spectral
    radius below 1 (stationarity).
    """

    observed: tuple[str, ...]
    hidden: tuple[str, ...]
    target: str
    edges: tuple[Edge, ...]
    ar: Mapping[str, float] = field(default_factory=dict)
    noise_std: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0
    name: str = ""

    @property
    def all_series(self) -> tuple[str, ...]:
        return tuple(self.observed) + tuple(self.hidden) + (self.target,)

    def with_seed(self, seed: int) -> "SCMSpec":
        return replace(self, seed=seed)

    def without_series(self, name: str) -> "SCMSpec":
        """Drop one series and every edge touching it."""
        if name == self.target:
            raise ValueError("cannot drop the target")
        return replace(
            self,
            observed=tuple(s for s in self.observed if s != name),
            hidden=tuple(s for s in self.hidden if s != name),
            edges=tuple(e for e in self.edges if name not in (e.src, e.dst)),
            ar={k: v for k, v in self.ar.items() if k != name},
            noise_std={k: v for k, v in self.noise_std.items() if k != name},
        )

    def validate(self) -> float:
        """Check all invariants; returns the companion spectral radius."""
        names = self.all_series
        if len(set(names)) != len(names):
            raise ValueError("series names must be unique")
        for e in self.edges:
            for end in (e.src, e.dst):
                if end not in names:
                    raise ValueError(f"edge endpoint {end!r} is not a series")
            if e.src == e.dst:
                raise ValueError(f"self-edge on {e.src!r}: use the AR coefficient")
        for s, a in self.ar.items():
            if abs(a) >= 1.0:
                raise ValueError(f"AR coefficient of {s!r} must satisfy |a| < 1")
        slice0 = nx.DiGraph()
        slice0.add_nodes_from(names)
        slice0.add_edges_from((e.src, e.dst) for e in self.edges if e.lag == 0)
        if not nx.is_directed_acyclic_graph(slice0):
            raise ValueError("lag-0 edges must form an acyclic within-slice graph")
        rho = self.spectral_radius()
        if rho >= 1.0:
            raise UnstableModelError(rho)
        return rho

    def _weight_matrices(self) -> tuple[np.ndarray, list[np.ndarray]]:
        """(lag-0 matrix, [lag-1..lag-p matrices]); entry [dst, src]."""
        names = self.all_series
        idx = {s: i for i, s in enumerate(names)}
        m = len(names)
        max_lag = max((e.lag for e in self.edges), default=0)
        max_lag = max(max_lag, 1 if self.ar else 0, 1)
        w0 = np.zeros((m, m))
        ws = [np.zeros((m, m)) for _ in range(max_lag)]
        for e in self.edges:
            if e.lag == 0:
                w0[idx[e.dst], idx[e.src]] += e.weight
            else:
                ws[e.lag - 1][idx[e.dst], idx[e.src]] += e.weight
        for s, a in self.ar.items():
            ws[0][idx[s], idx[s]] += a
        return w0, ws

    def spectral_radius(self) -> float:
        """Spectral radius of the companion form of the reduced lagged system."""
        w0, ws = self._weight_matrices()
        m = w0.shape[0]
        inv = np.linalg.inv(np.eye(m) - w0)
        reduced = [inv @ w for w in ws]
        p = len(reduced)
        companion = np.zeros((m * p, m * p))
        companion[:m, :] = np.hstack(reduced)
        if p > 1:
            companion[m:, : m * (p - 1)] = np.eye(m * (p - 1))
        return float(np.max(np.abs(np.linalg.eigvals(companion))))


def seeded_stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator keyed by (seed, label); stable across runs."""
    digest = hashlib.blake2s(label.encode("utf-8"), digest_size=8).digest()
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest, "big")])
    )


def simulate(spec: SCMSpec, n: int, burn_in: int = BURN_IN) -> TimeSeriesPanel:
    """Draw one seeded panel of length ``n`` from the model.

    The first ``burn_in`` steps are discarded and hidden series are never
    emitted.  Raises :class:`UnstableModelError` (with the computed spectral
    radius) for non-stationary specs.
    """
    spec.validate()
    if n < 1:
        raise ValueError("n must be positive")
    names = spec.all_series
    m = len(names)
    steps = n + burn_in
    w0, ws = spec._weight_matrices()
    noise = np.empty((steps, m))
    for j, s in enumerate(names):
        std = spec.noise_std.get(s, 1.0)
        noise[:, j] = seeded_stream(spec.seed, s).normal(0.0, std, size=steps)
    order = list(nx.topological_sort(_slice0_graph(spec)))
    idx = {s: i for i, s in enumerate(names)}
    topo = [idx[s] for s in order]
    has_instant = np.any(w0 != 0.0)
    x = np.zeros((steps, m))
    p = len(ws)
    for t in range(steps):
        acc = noise[t].copy()
        for lag, w in enumerate(ws, start=1):
            if t - lag >= 0:
                acc += w @ x[t - lag]
        if has_instant:
            for j in topo:
                x[t, j] = acc[j] + w0[j] @ x[t]
        else:
            x[t] = acc
    emitted = tuple(spec.observed) + (spec.target,)
    dates = tuple(_EPOCH + timedelta(days=i) for i in range(n))
    return TimeSeriesPanel(
        dates, {s: x[burn_in:, idx[s]] for s in emitted}
    )


def _slice0_graph(spec: SCMSpec) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(spec.all_series)
    g.add_edges_from((e.src, e.dst) for e in spec.edges if e.lag == 0)
    return g


def summary_graph(spec: SCMSpec) -> nx.DiGraph:
    """Collapse the full time graph over time indices (self-loops dropped)."""
    g = nx.DiGraph()
    g.add_nodes_from(spec.all_series)
    g.add_edges_from((e.src, e.dst) for e in spec.edges if e.src != e.dst)
    return g


def label_ground_truth(spec: SCMSpec) -> GroundTruth:
    """Role of each observed candidate via reachability on the summary graph.

    Priority order when several descriptions apply:
    direct > indirect > effect-of-target > confounded-only > independent.
    """
    g = summary_graph(spec)
    y = spec.target
    desc = {node: nx.descendants(g, node) for node in g.nodes}
    labels: dict[str, Label] = {}
    for cand in spec.observed:
        if g.has_edge(cand, y):
            labels[cand] = Label.DIRECT
        elif y in desc[cand]:
            labels[cand] = Label.INDIRECT
        elif cand in desc[y]:
            labels[cand] = Label.EFFECT
        elif any(
            cand in desc[z] and y in desc[z]
            for z in g.nodes
            if z not in (cand, y)
        ):
            labels[cand] = Label.CONFOUNDED
        else:
            labels[cand] = Label.INDEPENDENT
    return GroundTruth(labels)
