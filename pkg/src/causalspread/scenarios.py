"""Named ground-truth scenarios used to validate the selection methods.

Fixed structures, per-run variation only through the simulation seed.  The
hidden confounders are memoryless (no AR term): the candidate dependencies
with the target then stay in the single-lag regime the decision procedure is
built for, while the confounding collider mechanism is still fully exercised.
"""

from __future__ import annotations

import numpy as np

from .scm import Edge, GroundTruth, SCMSpec, label_ground_truth

DENSE_SIZES = (5, 10, 20)

_AR = 0.5
_STRUCTURE_SEED = 20200515


def _spec(name, observed, hidden, edges, ar=None, noise=None) -> SCMSpec:
    series = tuple(observed) + tuple(hidden) + ("target",)
    ar_map = {s: _AR for s in series}
    ar_map.update({s: 0.0 for s in hidden})
    if ar is not None:
        ar_map.update(ar)
    noise_map = {s: 1.0 for s in series}
    if noise is not None:
        noise_map.update(noise)
    return SCMSpec(
        observed=tuple(observed),
        hidden=tuple(hidden),
        target="target",
        edges=tuple(edges),
        ar=ar_map,
        noise_std=noise_map,
        name=name,
    )


def confounded_pair_spec() -> SCMSpec:
    """One direct cause, one candidate linked to the target only through a
    hidden common driver."""
    return _spec(
        "confounded-pair",
        observed=("driver", "proxy"),
        hidden=("latent",),
        edges=[
            Edge("driver", "target", 1, 0.8),
            Edge("latent", "proxy", 1, 0.8),
            Edge("latent", "target", 2, 0.8),
        ],
    )


def unconfounded_chain_spec() -> SCMSpec:
    """origin -> relay -> target: one indirect and one direct cause."""
    return _spec(
        "unconfounded-chain",
        observed=("origin", "relay"),
        hidden=(),
        edges=[
            Edge("origin", "relay", 1, 0.8),
            Edge("relay", "target", 1, 0.8),
        ],
    )


def reversed_edge_spec() -> SCMSpec:
    """One true cause plus one candidate that is an effect of the target."""
    return _spec(
        "reversed-edge",
        observed=("driver", "echo"),
        hidden=(),
        edges=[
            Edge("driver", "target", 1, 0.8),
            Edge("target", "echo", 1, 0.8),
        ],
    )


def hidden_descendant_spec() -> SCMSpec:
    """Confounded-pair topology plus a hidden sink fed by the target.

    The sink keeps the target from being a sink node itself while staying
    outside the candidate pool, which is exactly the relaxed assumption the
    selection procedure is supposed to tolerate: verdicts must match the same
    model with the sink removed, seed for seed.
    """
    base = confounded_pair_spec()
    return _spec(
        "hidden-descendant",
        observed=base.observed,
        hidden=base.hidden + ("downstream",),
        edges=list(base.edges) + [
            Edge("target", "downstream", 1, 0.8),
            Edge("driver", "downstream", 2, 0.5),
        ],
        ar={"downstream": 0.3},
    )


def descendant_in_candidates_spec() -> SCMSpec:
    """Violation scenario: an observed effect of the target sits in the pool.

    The effect candidate also receives the true cause, forming an observed
    collider on a parallel path.  Detection of the true cause may degrade
    here; the scenario documents the failure mode rather than a guarantee.
    """
    return _spec(
        "descendant-in-candidates",
        observed=("driver", "feedback"),
        hidden=(),
        edges=[
            Edge("driver", "target", 1, 0.8),
            Edge("target", "feedback", 1, 0.8),
            Edge("driver", "feedback", 2, 0.5),
        ],
    )


def dense_random_spec(d: int) -> SCMSpec:
    """Random graph with d candidates and hidden confounders.

    Structure is fixed by a dedicated seed so labels are stable; cross-edge
    lags are drawn from 1..3 and weights are rescaled until the system is
    comfortably stationary.
    """
    rng = np.random.default_rng([_STRUCTURE_SEED, d])
    observed = tuple(f"c{i:02d}" for i in range(1, d + 1))
    n_hidden = max(1, d // 3)
    hidden = tuple(f"h{i}" for i in range(1, n_hidden + 1))
    edges: list[Edge] = []
    for i, src in enumerate(observed):
        for dst in observed[i + 1 :]:
            if rng.random() < 2.0 / d:
                edges.append(Edge(src, dst, int(rng.integers(1, 4)),
                                  float(rng.uniform(0.3, 0.7))))
    for src in observed:
        if rng.random() < 0.35:
            edges.append(Edge(src, "target", int(rng.integers(1, 4)),
                              float(rng.uniform(0.4, 0.8))))
    for h in hidden:
        pair = rng.choice(len(observed), size=min(2, d), replace=False)
        for j in pair:
            edges.append(Edge(h, observed[j], int(rng.integers(1, 4)),
                              float(rng.uniform(0.4, 0.8))))
        if rng.random() < 0.8:
            edges.append(Edge(h, "target", int(rng.integers(1, 4)),
                              float(rng.uniform(0.4, 0.8))))
    spec = _spec(f"dense-random-{d}", observed, hidden, edges)
    for _ in range(20):
        if spec.spectral_radius() < 0.95:
            break
        edges = [Edge(e.src, e.dst, e.lag, 0.8 * e.weight) for e in edges]
        spec = _spec(f"dense-random-{d}", observed, hidden, edges)
    return spec


def scenario_suite() -> list[tuple[SCMSpec, GroundTruth]]:
    """All named validation scenarios with their derived ground truth."""
    specs = [
        confounded_pair_spec(),
        unconfounded_chain_spec(),
        reversed_edge_spec(),
        hidden_descendant_spec(),
        descendant_in_candidates_spec(),
    ]
    specs.extend(dense_random_spec(d) for d in DENSE_SIZES)
    suite = []
    for spec in specs:
        spec.validate()
        suite.append((spec, label_ground_truth(spec)))
    return suite
