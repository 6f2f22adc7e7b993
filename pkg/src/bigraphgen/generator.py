"""Growth process for random bipartite user-item graphs.

Starting from m disjoint user-item pairs, each iteration adds one node:
with probability p a user bringing u edges, otherwise an item bringing v
edges.  Every edge picks its endpoint in the opposite modality through a
two-branch rule:

  * with probability alpha (new users) or beta (new items) the endpoint
    is drawn uniformly at random;
  * otherwise it is drawn proportionally to degree, and within this
    branch, with probability `bounce`, through a short walk seeded by the
    endpoints already picked directly in the same iteration.

The walk takes three uniform micro-steps: an anchor among this iteration's
direct picks, a neighbor of the anchor, then a neighbor of that neighbor.
It steers edges toward nodes two hops from the ones just chosen, which
raises local cohesion while leaving the degree distribution's shape alone.

Determinism contract: with a fixed seed the rng.random() call sequence is
a pure function of the parameters; the backing generator is Python's
`random.Random` (Mersenne Twister).  Per iteration: one node-type draw.
Per edge: one branch draw; one bounce draw if the degree-proportional
branch was taken (consumed even when bounce is 0 or 1); then endpoint
draws, where a uniform or plain degree-proportional pick costs one draw
and a walk costs three.  A collision with an endpoint already selected in
the same iteration retries the same sub-branch, up to 64 attempts; after
that, one uniform draw over the still-unconnected candidates is made, and
if none exist the edge is dropped.  All endpoint draws see the graph as it
was when the iteration started; the new edges land as a batch at the end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from random import Random
from typing import Optional, Sequence

from .bigraph import ITEM, USER, Bigraph, Modality

MAX_COLLISION_RETRIES = 64

# Labels recorded per edge when kind tracking is on.
KIND_RANDOM = "random"      # uniform branch
KIND_PREF = "pref"          # plain degree-proportional branch
KIND_BOUNCE = "bounce"      # walk from an anchor
KIND_FALLBACK = "fallback"  # walk requested before any anchor existed
KIND_RESCUE = "rescue"      # uniform pick over unconnected nodes after retries


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs of the growth process.

    Immutable; derive variants with `apply_patch` or `dataclasses.replace`.
    alpha and beta weight the uniform branch, so 0 means pure preferential
    attachment and 1 means no preference at all.
    """

    m: int
    iterations: int
    p: float
    u: int
    v: int
    alpha: float = 0.0
    beta: float = 0.0
    bounce: float = 0.0

    def __post_init__(self) -> None:
        problems = []
        for name in ("m", "iterations", "u", "v"):
            if not isinstance(getattr(self, name), int):
                problems.append(f"{name} must be an integer")
        if isinstance(self.m, int) and self.m < 1:
            problems.append("m must be >= 1")
        if isinstance(self.iterations, int) and self.iterations < 0:
            problems.append("iterations must be >= 0")
        for name in ("u", "v"):
            if isinstance(getattr(self, name), int) and getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        for name in ("p", "alpha", "beta", "bounce"):
            x = getattr(self, name)
            if not (isinstance(x, (int, float)) and 0.0 <= x <= 1.0):
                problems.append(f"{name} must lie in [0, 1]")
        if problems:
            raise ValueError("invalid parameters: " + "; ".join(problems))

    @property
    def eta(self) -> float:
        """Expected number of edges added per iteration."""
        return self.p * self.u + (1.0 - self.p) * self.v

    def mean_user_degree(self) -> float:
        """Asymptotic mean user degree, eta / p."""
        return math.inf if self.p == 0.0 else self.eta / self.p

    def mean_item_degree(self) -> float:
        """Asymptotic mean item degree, eta / (1 - p)."""
        return math.inf if self.p == 1.0 else self.eta / (1.0 - self.p)


# Fields a live session may adjust; the initial pair count is part of the
# graph's identity and stays pinned.
PATCHABLE_FIELDS = ("iterations", "p", "u", "v", "alpha", "beta", "bounce")


def apply_patch(params: GeneratorParams, patch: dict) -> GeneratorParams:
    """Return new params with `patch` applied, validating the result."""
    bad = sorted(set(patch) - set(PATCHABLE_FIELDS))
    if bad:
        raise ValueError("not adjustable: " + ", ".join(bad))
    return replace(params, **patch)


def bounce_walk(
    graph: Bigraph, anchors: Sequence[int], modality: Modality, rng: Random
) -> int:
    """Anchor, neighbor, neighbor's neighbor: three uniform micro-steps.

    `modality` is the anchors' (and the result's) modality.  Consumes
    exactly three rng.random() values.  Anchors must be non-empty and every
    graph node must have degree >= 1, which the growth process guarantees.
    """
    adj = graph.adjacency(modality)
    opp_adj = graph.adjacency(modality.opposite)
    anchor = anchors[int(rng.random() * len(anchors))]
    nbrs = adj[anchor]
    mid = nbrs[int(rng.random() * len(nbrs))]
    nbrs2 = opp_adj[mid]
    return nbrs2[int(rng.random() * len(nbrs2))]


@dataclass
class IterationOutcome:
    """What one growth step did."""

    modality: Modality
    node_index: int
    requested: int
    endpoints: list[int]
    kinds: Optional[list[str]] = None

    @property
    def realized(self) -> int:
        return len(self.endpoints)


def step_iteration(
    graph: Bigraph,
    params: GeneratorParams,
    rng: Random,
    record_kinds: bool = False,
) -> IterationOutcome:
    """Grow the graph by one node plus its edges.

    Follows the draw order documented in the module docstring exactly.
    """
    rnd = rng.random
    if rnd() < params.p:
        new_mod, count, mix = USER, params.u, params.alpha
    else:
        new_mod, count, mix = ITEM, params.v, params.beta
    target_mod = new_mod.opposite
    node = graph.add_node(new_mod)

    endpoint_pool = graph.endpoint_index(target_mod)  # grows only after batch add
    n_targets = graph.node_count(target_mod)
    taken: set[int] = set()
    anchors: list[int] = []
    endpoints: list[int] = []
    kinds: Optional[list[str]] = [] if record_kinds else None
    bounce = params.bounce

    for _ in range(count):
        random_branch = rnd() < mix
        bouncing = False if random_branch else rnd() < bounce
        for _ in range(MAX_COLLISION_RETRIES):
            if random_branch:
                idx = int(rnd() * n_targets)
                kind = KIND_RANDOM
            elif bouncing and anchors:
                idx = bounce_walk(graph, anchors, target_mod, rng)
                kind = KIND_BOUNCE
            else:
                idx = endpoint_pool[int(rnd() * len(endpoint_pool))]
                kind = KIND_FALLBACK if bouncing else KIND_PREF
            if idx not in taken:
                break
        else:
            free = [i for i in range(n_targets) if i not in taken]
            if not free:
                continue  # drop this edge
            idx = free[int(rnd() * len(free))]
            kind = KIND_RESCUE
        taken.add(idx)
        endpoints.append(idx)
        if kind in (KIND_RANDOM, KIND_PREF):
            anchors.append(idx)
        if kinds is not None:
            kinds.append(kind)

    for idx in endpoints:
        if new_mod is USER:
            graph._add_edge_unchecked(node.index, idx)
        else:
            graph._add_edge_unchecked(idx, node.index)
    return IterationOutcome(
        modality=new_mod,
        node_index=node.index,
        requested=count,
        endpoints=endpoints,
        kinds=kinds,
    )


@dataclass
class RunResult:
    """A finished generation run."""

    params: GeneratorParams
    seed: int
    graph: Bigraph
    users_added: int
    items_added: int
    requested_edges: int
    realized_edges: int
    history: Optional[list[IterationOutcome]] = None

    @property
    def dropped_edges(self) -> int:
        return self.requested_edges - self.realized_edges


def run(params: GeneratorParams, seed: int, record_history: bool = False) -> RunResult:
    """Run the growth process from scratch for params.iterations steps."""
    rng = Random(seed)
    graph = Bigraph.from_pairs(params.m)
    users_added = items_added = requested = realized = 0
    history: Optional[list[IterationOutcome]] = [] if record_history else None
    for _ in range(params.iterations):
        out = step_iteration(graph, params, rng, record_kinds=record_history)
        if out.modality is USER:
            users_added += 1
        else:
            items_added += 1
        requested += out.requested
        realized += len(out.endpoints)
        if history is not None:
            history.append(out)
    return RunResult(
        params=params,
        seed=seed,
        graph=graph,
        users_added=users_added,
        items_added=items_added,
        requested_edges=requested,
        realized_edges=realized,
        history=history,
    )
