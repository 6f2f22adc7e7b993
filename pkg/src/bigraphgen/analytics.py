"""Measured and theoretical statistics for bipartite user-item graphs.

Measured side: degree histograms with moments, the bipartite local
clustering coefficient (BLCC), second-neighbor counts, and recommender
neighborhoods (similar users and their items).  Theoretical side: the
mixed attachment kernel, the closed-form degree density with its
exponential limit, tree-based clustering estimates, and CCDF shape fits.

The union-heavy passes (BLCC over a whole modality, neighborhoods) run on
big-integer bitmasks when both modalities are small enough, and fall back
to plain set expansion otherwise.  Both paths are exact; tests pin them to
a brute-force BFS oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .bigraph import ITEM, USER, Bigraph, Modality, NodeRef
from .generator import GeneratorParams

# Bitmask passes keep one mask per node of the opposite modality; above
# this per-modality node count the masks' memory outgrows their speedup.
MASK_NODE_LIMIT = 32768


# -- degree histograms -------------------------------------------------------


@dataclass(frozen=True)
class DegreeHistogram:
    """Degree counts of one modality plus first and second moments."""

    modality: Modality
    counts: dict[int, int]
    node_count: int
    mean: float
    second_moment: float

    @classmethod
    def from_degrees(
        cls, modality: Modality, degrees: Iterable[int]
    ) -> "DegreeHistogram":
        counts: dict[int, int] = {}
        n = 0
        total = 0
        total_sq = 0
        for d in degrees:
            counts[d] = counts.get(d, 0) + 1
            n += 1
            total += d
            total_sq += d * d
        mean = total / n if n else 0.0
        second = total_sq / n if n else 0.0
        return cls(
            modality=modality,
            counts=counts,
            node_count=n,
            mean=mean,
            second_moment=second,
        )

    @classmethod
    def from_graph(cls, graph: Bigraph, modality: Modality) -> "DegreeHistogram":
        return cls.from_degrees(modality, graph.degrees(modality))

    @classmethod
    def from_counts(
        cls, modality: Modality, counts: dict[int, int]
    ) -> "DegreeHistogram":
        n = sum(counts.values())
        total = sum(k * c for k, c in counts.items())
        total_sq = sum(k * k * c for k, c in counts.items())
        return cls(
            modality=modality,
            counts=dict(counts),
            node_count=n,
            mean=total / n if n else 0.0,
            second_moment=total_sq / n if n else 0.0,
        )

    def sorted_items(self) -> list[tuple[int, int]]:
        return sorted(self.counts.items())

    def truncated(self, limit: int = 64) -> tuple[list[tuple[int, int]], int]:
        """Most-populated `limit` bins (ties: smaller degree) plus tail mass.

        Returns (bins sorted by degree, count of nodes in dropped bins).
        """
        ranked = sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))
        kept = sorted(ranked[:limit])
        tail = self.node_count - sum(c for _, c in kept)
        return kept, tail


def degree_histogram(graph: Bigraph, modality: Modality) -> DegreeHistogram:
    return DegreeHistogram.from_graph(graph, modality)


# -- neighborhood machinery ----------------------------------------------------


def _bit_indices(mask: int, nbytes: int) -> np.ndarray:
    """Positions of set bits of a nonnegative int, via numpy unpacking."""
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.nonzero(np.unpackbits(raw, bitorder="little"))[0]


def _adjacency_masks(adjacency: Sequence[Sequence[int]]) -> list[int]:
    """One bitmask per node, bit x set iff x is a neighbor."""
    masks = []
    for adj in adjacency:
        m = 0
        for x in adj:
            m |= 1 << x
        masks.append(m)
    return masks


def _use_masks(graph: Bigraph) -> bool:
    return (
        graph.user_count <= MASK_NODE_LIMIT
        and graph.item_count <= MASK_NODE_LIMIT
    )


def _second_neighbor_pass(
    graph: Bigraph, modality: Modality, indices: Optional[Sequence[int]] = None
) -> tuple[list[int], list[int]]:
    """Per node: distinct-second-neighbor count and the walk-count bound.

    The bound is Σ over first neighbors of (degree − 1): the number of
    length-2 walks leaving the node, which the distinct count can never
    exceed.  Covers all nodes of the modality unless `indices` is given.
    """
    adj = graph.adjacency(modality)
    opp_adj = graph.adjacency(modality.opposite)
    if indices is None:
        indices = range(len(adj))
    n2_counts: list[int] = []
    bounds: list[int] = []
    # building every opposite mask only pays off for near-full passes
    if _use_masks(graph) and 4 * len(indices) >= len(adj):
        opp_masks = _adjacency_masks(opp_adj)
        for j in indices:
            nbrs = adj[j]
            bound = 0
            mask = 0
            for i in nbrs:
                bound += len(opp_adj[i]) - 1
                mask |= opp_masks[i]
            # j itself is always inside the union when it has neighbors
            n2_counts.append(mask.bit_count() - 1 if nbrs else 0)
            bounds.append(bound)
    else:
        for j in indices:
            nbrs = adj[j]
            bound = 0
            seen: set[int] = set()
            for i in nbrs:
                bound += len(opp_adj[i]) - 1
                seen.update(opp_adj[i])
            n2_counts.append(len(seen) - 1 if nbrs else 0)
            bounds.append(bound)
    return n2_counts, bounds


# -- BLCC ---------------------------------------------------------------------


def blcc(graph: Bigraph, node: NodeRef) -> Optional[float]:
    """Local clustering of one node: 1 − distinct second neighbors over the
    length-2 walk count.  None when no length-2 walk exists."""
    n2, bounds = _second_neighbor_pass(graph, node.modality, [node.index])
    if bounds[0] == 0:
        return None
    return 1.0 - n2[0] / bounds[0]


@dataclass
class BlccSummary:
    """Aggregate clustering over a set of nodes of one modality."""

    mean: Optional[float]
    defined_count: int
    undefined_count: int


def blcc_summary(
    graph: Bigraph, modality: Modality, indices: Optional[Sequence[int]] = None
) -> BlccSummary:
    """Mean BLCC over defined nodes; undefined ones are counted, not averaged."""
    n2_counts, bounds = _second_neighbor_pass(graph, modality, indices)
    total = 0.0
    defined = 0
    for n2, bound in zip(n2_counts, bounds):
        if bound > 0:
            total += 1.0 - n2 / bound
            defined += 1
    mean = total / defined if defined else None
    return BlccSummary(
        mean=mean,
        defined_count=defined,
        undefined_count=len(bounds) - defined,
    )


@dataclass
class BlccReport:
    """Full-graph clustering report, both modalities."""

    mean_by_modality: dict[Modality, Optional[float]]
    defined_count: int
    undefined_count: int
    per_node: Optional[dict[NodeRef, Optional[float]]] = None


def blcc_report(graph: Bigraph, keep_per_node: bool = False) -> BlccReport:
    means: dict[Modality, Optional[float]] = {}
    defined = 0
    undefined = 0
    per_node: Optional[dict[NodeRef, Optional[float]]] = (
        {} if keep_per_node else None
    )
    for modality in (USER, ITEM):
        n2_counts, bounds = _second_neighbor_pass(graph, modality)
        total = 0.0
        mod_defined = 0
        for j, (n2, bound) in enumerate(zip(n2_counts, bounds)):
            value: Optional[float] = None
            if bound > 0:
                value = 1.0 - n2 / bound
                total += value
                mod_defined += 1
            if per_node is not None:
                per_node[NodeRef(modality, j)] = value
        means[modality] = total / mod_defined if mod_defined else None
        defined += mod_defined
        undefined += len(bounds) - mod_defined
    return BlccReport(
        mean_by_modality=means,
        defined_count=defined,
        undefined_count=undefined,
        per_node=per_node,
    )


# -- second neighbors ---------------------------------------------------------


@dataclass(frozen=True)
class SecondNeighborStats:
    """Measured mean second-neighbor count against the tree approximation."""

    real_mean: float
    theoretic_mean: float
    ratio: Optional[float]


def second_neighbor_stats(graph: Bigraph, modality: Modality) -> SecondNeighborStats:
    """Mean distinct second neighbors vs ⟨u⟩(⟨v²⟩/⟨v⟩ − 1).

    ⟨u⟩ is the queried modality's mean degree; ⟨v⟩, ⟨v²⟩ are the opposite
    modality's empirical moments.  Ratio is None when the approximation
    evaluates to zero.
    """
    if graph.user_count == 0 or graph.item_count == 0:
        raise ValueError("both modalities must be nonempty")
    n2_counts, _ = _second_neighbor_pass(graph, modality)
    real = sum(n2_counts) / len(n2_counts)
    own = DegreeHistogram.from_graph(graph, modality)
    opp = DegreeHistogram.from_graph(graph, Modality(1 - modality))
    theoretic = own.mean * (opp.second_moment / opp.mean - 1.0) if opp.mean else 0.0
    ratio = real / theoretic if theoretic != 0.0 else None
    return SecondNeighborStats(real_mean=real, theoretic_mean=theoretic, ratio=ratio)


# -- recommender neighborhoods --------------------------------------------------


def similarity_neighborhood(graph: Bigraph, user_index: int) -> tuple[int, int]:
    """(similar users, their items) for one user.

    Similar users share at least one item with the queried user (who is
    excluded); the second count is the distinct items adjacent to any
    similar user, the candidate pool of a neighborhood recommender.
    """
    user_adj = graph.adjacency(USER)
    item_adj = graph.adjacency(ITEM)
    similar: set[int] = set()
    for i in user_adj[user_index]:
        similar.update(item_adj[i])
    similar.discard(user_index)
    items: set[int] = set()
    for x in similar:
        items.update(user_adj[x])
    return len(similar), len(items)


@dataclass
class NeighborhoodReport:
    """Mean neighborhood sizes over all users (empty ones count as zero)."""

    mean_similar_users: float
    mean_neighbor_items: float
    per_user: Optional[list[tuple[int, int]]] = None


def neighborhood_report(
    graph: Bigraph,
    indices: Optional[Sequence[int]] = None,
    keep_per_user: bool = False,
) -> NeighborhoodReport:
    user_adj = graph.adjacency(USER)
    item_adj = graph.adjacency(ITEM)
    if indices is None:
        indices = range(len(user_adj))
    per_user: Optional[list[tuple[int, int]]] = [] if keep_per_user else None
    total_similar = 0
    total_items = 0
    n = 0
    if _use_masks(graph) and 4 * len(indices) >= len(user_adj):
        user_masks = _adjacency_masks(user_adj)  # item bits per user
        item_masks = _adjacency_masks(item_adj)  # user bits per item
        nbytes = (len(user_adj) + 7) // 8
        for j in indices:
            similar_mask = 0
            for i in user_adj[j]:
                similar_mask |= item_masks[i]
            similar_mask &= ~(1 << j)
            n_similar = similar_mask.bit_count()
            item_mask = 0
            if n_similar:
                for x in _bit_indices(similar_mask, nbytes):
                    item_mask |= user_masks[x]
            n_items = item_mask.bit_count()
            total_similar += n_similar
            total_items += n_items
            n += 1
            if per_user is not None:
                per_user.append((n_similar, n_items))
    else:
        for j in indices:
            pair = similarity_neighborhood(graph, j)
            total_similar += pair[0]
            total_items += pair[1]
            n += 1
            if per_user is not None:
                per_user.append(pair)
    if n == 0:
        raise ValueError("no users to report on")
    return NeighborhoodReport(
        mean_similar_users=total_similar / n,
        mean_neighbor_items=total_items / n,
        per_user=per_user,
    )


# -- whole-graph degree identities ----------------------------------------------


def neighbor_expected_degree(graph: Bigraph) -> float:
    """Expected degree at the end of a uniformly random edge endpoint.

    Equals ⟨k²⟩/⟨k⟩ over all nodes of both modalities; at least ⟨k⟩ by the
    Cauchy-Schwarz inequality.
    """
    if graph.edge_count == 0:
        raise ValueError("graph has no edges")
    total = 0
    total_sq = 0
    for modality in (USER, ITEM):
        for d in graph.degrees(modality):
            total += d
            total_sq += d * d
    return total_sq / total


# -- closed forms -----------------------------------------------------------------


def combined_kernel(k: float, t: float, params: GeneratorParams) -> float:
    """Per-node attachment probability β/(pt) + (1−β)k/(ηt).

    The two terms are the uniform and the degree-proportional routes for a
    user of degree k when the user modality holds ~pt nodes and the graph
    ~ηt edges.  β=0 with p=0 degenerates to the second term alone.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    beta, p = params.beta, params.p
    if p == 0.0:
        if beta > 0.0:
            raise ValueError("kernel is singular at p=0 with beta > 0")
        uniform_term = 0.0
    else:
        uniform_term = beta / (p * t)
    return uniform_term + (1.0 - beta) * k / (params.eta * t)


@dataclass(frozen=True)
class TheoreticalPdf:
    """Closed-form asymptotic user-degree density, support k >= u.

    Valid for beta < 1 and p strictly inside (0, 1).  At beta = 0 it is the
    pure power law with tail exponent η/((1−p)v) + 1; for beta near 1 use
    `exponential_limit_pdf` instead.
    """

    params: GeneratorParams

    def __post_init__(self) -> None:
        p, beta = self.params.p, self.params.beta
        if beta >= 1.0:
            raise ValueError(
                "beta=1 has no finite-exponent form; use exponential_limit_pdf"
            )
        if p <= 0.0 or p >= 1.0:
            raise ValueError("p must lie strictly inside (0, 1)")

    @property
    def shape_exponent(self) -> float:
        """η/((1−p)(1−β)v): the decay index A; the tail falls as k^−(A+1)."""
        pr = self.params
        return pr.eta / ((1.0 - pr.p) * (1.0 - pr.beta) * pr.v)

    def __call__(self, k: float) -> float:
        pr = self.params
        if k < pr.u:
            return 0.0
        a = self.shape_exponent
        scale = pr.beta * pr.eta + pr.p * (1.0 - pr.beta) * pr.u
        shifted = pr.beta * pr.eta + pr.p * (1.0 - pr.beta) * k
        return a * pr.p * (1.0 - pr.beta) / scale * (shifted / scale) ** (-a - 1.0)


def theoretical_pdf(k: float, params: GeneratorParams) -> float:
    return TheoreticalPdf(params)(k)


def exponential_limit_pdf(k: float, params: GeneratorParams) -> float:
    """User-degree density in the all-uniform limit: λe^{−λ(k−u)}.

    λ = p/((1−p)v): users accrue degree at rate (1−p)v/(pt) once endpoint
    choice carries no degree preference, making exceedance geometric in k.
    """
    p = params.p
    if p <= 0.0 or p >= 1.0:
        raise ValueError("p must lie strictly inside (0, 1)")
    if k < params.u:
        return 0.0
    lam = p / ((1.0 - p) * params.v)
    return lam * math.exp(-lam * (k - params.u))


def clustering_estimates(
    c: float, k_mean: float, k_sq_mean: float
) -> tuple[float, float]:
    """Tree-based clustering estimates (f, g) from a raw triangle count c.

    f = 2c/(⟨k⟩² − ⟨k⟩) treats all neighbor pairs as potential closures;
    g = 2c/(⟨k²⟩ − ⟨k⟩) corrects with the second moment, so g/f depends
    only on the moments and never exceeds 1.
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    if k_mean <= 1.0:
        raise ValueError("mean degree must exceed 1")
    if k_sq_mean < k_mean * k_mean:
        raise ValueError("second moment below squared mean is not a distribution")
    f = 2.0 * c / (k_mean * k_mean - k_mean)
    g = 2.0 * c / (k_sq_mean - k_mean)
    return f, g


# -- distribution shape fitting ------------------------------------------------


@dataclass(frozen=True)
class ShapeFit:
    """Least-squares CCDF fits of a degree histogram under both hypotheses."""

    power_law_exponent: float
    power_law_r2: float
    exponential_rate: float
    exponential_r2: float

    @property
    def preferred(self) -> str:
        if self.power_law_r2 >= self.exponential_r2:
            return "power_law"
        return "exponential"


def _r_squared(y: np.ndarray, fitted: np.ndarray) -> float:
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def fit_distribution_shape(hist: DegreeHistogram) -> ShapeFit:
    """Fit log CCDF against log k (power law) and k (exponential).

    The CCDF is evaluated at every occupied positive degree; degree-0 bins
    only rescale it and are left out of the regressions.  The power-law
    exponent is the slope magnitude plus one (density vs exceedance).
    Requires at least 10 occupied positive degrees.
    """
    items = [(k, c) for k, c in hist.sorted_items() if k > 0 and c > 0]
    if len(items) < 10:
        raise ValueError(
            f"need >= 10 occupied positive degrees, found {len(items)}"
        )
    ks = np.array([k for k, _ in items], dtype=float)
    counts = np.array([c for _, c in items], dtype=float)
    # nodes with degree >= k, including any degree-0 mass in the total
    exceed = np.cumsum(counts[::-1])[::-1]
    ccdf = exceed / hist.node_count
    log_ccdf = np.log(ccdf)
    pl_slope, pl_icept = np.polyfit(np.log(ks), log_ccdf, 1)
    pl_fit = pl_slope * np.log(ks) + pl_icept
    ex_slope, ex_icept = np.polyfit(ks, log_ccdf, 1)
    ex_fit = ex_slope * ks + ex_icept
    return ShapeFit(
        power_law_exponent=abs(pl_slope) + 1.0,
        power_law_r2=_r_squared(log_ccdf, pl_fit),
        exponential_rate=abs(ex_slope),
        exponential_r2=_r_squared(log_ccdf, ex_fit),
    )
