"""Simple bipartite graph with O(1) degree-proportional sampling.

The graph is append-only: nodes and edges can be added, never removed.
Every edge connects a user to an item.  Alongside the adjacency lists the
graph maintains, per modality, a flat *endpoint index* in which each node
appears once per incident edge; picking a uniform entry of that index is
exactly a degree-proportional draw, in constant time.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from random import Random


class Modality(IntEnum):
    """One of the two node classes of a bipartite graph."""

    USER = 0
    ITEM = 1

    @property
    def opposite(self) -> "Modality":
        return Modality(1 - self.value)


USER = Modality.USER
ITEM = Modality.ITEM


@dataclass(frozen=True)
class NodeRef:
    """Reference to a node: its modality plus a dense per-modality index."""

    modality: Modality
    index: int

    def __repr__(self) -> str:  # e.g. u13, i4
        return f"{'ui'[self.modality]}{self.index}"


class DuplicateEdgeError(ValueError):
    """Raised when adding a (user, item) edge that already exists."""


class EmptyModalityError(ValueError):
    """Raised when a draw is requested from a modality with no candidates."""


class Bigraph:
    """Growing simple bipartite graph.

    Invariants maintained by construction:
      * every adjacency entry refers to the opposite modality;
      * no duplicate (user, item) edge;
      * sum of user degrees == sum of item degrees == edge count;
      * node n appears exactly degree(n) times in its modality's
        endpoint index.
    """

    __slots__ = ("_adj", "_endpoints", "_edge_count")

    def __init__(self) -> None:
        # Indexed by Modality value: _adj[USER][u] lists item indices.
        self._adj: tuple[list[list[int]], list[list[int]]] = ([], [])
        self._endpoints: tuple[list[int], list[int]] = ([], [])
        self._edge_count = 0

    @classmethod
    def from_pairs(cls, m: int) -> "Bigraph":
        """Initial graph: m users, m items, and the m edges (u_k, i_k)."""
        if m < 1:
            raise ValueError("initial pair count m must be >= 1")
        g = cls()
        user_adj, item_adj = g._adj
        for k in range(m):
            user_adj.append([k])
            item_adj.append([k])
        g._endpoints[USER].extend(range(m))
        g._endpoints[ITEM].extend(range(m))
        g._edge_count = m
        return g

    # -- counts ------------------------------------------------------------

    @property
    def user_count(self) -> int:
        return len(self._adj[USER])

    @property
    def item_count(self) -> int:
        return len(self._adj[ITEM])

    @property
    def edge_count(self) -> int:
        return self._edge_count

    def node_count(self, modality: Modality) -> int:
        return len(self._adj[modality])

    # -- node / edge access --------------------------------------------------

    def degree(self, node: NodeRef) -> int:
        return len(self._adj[node.modality][node.index])

    def neighbors(self, node: NodeRef) -> list[NodeRef]:
        opp = Modality(1 - node.modality)
        return [NodeRef(opp, j) for j in self._adj[node.modality][node.index]]

    def adjacency(self, modality: Modality) -> list[list[int]]:
        """Raw adjacency lists for a modality (opposite-modality indices).

        Returned lists are live views; callers must not mutate them.
        """
        return self._adj[modality]

    def endpoint_index(self, modality: Modality) -> list[int]:
        """Flat edge-endpoint list (one entry per incident edge). Read only."""
        return self._endpoints[modality]

    def degrees(self, modality: Modality) -> list[int]:
        return [len(a) for a in self._adj[modality]]

    def has_edge(self, user_index: int, item_index: int) -> bool:
        # Scan the smaller adjacency list of the two endpoints.
        ua = self._adj[USER][user_index]
        ia = self._adj[ITEM][item_index]
        if len(ua) <= len(ia):
            return item_index in ua
        return user_index in ia

    # -- mutation ------------------------------------------------------------

    def add_node(self, modality: Modality) -> NodeRef:
        adj = self._adj[modality]
        adj.append([])
        return NodeRef(Modality(modality), len(adj) - 1)

    def add_edge(self, user: NodeRef, item: NodeRef) -> None:
        if user.modality is not USER or item.modality is not ITEM:
            raise ValueError("add_edge expects (user, item) in that order")
        u, i = user.index, item.index
        if not (0 <= u < self.user_count and 0 <= i < self.item_count):
            raise IndexError("node index out of range")
        if self.has_edge(u, i):
            raise DuplicateEdgeError(f"edge ({user}, {item}) already present")
        self._add_edge_unchecked(u, i)

    def _add_edge_unchecked(self, user_index: int, item_index: int) -> None:
        # Hot path for the generator/loader, which guarantee non-duplication.
        self._adj[USER][user_index].append(item_index)
        self._adj[ITEM][item_index].append(user_index)
        self._endpoints[USER].append(user_index)
        self._endpoints[ITEM].append(item_index)
        self._edge_count += 1

    # -- sampling ------------------------------------------------------------

    def draw_uniform_index(self, modality: Modality, rng: Random) -> int:
        n = len(self._adj[modality])
        if n == 0:
            raise EmptyModalityError(f"no {Modality(modality).name} nodes to draw from")
        return int(rng.random() * n)

    def draw_uniform(self, modality: Modality, rng: Random) -> NodeRef:
        """Each node of the modality with probability 1/count."""
        return NodeRef(Modality(modality), self.draw_uniform_index(modality, rng))

    def draw_preferential_index(self, modality: Modality, rng: Random) -> int:
        ep = self._endpoints[modality]
        if not ep:
            raise EmptyModalityError(
                f"no {Modality(modality).name} node has positive degree"
            )
        return ep[int(rng.random() * len(ep))]

    def draw_preferential(self, modality: Modality, rng: Random) -> NodeRef:
        """Each node with probability degree/edge_count (uniform endpoint pick)."""
        return NodeRef(Modality(modality), self.draw_preferential_index(modality, rng))

    # -- integrity -------------------------------------------------------------

    def validate(self) -> None:
        """Recheck all structural invariants from scratch (test support)."""
        for mod in (USER, ITEM):
            opp_count = len(self._adj[1 - mod])
            for idx, adj in enumerate(self._adj[mod]):
                if len(set(adj)) != len(adj):
                    raise AssertionError(f"duplicate edge at {Modality(mod).name} {idx}")
                for j in adj:
                    if not 0 <= j < opp_count:
                        raise AssertionError("adjacency entry out of range")
        deg_u = sum(len(a) for a in self._adj[USER])
        deg_i = sum(len(a) for a in self._adj[ITEM])
        if not (deg_u == deg_i == self._edge_count):
            raise AssertionError("degree sums do not match edge count")
        for mod in (USER, ITEM):
            if len(self._endpoints[mod]) != self._edge_count:
                raise AssertionError("endpoint index length mismatch")
            counts = [0] * len(self._adj[mod])
            for idx in self._endpoints[mod]:
                counts[idx] += 1
            if counts != [len(a) for a in self._adj[mod]]:
                raise AssertionError("endpoint index multiset mismatch")
        # Cross-check: adjacency describes one consistent edge multiset.
        from_users = sorted(
            (u, i) for u, adj in enumerate(self._adj[USER]) for i in adj
        )
        from_items = sorted(
            (u, i) for i, adj in enumerate(self._adj[ITEM]) for u in adj
        )
        if from_users != from_items:
            raise AssertionError("user and item adjacency disagree")

    def edges(self) -> list[tuple[int, int]]:
        """All edges as (user index, item index), sorted."""
        return sorted((u, i) for u, adj in enumerate(self._adj[USER]) for i in adj)

    def __repr__(self) -> str:
        return (
            f"Bigraph(users={self.user_count}, items={self.item_count}, "
            f"edges={self._edge_count})"
        )
