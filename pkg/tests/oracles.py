"""Brute-force reference computations used to pin the analytics module.

Everything here works from raw adjacency lists with plain BFS and set
expansion, deliberately sharing no code with the package internals.
"""

from collections import deque


def bfs_distances(user_adj, item_adj, modality, index):
    """Hop distance from (modality, index) to every reachable node.

    Returns {(modality, index): distance}. Modalities are 0 (user), 1 (item).
    """
    adj = (user_adj, item_adj)
    dist = {(modality, index): 0}
    queue = deque([(modality, index)])
    while queue:
        mod, i = queue.popleft()
        d = dist[(mod, i)]
        for nb in adj[mod][i]:
            key = (1 - mod, nb)
            if key not in dist:
                dist[key] = d + 1
                queue.append(key)
    return dist


def second_neighbors(user_adj, item_adj, modality, index):
    """Distinct nodes at distance exactly 2, the node itself excluded."""
    dist = bfs_distances(user_adj, item_adj, modality, index)
    return {
        i for (mod, i), d in dist.items() if d == 2 and mod == modality
    }


def blcc(user_adj, item_adj, modality, index):
    """1 − |second neighbors| / Σ(neighbor degree − 1); None on 0 denominator."""
    adj = (user_adj, item_adj)
    opp = adj[1 - modality]
    denom = sum(len(opp[i]) - 1 for i in adj[modality][index])
    if denom == 0:
        return None
    n2 = len(second_neighbors(user_adj, item_adj, modality, index))
    return 1.0 - n2 / denom


def similarity(user_adj, item_adj, user_index):
    """(similar user count, distinct items owned by similar users)."""
    similar = set()
    for i in user_adj[user_index]:
        for x in item_adj[i]:
            if x != user_index:
                similar.add(x)
    items = set()
    for x in similar:
        items.update(user_adj[x])
    return len(similar), len(items)


def mean_second_neighbors(user_adj, item_adj, modality):
    adj = (user_adj, item_adj)[modality]
    if not adj:
        return 0.0
    total = sum(
        len(second_neighbors(user_adj, item_adj, modality, j))
        for j in range(len(adj))
    )
    return total / len(adj)
