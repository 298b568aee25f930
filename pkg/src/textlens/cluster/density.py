"""Density-based clustering via the full HDBSCAN pipeline, from scratch.

Stages: core distances -> mutual-reachability graph -> minimum spanning tree
(Prim, O(n^2)) -> single-linkage hierarchy -> condensed tree at
min_cluster_size -> excess-of-mass cluster selection.  Everything is
deterministic: distance ties in the MST break toward the smaller point index,
and cluster IDs are renumbered by each cluster's first member.

Conventions that the brute-force test oracles share:

* A point's core distance is the distance to its min_samples-th nearest
  neighbor counting the point itself, so min_samples=1 degenerates to plain
  single linkage and n == min_cluster_size stays well-defined.
* The hierarchy root is a selectable cluster.  A run whose points form one
  dense mass therefore yields K=1 rather than all-noise.
* Zero merge distances map to lambda = +inf; membership probability is 1.0
  for such points.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

# A parent whose stability exceeds its children's total by no more than this
# is considered tied, and ties prefer the finer (children) clusters.
STABILITY_TIE_EPS = 1e-12


@dataclass(frozen=True)
class HdbscanConfig:
    min_cluster_size: int = 15
    min_samples: int | None = None  # None means "= min_cluster_size"

    def __post_init__(self) -> None:
        if self.min_cluster_size < 2:
            raise ValueError(
                f"min_cluster_size must be >= 2, got {self.min_cluster_size}"
            )
        if self.min_samples is None:
            object.__setattr__(self, "min_samples", self.min_cluster_size)
        if self.min_samples < 1:
            raise ValueError(f"min_samples must be >= 1, got {self.min_samples}")
        if self.min_samples > self.min_cluster_size:
            raise ValueError(
                f"min_samples ({self.min_samples}) must be <= "
                f"min_cluster_size ({self.min_cluster_size})"
            )


@dataclass
class ClusterAssignment:
    labels: np.ndarray         # (n,) int, -1 = noise, clusters 0..K-1
    num_clusters: int
    probabilities: np.ndarray  # (n,) float in [0, 1], 0 for noise


@dataclass
class CondensedTree:
    """Rows (parent, child, lambda, size); child < num_points means a point."""

    num_points: int
    parent: np.ndarray
    child: np.ndarray
    lam: np.ndarray
    size: np.ndarray

    @property
    def root(self) -> int:
        return self.num_points

    def cluster_rows(self) -> np.ndarray:
        return self.child >= self.num_points

    def point_rows(self) -> np.ndarray:
        return self.child < self.num_points


def pairwise_distances(points: np.ndarray) -> np.ndarray:
    """Dense Euclidean distance matrix in double precision."""
    x = np.asarray(points, dtype=np.float64)
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(d2)


def core_distances(distances: np.ndarray, min_samples: int) -> np.ndarray:
    """Distance to the min_samples-th nearest neighbor, the point included."""
    n = distances.shape[0]
    if min_samples > n:
        raise ValueError(f"min_samples {min_samples} exceeds point count {n}")
    return np.sort(distances, axis=1)[:, min_samples - 1]


def mutual_reachability(distances: np.ndarray, core: np.ndarray) -> np.ndarray:
    """d_mr(a, b) = max(core(a), core(b), d(a, b))."""
    out = np.maximum(distances, core[:, None])
    np.maximum(out, core[None, :], out=out)
    return out


def minimum_spanning_tree(graph: np.ndarray) -> np.ndarray:
    """Prim's algorithm over a dense weight matrix.

    Returns edges as an (n-1, 3) array of (u, v, weight) in insertion order.
    Ties in the frontier break toward the smaller point index (argmin picks
    the first minimum).
    """
    n = graph.shape[0]
    edges = np.empty((n - 1, 3), dtype=np.float64)
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    best_from = np.full(n, -1, dtype=np.int64)
    in_tree[0] = True
    current = 0
    for step in range(n - 1):
        row = graph[current]
        better = ~in_tree & (row < key)
        key[better] = row[better]
        best_from[better] = current
        frontier = np.where(in_tree, np.inf, key)
        nxt = int(np.argmin(frontier))
        edges[step] = (best_from[nxt], nxt, key[nxt])
        in_tree[nxt] = True
        current = nxt
    return edges


def single_linkage(mst_edges: np.ndarray, num_points: int) -> np.ndarray:
    """Merge MST edges (ascending weight) into a dendrogram.

    Returns an (n-1, 4) matrix of (left, right, distance, size) where node ids
    0..n-1 are points and n+i is the i-th merge, scipy linkage style.
    """
    order = np.argsort(mst_edges[:, 2], kind="stable")
    edges = mst_edges[order]
    uf_parent = list(range(num_points))
    node_of = list(range(num_points))
    node_size = {i: 1 for i in range(num_points)}
    linkage = np.zeros((num_points - 1, 4), dtype=np.float64)

    def find(a: int) -> int:
        root = a
        while uf_parent[root] != root:
            root = uf_parent[root]
        while uf_parent[a] != root:
            uf_parent[a], a = root, uf_parent[a]
        return root

    for i in range(edges.shape[0]):
        u, v, w = int(edges[i, 0]), int(edges[i, 1]), float(edges[i, 2])
        ru, rv = find(u), find(v)
        left, right = node_of[ru], node_of[rv]
        merged = num_points + i
        size = node_size[left] + node_size[right]
        linkage[i] = (left, right, w, size)
        node_size[merged] = size
        uf_parent[rv] = ru
        node_of[ru] = merged
    return linkage


def _subtree_points(linkage: np.ndarray, node: int, num_points: int) -> list[int]:
    """All leaf ids under a dendrogram node (DFS, deterministic order)."""
    points: list[int] = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur < num_points:
            points.append(cur)
        else:
            row = linkage[cur - num_points]
            stack.append(int(row[1]))
            stack.append(int(row[0]))
    return points


def condense_tree(
    linkage: np.ndarray, num_points: int, min_cluster_size: int
) -> CondensedTree:
    """Prune the dendrogram into the condensed cluster tree.

    Walking down from the root: a split where both sides hold at least
    min_cluster_size points creates two child clusters; otherwise the big side
    continues as the same cluster and every point on the small side departs at
    the split's lambda = 1/distance.
    """
    root = 2 * num_points - 2
    relabel = {root: num_points}
    next_label = num_points + 1
    parents: list[int] = []
    children: list[int] = []
    lams: list[float] = []
    sizes: list[int] = []

    def emit(parent: int, child: int, lam: float, size: int) -> None:
        parents.append(parent)
        children.append(child)
        lams.append(lam)
        sizes.append(size)

    def node_size(node: int) -> int:
        return 1 if node < num_points else int(linkage[node - num_points, 3])

    queue: deque[int] = deque([root])
    while queue:
        node = queue.popleft()
        cluster = relabel[node]
        row = linkage[node - num_points]
        left, right = int(row[0]), int(row[1])
        dist = float(row[2])
        lam = 1.0 / dist if dist > 0.0 else np.inf
        sides = [(left, node_size(left)), (right, node_size(right))]
        big_enough = [side for side in sides if side[1] >= min_cluster_size]

        if len(big_enough) == 2:
            for child, size in sides:
                relabel[child] = next_label
                emit(cluster, next_label, lam, size)
                next_label += 1
                if child >= num_points:
                    queue.append(child)
        else:
            for child, size in sides:
                if len(big_enough) == 1 and (child, size) == big_enough[0]:
                    relabel[child] = cluster
                    if child >= num_points:
                        queue.append(child)
                else:
                    for point in _subtree_points(linkage, child, num_points):
                        emit(cluster, point, lam, 1)

    return CondensedTree(
        num_points=num_points,
        parent=np.asarray(parents, dtype=np.int64),
        child=np.asarray(children, dtype=np.int64),
        lam=np.asarray(lams, dtype=np.float64),
        size=np.asarray(sizes, dtype=np.int64),
    )


def compute_stability(tree: CondensedTree) -> dict[int, float]:
    """Excess-of-mass stability: sum over rows of (lambda - birth) * size.

    The root is born at lambda 0; a cluster born at infinite lambda (duplicate
    points) contributes nothing beyond its birth.
    """
    births: dict[int, float] = {tree.root: 0.0}
    for parent, child, lam in zip(tree.parent, tree.child, tree.lam):
        if child >= tree.num_points:
            births[int(child)] = float(lam)
    stability = {cluster: 0.0 for cluster in births}
    for parent, lam, size in zip(tree.parent, tree.lam, tree.size):
        birth = births[int(parent)]
        if math.isinf(birth):
            continue
        stability[int(parent)] += (float(lam) - birth) * int(size)
    return stability


def select_clusters(tree: CondensedTree, stability: dict[int, float]) -> list[int]:
    """Pick the flat clustering maximizing total stability.

    Processes clusters bottom-up; a parent replaces its children only when its
    stability exceeds their total by more than STABILITY_TIE_EPS (ties keep
    the finer clusters).  The root participates like any other cluster.
    """
    children_of: dict[int, list[int]] = {c: [] for c in stability}
    for parent, child in zip(tree.parent, tree.child):
        if child >= tree.num_points:
            children_of[int(parent)].append(int(child))

    selected: dict[int, bool] = {}
    subtree_stability: dict[int, float] = {}
    for cluster in sorted(stability, reverse=True):
        kids = children_of[cluster]
        child_total = sum(subtree_stability[k] for k in kids)
        if not kids or stability[cluster] > child_total + STABILITY_TIE_EPS:
            selected[cluster] = True
            stack = list(kids)
            while stack:
                d = stack.pop()
                selected[d] = False
                stack.extend(children_of[d])
            subtree_stability[cluster] = stability[cluster]
        else:
            selected[cluster] = False
            subtree_stability[cluster] = child_total
    return sorted(c for c, keep in selected.items() if keep)


def _assign(
    tree: CondensedTree, chosen: list[int], n: int
) -> tuple[np.ndarray, np.ndarray, int]:
    parent_of: dict[int, int] = {}
    for parent, child in zip(tree.parent, tree.child):
        if child >= tree.num_points:
            parent_of[int(child)] = int(parent)

    chosen_set = set(chosen)
    owner_cache: dict[int, int | None] = {}

    def owner(cluster: int) -> int | None:
        """The chosen cluster at or above this condensed node, if any."""
        path: list[int] = []
        cur: int | None = cluster
        result: int | None = None
        while cur is not None:
            if cur in owner_cache:
                result = owner_cache[cur]
                break
            if cur in chosen_set:
                result = cur
                break
            path.append(cur)
            cur = parent_of.get(cur)
        for node in path:
            owner_cache[node] = result
        return result

    labels = np.full(n, -1, dtype=np.int64)
    point_lambda = np.zeros(n, dtype=np.float64)
    members: dict[int, list[int]] = {c: [] for c in chosen}
    for parent, child, lam in zip(tree.parent, tree.child, tree.lam):
        if child >= tree.num_points:
            continue
        own = owner(int(parent))
        if own is None:
            continue
        members[own].append(int(child))
        point_lambda[int(child)] = float(lam)
        labels[int(child)] = own  # provisional: condensed id

    # Final ids ordered by each cluster's first (smallest-index) member.
    order = sorted(chosen, key=lambda c: min(members[c]) if members[c] else n)
    final_id = {c: i for i, c in enumerate(c for c in order if members[c])}

    probabilities = np.zeros(n, dtype=np.float64)
    for condensed_id, fid in final_id.items():
        idx = np.asarray(members[condensed_id], dtype=np.int64)
        labels[idx] = fid
        lams = point_lambda[idx]
        lam_max = float(np.max(lams))
        if lam_max == 0.0:
            probabilities[idx] = 1.0
        else:
            with np.errstate(invalid="ignore"):
                ratio = np.where(np.isinf(lams), 1.0, lams / lam_max)
            probabilities[idx] = np.nan_to_num(ratio, nan=1.0, posinf=1.0)
    return labels, probabilities, len(final_id)


def hdbscan(points: np.ndarray, cfg: HdbscanConfig) -> ClusterAssignment:
    """Cluster points; labels are 0..K-1 with -1 for noise.

    Fewer points than min_cluster_size is not an error: everything is noise.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"expected a non-empty (n, d) matrix, got shape {pts.shape}")
    n = pts.shape[0]
    if n < cfg.min_cluster_size:
        return ClusterAssignment(
            labels=np.full(n, -1, dtype=np.int64),
            num_clusters=0,
            probabilities=np.zeros(n, dtype=np.float64),
        )
    distances = pairwise_distances(pts)
    core = core_distances(distances, cfg.min_samples)
    reach = mutual_reachability(distances, core)
    mst = minimum_spanning_tree(reach)
    linkage = single_linkage(mst, n)
    tree = condense_tree(linkage, n, cfg.min_cluster_size)
    stability = compute_stability(tree)
    chosen = select_clusters(tree, stability)
    labels, probabilities, k = _assign(tree, chosen, n)
    return ClusterAssignment(labels=labels, num_clusters=k, probabilities=probabilities)


def condensed_tree_dump(tree: CondensedTree, stability: dict[int, float] | None = None) -> list[dict]:
    """JSON-ready view of the condensed tree's cluster nodes (for debugging).

    lambda values of +inf serialize as null.
    """
    stability = stability if stability is not None else compute_stability(tree)
    births: dict[int, float] = {tree.root: 0.0}
    sizes: dict[int, int] = {}
    for parent, child, lam, size in zip(tree.parent, tree.child, tree.lam, tree.size):
        if child >= tree.num_points:
            births[int(child)] = float(lam)
            sizes[int(child)] = int(size)
    sizes[tree.root] = tree.num_points
    parent_of = {
        int(c): int(p)
        for p, c in zip(tree.parent, tree.child)
        if c >= tree.num_points
    }

    def fin(x: float) -> float | None:
        return None if math.isinf(x) else x

    nodes = []
    for cluster in sorted(stability):
        own_rows = tree.parent == cluster
        death = float(np.max(tree.lam[own_rows])) if own_rows.any() else math.inf
        nodes.append(
            {
                "node": cluster,
                "parent": parent_of.get(cluster),
                "lambda_birth": fin(births[cluster]),
                "lambda_death": fin(death),
                "size": sizes[cluster],
                "stability": fin(stability[cluster]),
            }
        )
    return nodes
