"""Density clustering of reduced embeddings with an outlier bin.

Pipeline: exact core distances, mutual-reachability MST (Prim),
single-linkage hierarchy, condensed tree at min_cluster_size, and
excess-of-mass cluster selection by stability. Points that never land
in a selected cluster get label -1.

Scale conventions: lambda = 1 / epsilon (clamped to 1e12 for degenerate
zero distances). The root cluster is treated as born at the largest MST
edge, the scale at which the data is last fully connected; points shed
exactly at a cluster's birth scale stay outliers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TooFewPoints

_LAMBDA_MAX = 1e12


@dataclass
class HdbscanParams:
    min_cluster_size: int = 10
    min_samples: int | None = None

    def __post_init__(self) -> None:
        if self.min_cluster_size < 2:
            raise ValueError("min_cluster_size must be at least 2")
        if self.min_samples is None:
            self.min_samples = self.min_cluster_size
        if self.min_samples < 1:
            raise ValueError("min_samples must be at least 1")


@dataclass
class ClusterLabels:
    labels: np.ndarray
    n_clusters: int

    def sizes(self) -> list[int]:
        return [int(np.sum(self.labels == c)) for c in range(self.n_clusters)]


def _pairwise(points: np.ndarray) -> np.ndarray:
    sq = np.sum(points**2, axis=1)
    d2 = sq[:, np.newaxis] + sq[np.newaxis, :] - 2.0 * points @ points.T
    np.maximum(d2, 0.0, out=d2)
    return np.sqrt(d2)


def core_distances(points: np.ndarray, k: int) -> np.ndarray:
    """Distance to the k-th nearest neighbor, self excluded, exact."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if k < 1 or k >= n:
        raise TooFewPoints(f"k={k} needs at least {k + 1} points, got {n}")
    dist = _pairwise(points)
    # row-sorted distances include the self zero at the front; dropping
    # one zero shifts ranks by exactly one, so the k-th neighbor sits at
    # sorted index k
    return np.sort(dist, axis=1)[:, k]


def mutual_reachability(dist_ab: float, core_a: float, core_b: float) -> float:
    """max(core_a, core_b, d(a, b))."""
    return max(core_a, core_b, dist_ab)


def build_mst(points: np.ndarray, core: np.ndarray) -> np.ndarray:
    """Minimum spanning tree of the mutual-reachability graph via Prim.

    Returns an (n-1, 3) array of rows (u, v, weight) with u < v. Ties
    are broken by (weight, smaller endpoint, larger endpoint).
    """
    points = np.asarray(points, dtype=np.float64)
    core = np.asarray(core, dtype=np.float64)
    n = points.shape[0]
    dist = _pairwise(points)
    mreach = np.maximum(dist, np.maximum(core[:, np.newaxis], core[np.newaxis, :]))

    in_tree = np.zeros(n, dtype=bool)
    in_tree[0] = True
    best_w = mreach[0].copy()
    best_from = np.zeros(n, dtype=np.int64)
    best_w[0] = np.inf

    idx = np.arange(n)
    edges = np.empty((n - 1, 3), dtype=np.float64)
    for step in range(n - 1):
        cand = idx[~in_tree]
        lo = np.minimum(cand, best_from[cand])
        hi = np.maximum(cand, best_from[cand])
        pick = cand[np.lexsort((hi, lo, best_w[cand]))[0]]
        f = best_from[pick]
        edges[step] = (min(pick, f), max(pick, f), best_w[pick])

        in_tree[pick] = True
        best_w[pick] = np.inf
        w_new = mreach[pick]
        open_mask = ~in_tree
        improved = open_mask & (w_new < best_w)
        best_w[improved] = w_new[improved]
        best_from[improved] = pick
        tied = open_mask & ~improved & (w_new == best_w)
        if np.any(tied):
            u = idx[tied]
            new_lo, new_hi = np.minimum(u, pick), np.maximum(u, pick)
            old_lo, old_hi = np.minimum(u, best_from[u]), np.maximum(u, best_from[u])
            better = (new_lo < old_lo) | ((new_lo == old_lo) & (new_hi < old_hi))
            best_from[u[better]] = pick
    return edges


def _lam(dist: float) -> float:
    if dist <= 1.0 / _LAMBDA_MAX:
        return _LAMBDA_MAX
    return 1.0 / dist


def condense_and_extract(
    mst_edges: np.ndarray, min_cluster_size: int, n_points: int
) -> ClusterLabels:
    """Build the condensed hierarchy and pick stable clusters.

    A split keeps the parent cluster alive through its one surviving
    side when the other side is smaller than min_cluster_size; those
    small-side points fall out at the split scale. Splits with two
    surviving sides create child clusters. Cluster stability is
    sum(lambda_fallout - lambda_birth) over member points; a parent
    replaces its children only when strictly more stable.
    """
    n = n_points
    labels = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return ClusterLabels(labels=labels, n_clusters=0)
    if n < min_cluster_size or n < 2:
        return ClusterLabels(labels=labels, n_clusters=0)

    edges = np.asarray(mst_edges, dtype=np.float64)
    order = np.lexsort((edges[:, 1], edges[:, 0], edges[:, 2]))
    edges = edges[order]

    # single-linkage dendrogram via union-find; component roots double as
    # dendrogram node ids (leaves 0..n-1, merges n..2n-2)
    uf_parent = np.arange(2 * n - 1, dtype=np.int64)
    child_left = np.zeros(2 * n - 1, dtype=np.int64)
    child_right = np.zeros(2 * n - 1, dtype=np.int64)
    node_dist = np.zeros(2 * n - 1, dtype=np.float64)
    node_size = np.ones(2 * n - 1, dtype=np.int64)

    def find(x: int) -> int:
        root = x
        while uf_parent[root] != root:
            root = uf_parent[root]
        while uf_parent[x] != root:
            uf_parent[x], x = root, uf_parent[x]
        return root

    nxt = n
    for u, v, w in edges:
        ru, rv = find(int(u)), find(int(v))
        child_left[nxt] = ru
        child_right[nxt] = rv
        node_dist[nxt] = w
        node_size[nxt] = node_size[ru] + node_size[rv]
        uf_parent[ru] = nxt
        uf_parent[rv] = nxt
        nxt += 1
    root_node = 2 * n - 2

    def leaves_under(node: int) -> list[int]:
        out, stack = [], [node]
        while stack:
            cur = stack.pop()
            if cur < n:
                out.append(cur)
            else:
                stack.append(int(child_left[cur]))
                stack.append(int(child_right[cur]))
        return out

    # condensed tree ---------------------------------------------------
    birth: list[float] = [_lam(float(node_dist[root_node]))]
    parent_cluster: list[int] = [-1]
    cluster_kids: list[list[int]] = [[]]
    noise: list[list[tuple[int, float]]] = [[]]

    walk = [(root_node, 0)]
    while walk:
        node, cl = walk.pop()
        while True:
            left, right = int(child_left[node]), int(child_right[node])
            lam_split = _lam(float(node_dist[node]))
            sl, sr = int(node_size[left]), int(node_size[right])
            big_l, big_r = sl >= min_cluster_size, sr >= min_cluster_size
            if big_l and big_r:
                for side in (left, right):
                    new_id = len(birth)
                    birth.append(lam_split)
                    parent_cluster.append(cl)
                    cluster_kids.append([])
                    noise.append([])
                    cluster_kids[cl].append(new_id)
                    if node_size[side] == 1:
                        noise[new_id].append((side, _LAMBDA_MAX))
                    else:
                        walk.append((side, new_id))
                break
            if big_l or big_r:
                keep, shed = (left, right) if big_l else (right, left)
                for p in leaves_under(shed):
                    noise[cl].append((p, lam_split))
                node = keep
                if node < n:
                    noise[cl].append((node, _LAMBDA_MAX))
                    break
                continue
            for p in leaves_under(node):
                noise[cl].append((p, lam_split))
            break

    n_clusters_total = len(birth)

    # stability --------------------------------------------------------
    stability = np.zeros(n_clusters_total, dtype=np.float64)
    for cl in range(n_clusters_total):
        for _, lam_p in noise[cl]:
            stability[cl] += lam_p - birth[cl]
        for kid in cluster_kids[cl]:
            stability[cl] += _points_under(kid, cluster_kids, noise) * (birth[kid] - birth[cl])

    # excess-of-mass selection ------------------------------------------
    selected = set()
    value = np.zeros(n_clusters_total, dtype=np.float64)
    for cl in _postorder(cluster_kids):
        kids = cluster_kids[cl]
        if not kids:
            selected.add(cl)
            value[cl] = stability[cl]
        elif stability[cl] > sum(value[k] for k in kids):
            for d in _descendants(cl, cluster_kids):
                selected.discard(d)
            selected.add(cl)
            value[cl] = stability[cl]
        else:
            value[cl] = sum(value[k] for k in kids)

    # labeling -----------------------------------------------------------
    cover = [-1] * n_clusters_total
    for cl in range(n_clusters_total):  # parents precede children by construction
        if cl in selected:
            cover[cl] = cl
        elif parent_cluster[cl] >= 0:
            cover[cl] = cover[parent_cluster[cl]]
    members: dict[int, list[int]] = {cl: [] for cl in selected}
    for cl in range(n_clusters_total):
        top = cover[cl]
        if top < 0:
            continue
        for p, lam_p in noise[cl]:
            if lam_p > birth[top]:
                members[top].append(p)

    kept = [(cl, pts) for cl, pts in members.items() if len(pts) >= min_cluster_size]
    kept.sort(key=lambda item: (-len(item[1]), min(item[1])))
    for new_label, (_, pts) in enumerate(kept):
        labels[pts] = new_label
    return ClusterLabels(labels=labels, n_clusters=len(kept))


def _points_under(cl: int, cluster_kids: list[list[int]], noise) -> int:
    """Total points that ever belonged to condensed cluster cl."""
    total, stack = 0, [cl]
    while stack:
        cur = stack.pop()
        total += len(noise[cur])
        stack.extend(cluster_kids[cur])
    return total


def _postorder(cluster_kids: list[list[int]]) -> list[int]:
    out: list[int] = []
    stack: list[tuple[int, bool]] = [(0, False)]
    while stack:
        cl, expanded = stack.pop()
        if expanded:
            out.append(cl)
        else:
            stack.append((cl, True))
            for kid in cluster_kids[cl]:
                stack.append((kid, False))
    return out


def _descendants(cl: int, cluster_kids: list[list[int]]) -> list[int]:
    out, stack = [], list(cluster_kids[cl])
    while stack:
        cur = stack.pop()
        out.append(cur)
        stack.extend(cluster_kids[cur])
    return out


def cluster(points: np.ndarray, params: HdbscanParams) -> ClusterLabels:
    """Full clustering pipeline; labels sorted by descending cluster size,
    ties by the lowest member index."""
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    if n == 0:
        return ClusterLabels(labels=np.empty(0, dtype=np.int64), n_clusters=0)
    if n < params.min_cluster_size or params.min_samples >= n or n < 2:
        return ClusterLabels(labels=np.full(n, -1, dtype=np.int64), n_clusters=0)
    core = core_distances(points, params.min_samples)
    edges = build_mst(points, core)
    return condense_and_extract(edges, params.min_cluster_size, n)
