"""Group-average agglomerative clustering over document vectors.

The full merge tree is computed once; a flat clustering at any cluster
count is a cheap cut afterwards, and cuts at different counts nest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TrigraphError

_INVERSION_TOL = 1e-9  # group-average merges must be non-decreasing


@dataclass
class Dendrogram:
    """Merge tree: leaves are 0..n-1, internal nodes n..2n-2 in merge order.

    Each merge record is (left, right, distance, new_id) with left < right
    as node ids.
    """

    n_leaves: int
    merges: list[tuple[int, int, float, int]]


@dataclass
class ClusterAssignment:
    """Dense per-document cluster labels in [0, n_clusters)."""

    labels: list[int]
    n_clusters: int


def pairwise_distances(vectors: np.ndarray, metric: str = "cosine") -> np.ndarray:
    """Symmetric zero-diagonal distance matrix over the rows of ``vectors``.

    Cosine distance is 1 - u.v/(|u||v|); all-zero rows sit at distance 1
    from every other row so they shed into singletons last.
    """
    X = np.asarray(vectors, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise ValueError("expected a non-empty 2-D array")
    n = X.shape[0]
    if metric == "cosine":
        norms = np.sqrt(np.sum(X * X, axis=1))
        zero = norms == 0
        safe = np.where(zero, 1.0, norms)
        sims = (X @ X.T) / np.outer(safe, safe)
        dist = 1.0 - sims
        dist[zero, :] = 1.0
        dist[:, zero] = 1.0
    elif metric == "euclidean":
        sq = np.sum(X * X, axis=1)
        dist = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
        np.clip(dist, 0.0, None, out=dist)
        np.sqrt(dist, out=dist)
    else:
        raise ValueError(f"unknown metric {metric!r}")
    dist = 0.5 * (dist + dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def _pair_key(nid_a: int, nid_b: int) -> tuple[int, int]:
    return (nid_a, nid_b) if nid_a < nid_b else (nid_b, nid_a)


def hac_group_average(dist: np.ndarray) -> Dendrogram:
    """Bottom-up clustering merging the pair with least mean inter-cluster distance.

    Distances update by the size-weighted average rule
    ``d(k, i+j) = (|i| d(k,i) + |j| d(k,j)) / (|i| + |j|)``. Exact distance
    ties break toward the lexicographically smallest (node id, node id) pair,
    which makes the tree deterministic. Runs on a nearest-neighbor cache,
    O(n^2) in the common case.
    """
    D = np.array(dist, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError("distance matrix must be square")
    n = D.shape[0]
    if n == 0:
        raise ValueError("empty distance matrix")
    if n == 1:
        return Dendrogram(1, [])

    work = D.copy()
    np.fill_diagonal(work, np.inf)
    active = np.ones(n, dtype=bool)
    size = np.ones(n, dtype=np.int64)
    nid = np.arange(n, dtype=np.int64)
    nn_dist = np.full(n, np.inf)
    nn_idx = np.full(n, -1, dtype=np.int64)

    def rescan(i: int) -> None:
        row = work[i]
        m = row.min()
        if not np.isfinite(m):
            nn_dist[i] = np.inf
            nn_idx[i] = -1
            return
        ties = np.flatnonzero(row == m)
        if len(ties) == 1:
            best = int(ties[0])
        else:
            best = min((_pair_key(int(nid[i]), int(nid[j])), int(j)) for j in ties)[1]
        nn_dist[i] = m
        nn_idx[i] = best

    for i in range(n):
        rescan(i)

    merges: list[tuple[int, int, float, int]] = []
    last_height = -np.inf
    for step in range(n - 1):
        m = nn_dist.min()
        candidates = np.flatnonzero(nn_dist == m)
        a = min(
            (_pair_key(int(nid[i]), int(nid[nn_idx[i]])), int(i)) for i in candidates
        )[1]
        b = int(nn_idx[a])
        height = float(work[a, b])
        if height < last_height - _INVERSION_TOL:
            raise TrigraphError(
                f"merge distance inversion at step {step}: {height} after {last_height}"
            )
        last_height = max(last_height, height)
        lo, hi = _pair_key(int(nid[a]), int(nid[b]))
        new_id = n + step
        merges.append((lo, hi, height, new_id))

        keep, drop = (a, b) if a < b else (b, a)
        merged_row = (size[keep] * work[keep] + size[drop] * work[drop]) / (
            size[keep] + size[drop]
        )
        work[keep, :] = merged_row
        work[:, keep] = merged_row
        work[keep, keep] = np.inf
        work[drop, :] = np.inf
        work[:, drop] = np.inf
        active[drop] = False
        nn_dist[drop] = np.inf
        nn_idx[drop] = -1
        size[keep] += size[drop]
        nid[keep] = new_id

        if step == n - 2:
            break
        rescan(keep)
        for i in np.flatnonzero(active):
            if i != keep and nn_idx[i] in (keep, drop):
                rescan(int(i))
    return Dendrogram(n, merges)


def cut(dg: Dendrogram, n_clusters: int) -> ClusterAssignment:
    """Flat clustering with exactly ``n_clusters`` groups.

    Applies the first n - n_clusters merges and labels the surviving
    subtrees densely, ordered by their smallest leaf index.
    """
    n = dg.n_leaves
    if not 1 <= n_clusters <= n:
        raise ValueError(f"cluster count {n_clusters} outside [1, {n}]")
    groups: dict[int, list[int]] = {leaf: [leaf] for leaf in range(n)}
    for left, right, _, new_id in dg.merges[: n - n_clusters]:
        groups[new_id] = groups.pop(left) + groups.pop(right)
    ordered = sorted(groups.values(), key=min)
    labels = [0] * n
    for cluster_id, leaves in enumerate(ordered):
        for leaf in leaves:
            labels[leaf] = cluster_id
    return ClusterAssignment(labels, n_clusters)


def assignment_to_csv(doc_keys: list[str], assignment: ClusterAssignment) -> str:
    lines = ["doc_key,cluster_id"]
    lines.extend(f"{key},{label}" for key, label in zip(doc_keys, assignment.labels))
    return "".join(line + "\n" for line in lines)


def dendrogram_to_csv(dg: Dendrogram) -> str:
    lines = ["left,right,distance,new_id"]
    lines.extend(f"{l},{r},{d!r},{nid}" for l, r, d, nid in dg.merges)
    return "".join(line + "\n" for line in lines)
