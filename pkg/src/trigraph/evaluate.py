"""Scoring, baselines, and significance testing for disambiguation runs.

Macro-F1 is the unweighted mean of per-class F1 after an optimal one-to-one
cluster-to-class matching, so every true class counts equally no matter how
small it is.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import t as t_dist

from .cluster import ClusterAssignment, cut, hac_group_average, pairwise_distances
from .errors import ConfigError, UndefinedTestError
from .ingest import Instance


@dataclass
class EvalReport:
    """Scores for one run or an aggregate over several runs."""

    macro_f1: float
    per_class_f1: list[float]
    alignment: dict[int, int]
    n_runs: int = 1
    mean: float = 0.0
    std: float = 0.0
    per_run: list[float] = field(default_factory=list)
    baselines: dict[str, float] = field(default_factory=dict)
    isolated_docs: int = 0
    traces: list[str] = field(default_factory=list)
    failed_runs: list[str] = field(default_factory=list)


def _labels(pred: ClusterAssignment | Sequence[int]) -> tuple[list[int], int]:
    if isinstance(pred, ClusterAssignment):
        return list(pred.labels), pred.n_clusters
    labels = [int(x) for x in pred]
    return labels, (max(labels) + 1 if labels else 0)


def macro_f1(pred: ClusterAssignment | Sequence[int], truth: Sequence[int]) -> EvalReport:
    """Score a clustering against dense ground-truth class labels.

    Builds the cluster-by-class contingency table, matches clusters to
    classes one-to-one so that total F1 is maximal, and averages per-class
    F1 over all true classes; unmatched classes score zero.
    """
    labels, n_pred = _labels(pred)
    truth = [int(x) for x in truth]
    if len(labels) != len(truth):
        raise ValueError(f"{len(labels)} predictions vs {len(truth)} truth labels")
    if not labels:
        raise ValueError("cannot score an empty assignment")
    n_true = max(truth) + 1
    table = np.zeros((n_pred, n_true), dtype=np.int64)
    for c, g in zip(labels, truth):
        table[c, g] += 1
    cluster_sizes = table.sum(axis=1)
    class_sizes = table.sum(axis=0)
    # F1 = 2PR/(P+R) collapses to 2*overlap/(|cluster| + |class|); a pairing
    # of an unused cluster id with an unused class id scores 0, not 0/0
    denom = cluster_sizes[:, None] + class_sizes[None, :]
    f1 = np.divide(2.0 * table, denom, out=np.zeros_like(table, dtype=float), where=denom > 0)
    rows, cols = linear_sum_assignment(-f1)
    per_class = [0.0] * n_true
    alignment: dict[int, int] = {}
    for c, g in zip(rows, cols):
        if table[c, g] > 0:
            per_class[g] = float(f1[c, g])
            alignment[int(c)] = int(g)
    score = float(np.mean(per_class))
    return EvalReport(score, per_class, alignment, n_runs=1, mean=score, std=0.0, per_run=[score])


def baseline_rand(n_docs: int, n_clusters: int, seed: int) -> ClusterAssignment:
    """Assign each document a uniform random cluster; the floor any method must beat."""
    if n_clusters < 1:
        raise ConfigError("n_clusters must be >= 1")
    rng = np.random.default_rng(seed)
    labels = [int(x) for x in rng.integers(0, n_clusters, size=n_docs)]
    return ClusterAssignment(labels, n_clusters)


def baseline_authorlist(inst: Instance, n_clusters: int, metric: str = "cosine") -> ClusterAssignment:
    """Cluster documents on binary author-presence vectors with the same HAC."""
    incidence = np.zeros((inst.n_docs, inst.n_collaborators))
    for doc, authors in enumerate(inst.doc_authors):
        for person, _ in authors:
            incidence[doc, person] = 1.0
    dendrogram = hac_group_average(pairwise_distances(incidence, metric))
    return cut(dendrogram, n_clusters)


def paired_t_test(scores_a: Sequence[float], scores_b: Sequence[float]) -> tuple[float, float]:
    """Two-tailed paired t test; errors out when the differences have no variance."""
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or len(a) < 2:
        raise ValueError("need two equal-length score lists with >= 2 entries")
    diff = a - b
    sd = float(diff.std(ddof=1))
    if sd == 0.0:
        raise UndefinedTestError("paired differences have zero variance")
    n = len(diff)
    t_stat = float(diff.mean()) / (sd / np.sqrt(n))
    p_value = 2.0 * float(t_dist.sf(abs(t_stat), n - 1))
    return t_stat, p_value
