"""Namesake disambiguation on anonymized document-author graphs.

Builds collaboration, authorship, and document-similarity networks from
per-name record sets, learns a joint person/document embedding with a
pairwise similarity-ranking objective, and recovers entities by
group-average agglomerative clustering of the document vectors.
"""

from .cluster import ClusterAssignment, Dendrogram, cut, hac_group_average, pairwise_distances
from .embed import (
    AliasTable,
    EmbeddingModel,
    Network,
    Triplet,
    TripletSampler,
    affinity,
    compute_joint_loss,
    init_model,
    sample_positive,
    sgd_step,
    train,
    triplet_probability,
)
from .evaluate import EvalReport, baseline_authorlist, baseline_rand, macro_f1, paired_t_test
from .graphs import (
    BipartiteGraph,
    TriGraph,
    WeightedGraph,
    build_document_document,
    build_person_document,
    build_person_person,
    build_trigraph,
    extended_collaborators,
)
from .ingest import (
    Instance,
    Record,
    RecordSet,
    anonymize,
    generate_synthetic,
    parse_records,
    select_instance,
)
from .pipeline import RunConfig, multi_run, run_once

__version__ = "0.1.0"

__all__ = [
    "AliasTable",
    "BipartiteGraph",
    "ClusterAssignment",
    "Dendrogram",
    "EmbeddingModel",
    "EvalReport",
    "Instance",
    "Network",
    "Record",
    "RecordSet",
    "RunConfig",
    "TriGraph",
    "Triplet",
    "TripletSampler",
    "WeightedGraph",
    "affinity",
    "anonymize",
    "baseline_authorlist",
    "baseline_rand",
    "build_document_document",
    "build_person_document",
    "build_person_person",
    "build_trigraph",
    "compute_joint_loss",
    "cut",
    "extended_collaborators",
    "generate_synthetic",
    "hac_group_average",
    "init_model",
    "macro_f1",
    "multi_run",
    "paired_t_test",
    "pairwise_distances",
    "parse_records",
    "run_once",
    "sample_positive",
    "select_instance",
    "sgd_step",
    "train",
    "triplet_probability",
]
