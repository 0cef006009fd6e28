"""The three relational networks built from a disambiguation instance.

All vertex indices are the dense person/document indices of the owning
Instance. Edge weights are strictly positive integers; zero-weight pairs
are simply absent, and there are no self-loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .ingest import Instance


@dataclass
class WeightedGraph:
    """Undirected weighted graph with per-vertex sorted adjacency."""

    n_vertices: int
    adjacency: list[list[tuple[int, int]]]
    edge_list: list[tuple[int, int, int]]

    @property
    def n_edges(self) -> int:
        return len(self.edge_list)

    def neighbors(self, u: int) -> list[int]:
        return [v for v, _ in self.adjacency[u]]

    def total_weight(self) -> int:
        return sum(w for _, _, w in self.edge_list)


@dataclass
class BipartiteGraph:
    """Person-document bipartite graph; left side persons, right side documents."""

    n_left: int
    n_right: int
    edges: list[tuple[int, int, int]]
    left_adjacency: list[list[tuple[int, int]]]
    right_adjacency: list[list[tuple[int, int]]]

    @property
    def n_edges(self) -> int:
        return len(self.edges)


@dataclass
class TriGraph:
    """The collaboration, authorship, and document-similarity networks together."""

    g_pp: WeightedGraph
    g_pd: BipartiteGraph
    g_dd: WeightedGraph


def weighted_graph_from_weights(n_vertices: int, weights: dict[tuple[int, int], int]) -> WeightedGraph:
    """Assemble a WeightedGraph from a {(u, v): w} map with u < v."""
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n_vertices)]
    edge_list = []
    for (u, v) in sorted(weights):
        w = weights[(u, v)]
        if w <= 0:
            continue
        adjacency[u].append((v, w))
        adjacency[v].append((u, w))
        edge_list.append((u, v, w))
    for row in adjacency:
        row.sort()
    return WeightedGraph(n_vertices, adjacency, edge_list)


def build_person_person(inst: Instance) -> WeightedGraph:
    """Collaboration graph: weight = number of distinct documents shared by a pair."""
    weights: dict[tuple[int, int], int] = {}
    for authors in inst.doc_authors:
        distinct = sorted({idx for idx, _ in authors})
        for u, v in combinations(distinct, 2):
            weights[(u, v)] = weights.get((u, v), 0) + 1
    return weighted_graph_from_weights(inst.n_collaborators, weights)


def build_person_document(inst: Instance) -> BipartiteGraph:
    """Authorship graph: weight = how many times the person appears on the document."""
    edges = []
    left_adjacency: list[list[tuple[int, int]]] = [[] for _ in range(inst.n_collaborators)]
    right_adjacency: list[list[tuple[int, int]]] = [[] for _ in range(inst.n_docs)]
    for doc, authors in enumerate(inst.doc_authors):
        for person, count in sorted(authors):
            edges.append((person, doc, count))
            left_adjacency[person].append((doc, count))
            right_adjacency[doc].append((person, count))
    edges.sort()
    for row in left_adjacency:
        row.sort()
    return BipartiteGraph(inst.n_collaborators, inst.n_docs, edges, left_adjacency, right_adjacency)


def extended_collaborators(doc: int, g_pp: WeightedGraph, g_pd: BipartiteGraph) -> set[int]:
    """A document's collaborators plus all their collaboration-graph neighbors."""
    base = {person for person, _ in g_pd.right_adjacency[doc]}
    extended = set(base)
    for person in base:
        extended.update(g_pp.neighbors(person))
    return extended


def build_document_document(inst: Instance, g_pp: WeightedGraph, g_pd: BipartiteGraph) -> WeightedGraph:
    """Document similarity graph: weight = size of the extended-collaborator overlap."""
    extended = [extended_collaborators(doc, g_pp, g_pd) for doc in range(inst.n_docs)]
    weights: dict[tuple[int, int], int] = {}
    for i in range(inst.n_docs):
        ext_i = extended[i]
        if not ext_i:
            continue
        for j in range(i + 1, inst.n_docs):
            w = len(ext_i & extended[j])
            if w:
                weights[(i, j)] = w
    return weighted_graph_from_weights(inst.n_docs, weights)


def build_trigraph(inst: Instance) -> TriGraph:
    """Build all three networks over the instance's shared index spaces."""
    g_pp = build_person_person(inst)
    g_pd = build_person_document(inst)
    g_dd = build_document_document(inst, g_pp, g_pd)
    return TriGraph(g_pp, g_pd, g_dd)


def isolated_documents(tg: TriGraph) -> list[int]:
    """Documents with no edge in any network; these never receive training updates."""
    linked = {doc for _, doc, _ in tg.g_pd.edges}
    linked.update(u for u, _, _ in tg.g_dd.edge_list)
    linked.update(v for _, v, _ in tg.g_dd.edge_list)
    return [doc for doc in range(tg.g_pd.n_right) if doc not in linked]


def edge_list_text(edges: Iterable[tuple[int, int, int]]) -> str:
    """Render edges as tab-separated ``u v w`` lines for dump files."""
    return "".join(f"{u}\t{v}\t{w}\n" for u, v, w in edges)
