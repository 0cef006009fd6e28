"""Joint pairwise-ranking embedding of persons and documents.

Persons and documents share one latent space. Training repeatedly draws a
triplet (anchor, positive, negative) from one of the three networks and
nudges the anchor's inner-product affinity to the positive above its
affinity to the negative, i.e. stochastic descent on the ranking loss
``-ln sigmoid(s_pos - s_neg)`` with per-row l2 shrinkage.

Triplet orientation by network:
  pp: anchor, positive, negative are all persons
  dd: all documents
  pd: anchor is a document, positive and negative are persons
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DivergenceError, EmptyNetworkError
from .graphs import TriGraph

INIT_HALF_WIDTH = 0.2  # embeddings start i.i.d. uniform on [-0.2, 0.2]
NEGATIVE_REJECTION_CAP = 100

_TRAIN_STREAM = 0
_EVAL_STREAM = 1


class Network(Enum):
    PP = "pp"
    PD = "pd"
    DD = "dd"


@dataclass(eq=False)
class EmbeddingModel:
    """Person and document embedding matrices plus training hyperparameters.

    ``rng`` is the single training entropy source; two models built from
    the same seed walk identical trajectories.
    """

    person_vecs: np.ndarray
    doc_vecs: np.ndarray
    dim: int
    l2: float
    lr: float
    seed: int
    rng: np.random.Generator = field(repr=False, default=None)

    @property
    def n_persons(self) -> int:
        return self.person_vecs.shape[0]

    @property
    def n_docs(self) -> int:
        return self.doc_vecs.shape[0]


@dataclass(frozen=True)
class Triplet:
    network: Network
    anchor: int
    positive: int
    negative: int


@dataclass
class EpochStats:
    """Post-epoch evaluation on a fresh sample of held-out triplets."""

    epoch: int
    loss: float
    auc: float
    rank_loss: float
    reg_loss: float


def init_model(
    n_persons: int, n_docs: int, dim: int, l2: float, lr: float, seed: int
) -> EmbeddingModel:
    """Initialize both matrices i.i.d. uniform on [-0.2, 0.2] from ``seed``."""
    if dim < 1:
        raise ConfigError("embedding dimension must be >= 1")
    if l2 < 0:
        raise ConfigError("l2 weight must be >= 0")
    if lr <= 0:
        raise ConfigError("learning rate must be > 0")
    if seed < 0:
        raise ConfigError("seed must be >= 0")
    rng = np.random.default_rng([seed, _TRAIN_STREAM])
    person_vecs = rng.uniform(-INIT_HALF_WIDTH, INIT_HALF_WIDTH, size=(n_persons, dim))
    doc_vecs = rng.uniform(-INIT_HALF_WIDTH, INIT_HALF_WIDTH, size=(n_docs, dim))
    return EmbeddingModel(person_vecs, doc_vecs, dim, l2, lr, seed, rng)


def affinity(u: np.ndarray, v: np.ndarray) -> float:
    """Inner-product affinity between two embedding vectors."""
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return float(u @ v)


def sigmoid(x: float) -> float:
    """Logistic function, branch-on-sign so neither tail overflows."""
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def triplet_probability(s_pos: float, s_neg: float) -> float:
    """Probability that the positive outranks the negative, sigmoid(s_pos - s_neg)."""
    return sigmoid(s_pos - s_neg)


def rank_loss(delta: float) -> float:
    """-ln sigmoid(delta), computed as softplus(-delta) for stability."""
    return float(np.logaddexp(0.0, -delta))


class AliasTable:
    """O(1) weighted edge sampler (Walker's alias method) for one network.

    Holds the network's edge list; ``sample_index`` draws an edge index with
    probability proportional to its weight.
    """

    def __init__(self, network: Network, edges: Sequence[tuple[int, int, int]]):
        if not edges:
            raise EmptyNetworkError(f"{network.value} network has no edges")
        self.network = network
        self.edges = list(edges)
        weights = np.array([w for _, _, w in self.edges], dtype=float)
        n = len(weights)
        scaled = weights * (n / weights.sum())
        self.prob = np.ones(n)
        self.alias = np.arange(n)
        small = [i for i in range(n) if scaled[i] < 1.0]
        large = [i for i in range(n) if scaled[i] >= 1.0]
        while small and large:
            s = small.pop()
            l = large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] -= 1.0 - scaled[s]
            (small if scaled[l] < 1.0 else large).append(l)
        self.n = n

    def sample_index(self, rng: np.random.Generator) -> int:
        i = int(rng.integers(self.n))
        if rng.random() < self.prob[i]:
            return i
        return int(self.alias[i])


def sample_positive(table: AliasTable, rng: np.random.Generator) -> tuple[int, int]:
    """Draw a positive (anchor, neighbor) pair with probability proportional to weight.

    For the bipartite network the anchor is always the document side; for the
    undirected networks the orientation is chosen uniformly.
    """
    u, v, _ = table.edges[table.sample_index(rng)]
    if table.network is Network.PD:
        return v, u  # stored as (person, doc); anchor the document
    if rng.random() < 0.5:
        return u, v
    return v, u


class TripletSampler:
    """Draws training triplets from the active networks of a TriGraph.

    Network choice is proportional to edge count, matching the per-epoch
    budget of one draw per edge across all active networks.
    """

    def __init__(self, tg: TriGraph, components: Iterable[Network | str] | None = None):
        active = _normalize_components(components)
        self.tables: dict[Network, AliasTable] = {}
        self._neighbors: dict[Network, list[set[int]]] = {}
        self._candidates: dict[Network, int] = {}
        if Network.PP in active and tg.g_pp.n_edges:
            self.tables[Network.PP] = AliasTable(Network.PP, tg.g_pp.edge_list)
            self._neighbors[Network.PP] = [set(tg.g_pp.neighbors(u)) for u in range(tg.g_pp.n_vertices)]
            self._candidates[Network.PP] = tg.g_pp.n_vertices
        if Network.PD in active and tg.g_pd.n_edges:
            self.tables[Network.PD] = AliasTable(Network.PD, tg.g_pd.edges)
            self._neighbors[Network.PD] = [
                {person for person, _ in row} for row in tg.g_pd.right_adjacency
            ]
            self._candidates[Network.PD] = tg.g_pd.n_left
        if Network.DD in active and tg.g_dd.n_edges:
            self.tables[Network.DD] = AliasTable(Network.DD, tg.g_dd.edge_list)
            self._neighbors[Network.DD] = [set(tg.g_dd.neighbors(u)) for u in range(tg.g_dd.n_vertices)]
            self._candidates[Network.DD] = tg.g_dd.n_vertices
        if not self.tables:
            raise EmptyNetworkError("no active network has any edge")
        self._order = [net for net in (Network.PP, Network.PD, Network.DD) if net in self.tables]
        self._counts = [self.tables[net].n for net in self._order]
        self.draws_per_epoch = sum(self._counts)

    def sample_network(self, rng: np.random.Generator) -> Network:
        r = rng.random() * self.draws_per_epoch
        acc = 0.0
        for net, count in zip(self._order, self._counts):
            acc += count
            if r < acc:
                return net
        return self._order[-1]

    def sample_negative(self, net: Network, anchor: int, rng: np.random.Generator) -> int | None:
        """Uniform non-neighbor of the anchor, or None when no candidate exists.

        Rejection sampling capped at NEGATIVE_REJECTION_CAP attempts, then an
        explicit scan of the non-neighbor set keeps the draw uniform.
        """
        neighbors = self._neighbors[net][anchor]
        n = self._candidates[net]
        exclude_self = anchor if net is not Network.PD else None
        blocked = len(neighbors) + (1 if exclude_self is not None else 0)
        if blocked >= n:
            return None
        for _ in range(NEGATIVE_REJECTION_CAP):
            t = int(rng.integers(n))
            if t == exclude_self or t in neighbors:
                continue
            return t
        pool = [t for t in range(n) if t != exclude_self and t not in neighbors]
        return pool[int(rng.integers(len(pool)))]

    def sample_triplet(self, rng: np.random.Generator) -> Triplet | None:
        net = self.sample_network(rng)
        anchor, positive = sample_positive(self.tables[net], rng)
        negative = self.sample_negative(net, anchor, rng)
        if negative is None:
            return None
        return Triplet(net, anchor, positive, negative)


def _normalize_components(components) -> set[Network]:
    if components is None:
        return {Network.PP, Network.PD, Network.DD}
    nets = {c if isinstance(c, Network) else Network(str(c).lower()) for c in components}
    if not nets:
        raise ConfigError("component mask must name at least one network")
    return nets


def _triplet_rows(model: EmbeddingModel, tr: Triplet) -> tuple[np.ndarray, np.ndarray]:
    """Matrices holding the anchor row and the positive/negative rows."""
    if tr.network is Network.PP:
        return model.person_vecs, model.person_vecs
    if tr.network is Network.DD:
        return model.doc_vecs, model.doc_vecs
    return model.doc_vecs, model.person_vecs


def triplet_gradients(
    anchor: np.ndarray, positive: np.ndarray, negative: np.ndarray, l2: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of the per-triplet loss w.r.t. the three rows.

    The per-triplet loss is ``-ln sigmoid(delta) + l2 (|a|^2 + |p|^2 + |n|^2)``
    with ``delta = a.p - a.n``. Writing ``c = sigmoid(delta) - 1``:
      d/da = c (p - n) + 2 l2 a
      d/dp = c a       + 2 l2 p
      d/dn = -c a      + 2 l2 n
    """
    delta = float(anchor @ positive - anchor @ negative)
    c = sigmoid(delta) - 1.0
    g_anchor = c * (positive - negative) + (2.0 * l2) * anchor
    g_positive = c * anchor + (2.0 * l2) * positive
    g_negative = -c * anchor + (2.0 * l2) * negative
    return g_anchor, g_positive, g_negative


def sgd_step(model: EmbeddingModel, tr: Triplet, lr: float | None = None) -> None:
    """One stochastic update; all three gradients use the pre-step row values."""
    step = model.lr if lr is None else lr
    anchor_mat, side_mat = _triplet_rows(model, tr)
    a = anchor_mat[tr.anchor]
    p = side_mat[tr.positive]
    n = side_mat[tr.negative]
    g_a, g_p, g_n = triplet_gradients(a, p, n, model.l2)
    # The three rows are distinct by the triplet invariants, so writing back
    # after computing all gradients leaves the pre-step values intact.
    anchor_mat[tr.anchor] = a - step * g_a
    side_mat[tr.positive] = p - step * g_p
    side_mat[tr.negative] = n - step * g_n


def triplet_delta(model: EmbeddingModel, tr: Triplet) -> float:
    """Affinity margin s(anchor, positive) - s(anchor, negative)."""
    anchor_mat, side_mat = _triplet_rows(model, tr)
    a = anchor_mat[tr.anchor]
    return float(a @ side_mat[tr.positive] - a @ side_mat[tr.negative])


def compute_joint_loss(model: EmbeddingModel, sample: Sequence[Triplet]) -> float:
    """Summed ranking loss over the sample plus the global Frobenius penalty."""
    total = 0.0
    for tr in sample:
        total += rank_loss(triplet_delta(model, tr))
    reg = model.l2 * (float(np.sum(model.person_vecs**2)) + float(np.sum(model.doc_vecs**2)))
    return total + reg


def evaluate_sample(
    model: EmbeddingModel,
    sampler: TripletSampler,
    rng: np.random.Generator,
    size: int,
) -> tuple[float, float, float]:
    """Mean per-triplet (rank loss, row penalty) and AUC over a fresh sample."""
    ranks: list[float] = []
    regs: list[float] = []
    wins = 0
    attempts = 0
    while len(ranks) < size and attempts < 10 * size:
        attempts += 1
        tr = sampler.sample_triplet(rng)
        if tr is None:
            continue
        anchor_mat, side_mat = _triplet_rows(model, tr)
        a = anchor_mat[tr.anchor]
        p = side_mat[tr.positive]
        n = side_mat[tr.negative]
        delta = float(a @ p - a @ n)
        ranks.append(rank_loss(delta))
        regs.append(model.l2 * float(a @ a + p @ p + n @ n))
        if delta > 0:
            wins += 1
    if not ranks:
        return math.nan, math.nan, math.nan
    return float(np.mean(ranks)), float(np.mean(regs)), wins / len(ranks)


def train(
    model: EmbeddingModel,
    tg: TriGraph,
    epochs: int,
    components: Iterable[Network | str] | None = None,
    eval_sample: int = 1000,
    negatives_per_positive: int = 1,
    lr_decay: bool = False,
) -> tuple[EmbeddingModel, list[EpochStats]]:
    """Run SGD for ``epochs`` epochs of one draw per active edge.

    After each epoch the model is checked for finite entries and scored on a
    fresh evaluation sample drawn from a stream separate from training, so the
    trace never perturbs the training trajectory.
    """
    if epochs < 0:
        raise ConfigError("epochs must be >= 0")
    if negatives_per_positive < 1:
        raise ConfigError("negatives_per_positive must be >= 1")
    if epochs == 0:
        return model, []
    sampler = TripletSampler(tg, components)
    eval_rng = np.random.default_rng([model.seed, _EVAL_STREAM])
    trace: list[EpochStats] = []
    for epoch in range(epochs):
        lr = model.lr * (1.0 - epoch / epochs) if lr_decay else model.lr
        for _ in range(sampler.draws_per_epoch):
            net = sampler.sample_network(model.rng)
            anchor, positive = sample_positive(sampler.tables[net], model.rng)
            for _ in range(negatives_per_positive):
                negative = sampler.sample_negative(net, anchor, model.rng)
                if negative is None:
                    break
                sgd_step(model, Triplet(net, anchor, positive, negative), lr=lr)
        if not (
            np.isfinite(model.person_vecs).all() and np.isfinite(model.doc_vecs).all()
        ):
            raise DivergenceError(f"non-finite embedding entry after epoch {epoch}")
        mean_rank, mean_reg, auc = evaluate_sample(model, sampler, eval_rng, eval_sample)
        trace.append(EpochStats(epoch, mean_rank + mean_reg, auc, mean_rank, mean_reg))
    return model, trace


MODEL_MAGIC = "trigraph-embed"
MODEL_VERSION = 1


def model_to_bytes(model: EmbeddingModel) -> bytes:
    """Checkpoint: one ASCII header line, then row-major little-endian float64 matrices."""
    header = (
        f"{MODEL_MAGIC} {MODEL_VERSION} {model.n_persons} {model.n_docs} "
        f"{model.dim} {model.l2!r} {model.lr!r} {model.seed}\n"
    )
    return (
        header.encode("ascii")
        + np.ascontiguousarray(model.person_vecs, dtype="<f8").tobytes()
        + np.ascontiguousarray(model.doc_vecs, dtype="<f8").tobytes()
    )


def model_from_bytes(data: bytes) -> EmbeddingModel:
    """Inverse of model_to_bytes; the training rng restarts from the stored seed."""
    newline = data.index(b"\n")
    fields = data[:newline].decode("ascii").split(" ")
    if len(fields) != 8 or fields[0] != MODEL_MAGIC:
        raise ConfigError("not a model checkpoint")
    if int(fields[1]) != MODEL_VERSION:
        raise ConfigError(f"unsupported checkpoint version {fields[1]}")
    n_persons, n_docs, dim = int(fields[2]), int(fields[3]), int(fields[4])
    l2, lr, seed = float(fields[5]), float(fields[6]), int(fields[7])
    body = data[newline + 1 :]
    expected = (n_persons + n_docs) * dim * 8
    if len(body) != expected:
        raise ConfigError(f"checkpoint payload is {len(body)} bytes, expected {expected}")
    flat = np.frombuffer(body, dtype="<f8")
    person_vecs = flat[: n_persons * dim].reshape(n_persons, dim).astype(np.float64)
    doc_vecs = flat[n_persons * dim :].reshape(n_docs, dim).astype(np.float64)
    rng = np.random.default_rng([seed, _TRAIN_STREAM])
    return EmbeddingModel(person_vecs, doc_vecs, dim, l2, lr, seed, rng)


def save_model(model: EmbeddingModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(model_to_bytes(model))


def load_model(path) -> EmbeddingModel:
    with open(path, "rb") as fh:
        return model_from_bytes(fh.read())


def trace_to_csv(trace: Sequence[EpochStats]) -> str:
    """Per-epoch trace; loss splits into its ranking and penalty components."""
    lines = ["epoch,loss,auc,rank_loss,reg_loss"]
    for row in trace:
        lines.append(f"{row.epoch},{row.loss!r},{row.auc!r},{row.rank_loss!r},{row.reg_loss!r}")
    return "".join(line + "\n" for line in lines)
