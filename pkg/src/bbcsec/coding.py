"""Encoder and decoders for the confidential-message broadcast code.

Two constructions share the two-layer codebook. When the confidential
rate needs the whole sub-codebook plus part of the first layer (case A),
the confidential index is the triple (column, row, common) and the encoder
is deterministic. When it needs less than the sub-codebook (case B), a
near-equal partition of the column set lets a stochastic encoder spread
each confidential message over all columns, forcing the non-legitimated
node to spend its full rate on the column index.

Decoders are exhaustive weak-typicality searches returning the unique
message-level hit, or the in-band erasure (None) on zero or multiple hits.
"""

import numpy as np

from .channel import BroadcastChannel
from .codebook import Codebook, TypicalityScorer, decoding_joint
from .exceptions import GuardError, ValidationError

MAX_CANDIDATES = 1 << 20


class Partition:
    """Near-equal-size map from the column set onto the confidential part.

    Preimage sizes differ by at most one, which implies the required
    max <= 2 * min property.
    """

    def __init__(self, mapping: np.ndarray, k_size: int):
        mapping = np.asarray(mapping, dtype=np.int64)
        if mapping.ndim != 1:
            raise ValidationError("Partition: mapping must be a vector")
        if k_size < 1 or mapping.size < k_size:
            raise ValidationError("Partition: need at least one column per class")
        if mapping.min() < 0 or mapping.max() >= k_size:
            raise ValidationError("Partition: class indices outside 0..k_size-1")
        counts = np.bincount(mapping, minlength=k_size)
        if not np.all(counts > 0):
            raise ValidationError("Partition: mapping must be surjective onto 0..k_size-1")
        self.mapping = mapping
        self.k_size = int(k_size)
        self.preimage_sizes = counts
        self._preimages = None

    @property
    def preimages(self) -> tuple:
        if self._preimages is None:
            order = np.argsort(self.mapping, kind="stable")
            self._preimages = tuple(np.split(order, np.cumsum(self.preimage_sizes)[:-1]))
        return self._preimages

    @property
    def j_size(self) -> int:
        return self.mapping.size


def make_partition(j_size: int, k_size: int) -> Partition:
    """h(j) = j mod k_size; preimage sizes differ by at most one."""
    if not 1 <= k_size <= j_size:
        raise ValidationError(f"make_partition: need 1 <= k_size <= j_size, got {k_size}, {j_size}")
    return Partition(np.arange(j_size) % k_size, k_size)


class MessageSets:
    """Message index sets for one of the two constructions.

    Case A: the confidential set is (column, row, common), encoder
    deterministic. Case B: the confidential set is (class, row) with a
    partition of the columns; the common set is the single sentinel 0.
    """

    def __init__(self, case: str, params, partition: Partition = None):
        if case not in ("A", "B"):
            raise ValidationError(f"MessageSets: case must be 'A' or 'B', got {case!r}")
        self.case = case
        self.params = params
        self.partition = partition
        if case == "A":
            if partition is not None:
                raise ValidationError("MessageSets: case A takes no partition")
            self.mc_shape = (params.j_size, params.l_size, params.m0_size)
        else:
            if partition is None:
                raise ValidationError("MessageSets: case B needs a partition")
            if partition.j_size != params.j_size:
                raise ValidationError("MessageSets: partition does not match the column count")
            if params.m0_size != 1:
                raise ValidationError("MessageSets: case B uses the single sentinel common message")
            self.mc_shape = (partition.k_size, params.l_size)
        self.mc_size = int(np.prod(self.mc_shape))
        self.m1_size = params.m1_size
        self.m2_size = params.m2_size

    @classmethod
    def case_a(cls, params) -> "MessageSets":
        return cls("A", params)

    @classmethod
    def case_b(cls, params, k_size: int) -> "MessageSets":
        return cls("B", params, make_partition(params.j_size, k_size))

    def unpack(self, mc: int) -> tuple:
        if not 0 <= mc < self.mc_size:
            raise ValidationError(f"MessageSets: confidential index {mc} outside [0, {self.mc_size})")
        return tuple(int(i) for i in np.unravel_index(mc, self.mc_shape))

    def pack_from_indices(self, j, l, m0) -> int:
        """Confidential message implied by codeword indices (decoder side)."""
        if self.case == "A":
            return int(np.ravel_multi_index((j, l, m0), self.mc_shape))
        return int(np.ravel_multi_index((self.partition.mapping[j], l), self.mc_shape))

    def matches_case_split(self, iv1: float, n: int) -> bool:
        """Whether the case agrees with the rate threshold: the triple
        construction is for confidential rates at or above the sub-codebook
        budget, the partition construction for rates below it."""
        rc = np.log2(self.mc_size) / n
        return (rc >= iv1 - 1e-9) == (self.case == "A")


class EncodedBlock:
    """One encoder output: second-layer word, sampled input word, indices."""

    def __init__(self, v_seq, x_seq, j, l, mprime):
        self.v_seq = v_seq
        self.x_seq = x_seq
        self.j = int(j)
        self.l = int(l)
        self.mprime = tuple(int(m) for m in mprime)


def _sample_categorical(cdf_rows: np.ndarray, cond: np.ndarray, rng) -> np.ndarray:
    u = rng.random(cond.shape[0])
    out = (u[:, None] > cdf_rows[cond]).sum(axis=1)
    return np.minimum(out, cdf_rows.shape[1] - 1)


def encode(mc: int, m1: int, m2: int, cb: Codebook, ms: MessageSets, rng) -> EncodedBlock:
    """Map a message triple to a transmit block; stochastic in case B and in
    the per-symbol input sampling."""
    p = cb.params
    if not 0 <= m1 < p.m1_size:
        raise ValidationError(f"encode: m1={m1} outside [0, {p.m1_size})")
    if not 0 <= m2 < p.m2_size:
        raise ValidationError(f"encode: m2={m2} outside [0, {p.m2_size})")
    if ms.case == "A":
        j, l, m0 = ms.unpack(mc)
    else:
        k, l = ms.unpack(mc)
        pre = ms.partition.preimages[k]
        j = int(pre[rng.integers(pre.size)])
        m0 = 0
    v_seq = cb.v_words[j, l, m0, m1, m2].astype(np.int64)
    cdf_xv = np.cumsum(cb.chain.pxv.rows, axis=1)
    x_seq = _sample_categorical(cdf_xv, v_seq, rng)
    return EncodedBlock(v_seq, x_seq, j, l, (m0, m1, m2))


def transmit(block: EncodedBlock, ch: BroadcastChannel, rng) -> tuple:
    """Pass the input word through the memoryless channel, one symbol at a
    time."""
    flat = ch.tensor.reshape(ch.x_size, -1)
    cdf = np.cumsum(flat, axis=1)
    pairs = _sample_categorical(cdf, block.x_seq, rng)
    y1, y2 = np.unravel_index(pairs, (ch.y1_size, ch.y2_size))
    return y1.astype(np.int64), y2.astype(np.int64)


class Node1Decoder:
    """Exhaustive typicality decoder at the legitimate node.

    Knows its own message m1; searches all (common index, node-2 message,
    column, row) candidates for joint typicality of (first-layer word,
    sub-word, received word) and reports the unique message-level hit.
    """

    def __init__(self, cb: Codebook, ms: MessageSets, epsilon: float = None):
        p = cb.params
        candidates = p.m0_size * p.m2_size * p.j_size * p.l_size
        if candidates > MAX_CANDIDATES:
            raise GuardError(
                f"Node1Decoder: {candidates} candidate tuples exceeds the limit {MAX_CANDIDATES}"
            )
        self.cb = cb
        self.ms = ms
        eps = cb.params.epsilon if epsilon is None else epsilon
        self.scorer = TypicalityScorer(decoding_joint(cb, "Y1"), ("U", "V", "Y1"), eps)
        grids = np.meshgrid(
            np.arange(p.m0_size), np.arange(p.m2_size), np.arange(p.j_size), np.arange(p.l_size),
            indexing="ij",
        )
        self._m0, self._m2, self._j, self._l = (g.reshape(-1) for g in grids)
        self._mc = np.array(
            [ms.pack_from_indices(j, l, m0) for j, l, m0 in zip(self._j, self._l, self._m0)]
        )
        self._cache = {}

    def _seqs_for(self, m1: int):
        if m1 not in self._cache:
            u = self.cb.u_words[self._m0, m1, self._m2].astype(np.int64)
            v = self.cb.v_words[self._j, self._l, self._m0, m1, self._m2].astype(np.int64)
            self._cache[m1] = (u, v)
        return self._cache[m1]

    def __call__(self, y1: np.ndarray, m1: int):
        u, v = self._seqs_for(m1)
        hits = self.scorer.mask({"U": u, "V": v, "Y1": np.asarray(y1)[None, :]})
        if not hits.any():
            return None
        messages = set(zip(self._mc[hits].tolist(), self._m2[hits].tolist()))
        if len(messages) != 1:
            return None
        return messages.pop()


class Node2Decoder:
    """First-layer typicality decoder at the non-legitimated node; knows m2
    and reports the unique node-1 message among the hits."""

    def __init__(self, cb: Codebook, ms: MessageSets, epsilon: float = None):
        p = cb.params
        self.cb = cb
        eps = cb.params.epsilon if epsilon is None else epsilon
        self.scorer = TypicalityScorer(decoding_joint(cb, "Y2").marginal({"U", "Y2"}), ("U", "Y2"), eps)
        grids = np.meshgrid(np.arange(p.m0_size), np.arange(p.m1_size), indexing="ij")
        self._m0, self._m1 = (g.reshape(-1) for g in grids)

    def __call__(self, y2: np.ndarray, m2: int):
        u = self.cb.u_words[self._m0, self._m1, m2].astype(np.int64)
        hits = self.scorer.mask({"U": u, "Y2": np.asarray(y2)[None, :]})
        if not hits.any():
            return None
        found = set(self._m1[hits].tolist())
        if len(found) != 1:
            return None
        return found.pop()


def decode_node1(y1, m1: int, cb: Codebook, ms: MessageSets, epsilon: float = None):
    """One-shot wrapper around Node1Decoder; returns (mc, m2) or None."""
    return Node1Decoder(cb, ms, epsilon)(y1, m1)


def decode_node2(y2, m2: int, cb: Codebook, ms: MessageSets, epsilon: float = None):
    """One-shot wrapper around Node2Decoder; returns m1 or None."""
    return Node2Decoder(cb, ms, epsilon)(y2, m2)


def decode_node2_inner(y2, l: int, mprime, cb: Codebook, epsilon: float = None):
    """Analysis decoder: the column index the non-legitimated node recovers
    when given the row and first-layer indices; None on ambiguity."""
    p = cb.params
    m0, m1, m2 = mprime
    eps = cb.params.epsilon if epsilon is None else epsilon
    scorer = TypicalityScorer(decoding_joint(cb, "Y2"), ("U", "V", "Y2"), eps)
    u = np.broadcast_to(cb.u_words[m0, m1, m2].astype(np.int64), (p.j_size, p.n))
    v = cb.v_words[:, l, m0, m1, m2].astype(np.int64)
    hits = scorer.mask({"U": u, "V": v, "Y2": np.asarray(y2)[None, :]})
    idx = np.nonzero(hits)[0]
    if idx.size != 1:
        return None
    return int(idx[0])
