"""Two-layer random codebook and weak joint-typicality tests.

The first layer carries the bidirectional/common indices; for each
first-layer word there is a sub-codebook indexed by (column, row) whose
words are drawn symbolwise from the second-layer conditional. Codewords
live on the second-layer alphabet: the input-randomization law P(x|v) is
folded into an effective channel, and the physical input is sampled per
symbol at transmit time.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping

import numpy as np

from .channel import BroadcastChannel
from .exceptions import GuardError, ValidationError
from .probability import JointDist, chain_joint
from .region import AuxChain

MAX_CODEBOOK_SYMBOLS = 1 << 24  # total stored symbols across all sub-codewords


@dataclass(frozen=True)
class CodebookParams:
    """Blocklength, index-set sizes, typicality slack, and the seed."""

    n: int
    m0_size: int = 1
    m1_size: int = 1
    m2_size: int = 1
    j_size: int = 1
    l_size: int = 1
    epsilon: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("CodebookParams: blocklength must be >= 1")
        for name in ("m0_size", "m1_size", "m2_size", "j_size", "l_size"):
            if getattr(self, name) < 1:
                raise ValidationError(f"CodebookParams: {name} must be >= 1")
        if self.epsilon <= 0:
            raise ValidationError("CodebookParams: epsilon must be positive")

    @property
    def mprime_shape(self) -> tuple:
        return (self.m0_size, self.m1_size, self.m2_size)

    @property
    def word_count(self) -> int:
        return self.j_size * self.l_size * self.m0_size * self.m1_size * self.m2_size

    def rates(self) -> dict:
        """Code rates in bits per channel use for each index set."""
        return {
            "m0": math.log2(self.m0_size) / self.n,
            "m1": math.log2(self.m1_size) / self.n,
            "m2": math.log2(self.m2_size) / self.n,
            "j": math.log2(self.j_size) / self.n,
            "l": math.log2(self.l_size) / self.n,
        }


@dataclass(frozen=True, eq=False)
class Codebook:
    """Generated codeword arrays plus the chain and channel that drew them.

    u_words: int8 array (m0, m1, m2, n); v_words: int8 array
    (j, l, m0, m1, m2, n). The first-layer triple is (common index,
    message from node 1, message from node 2) throughout: node i knows its
    own entry and decodes the other one.
    """

    params: CodebookParams
    chain: AuxChain
    channel: BroadcastChannel
    u_words: np.ndarray = field(repr=False)
    v_words: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "params": {
                "n": self.params.n,
                "m0_size": self.params.m0_size,
                "m1_size": self.params.m1_size,
                "m2_size": self.params.m2_size,
                "j_size": self.params.j_size,
                "l_size": self.params.l_size,
                "epsilon": self.params.epsilon,
                "seed": self.params.seed,
            },
            "chain": self.chain.to_dict(),
            "u_words": self.u_words,
            "v_words": self.v_words,
        }


def _sample_rows(cdf_rows: np.ndarray, cond_idx: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling: one draw per entry of cond_idx from the row it
    selects."""
    cdf = cdf_rows[cond_idx]
    out = (uniforms[..., None] > cdf).sum(axis=-1)
    return np.minimum(out, cdf_rows.shape[1] - 1)


def generate(params: CodebookParams, chain: AuxChain, ch: BroadcastChannel) -> Codebook:
    """Draw the two-layer codebook; a pure function of (params, chain, channel)."""
    if chain.x_size != ch.x_size:
        raise ValidationError("generate: chain and channel disagree on the input alphabet")
    total = params.word_count * params.n
    if total > MAX_CODEBOOK_SYMBOLS:
        raise GuardError(
            f"generate: {total} stored symbols exceeds the limit {MAX_CODEBOOK_SYMBOLS}"
        )
    rng = np.random.default_rng(params.seed)

    cdf_u = np.cumsum(chain.pu.probs)
    u_draws = rng.random(params.mprime_shape + (params.n,))
    u_words = np.minimum((u_draws[..., None] > cdf_u).sum(axis=-1), chain.u_size - 1)

    cdf_vu = np.cumsum(chain.pvu.rows, axis=1)
    v_shape = (params.j_size, params.l_size) + params.mprime_shape + (params.n,)
    u_bcast = np.broadcast_to(u_words, v_shape)
    v_draws = rng.random(v_shape)
    v_words = _sample_rows(cdf_vu, u_bcast, v_draws)

    return Codebook(
        params, chain, ch,
        u_words.astype(np.int8), v_words.astype(np.int8),
    )


@dataclass(frozen=True)
class RateCondition:
    """One rate comparison: the code's rate against an information bound.

    `exists_ok` is the codebook-existence direction (rate >= bound - delta);
    `reliable_ok` is the decodability direction (rate <= bound). Both are
    reported because they pull opposite ways.
    """

    name: str
    code_rate: float
    bound: float
    delta: float

    @property
    def exists_ok(self) -> bool:
        return self.code_rate >= self.bound - self.delta

    @property
    def reliable_ok(self) -> bool:
        return self.code_rate <= self.bound + 1e-12

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "code_rate": self.code_rate,
            "bound": self.bound,
            "delta": self.delta,
            "exists_ok": self.exists_ok,
            "reliable_ok": self.reliable_ok,
        }


def rate_check(params: CodebookParams, iq, delta: float) -> list:
    """The four rate conditions of the two-layer construction.

    Node 1 decodes the common index and node 2's message, node 2 the common
    index and node 1's message; the sub-codebook's column and row rates are
    checked against the second-layer terms.
    """
    r = params.rates()
    return [
        RateCondition("first_layer_node1", r["m0"] + r["m2"], iq.iu1, delta),
        RateCondition("first_layer_node2", r["m0"] + r["m1"], iq.iu2, delta),
        RateCondition("column_index", r["j"], iq.iv2, delta),
        RateCondition("row_index", r["l"], iq.iv1 - iq.iv2, delta),
    ]


class TypicalityScorer:
    """Weak joint typicality against a joint law, vectorized over candidates.

    A tuple is typical when, for the full tuple and every non-empty subset
    of its axes, the per-symbol sample log-probability is within epsilon of
    the corresponding marginal entropy; any zero-probability symbol
    combination fails regardless of epsilon.
    """

    def __init__(self, joint: JointDist, axes, epsilon: float):
        self.axes = tuple(axes)
        unknown = set(self.axes) - set(joint.axes)
        if unknown:
            raise ValidationError(f"TypicalityScorer: unknown axes {sorted(unknown)}")
        self.epsilon = float(epsilon)
        self._subsets = []
        for r in range(1, len(self.axes) + 1):
            for sub in combinations(self.axes, r):
                marg = joint.marginal(sub)
                ordered = tuple(a for a in joint.axes if a in sub)
                with np.errstate(divide="ignore"):
                    logp = np.log2(marg.tensor)
                h = -float(np.sum(marg.tensor[marg.tensor > 0] * logp[marg.tensor > 0]))
                self._subsets.append((ordered, marg.tensor.shape, logp.reshape(-1), h))

    def mask(self, seqs: Mapping[str, np.ndarray]) -> np.ndarray:
        missing = set(self.axes) - set(seqs)
        if missing:
            raise ValidationError(f"TypicalityScorer: missing sequences for {sorted(missing)}")
        arrays = {a: np.atleast_2d(np.asarray(seqs[a], dtype=np.int64)) for a in self.axes}
        n = max(arr.shape[1] for arr in arrays.values())
        rows = max(arr.shape[0] for arr in arrays.values())
        for a, arr in arrays.items():
            if arr.shape[1] != n:
                raise ValidationError(f"TypicalityScorer: sequence for {a} has length {arr.shape[1]}, expected {n}")

        ok = np.ones(rows, dtype=bool)
        for ordered, shape, logp_flat, h in self._subsets:
            idx = np.ravel_multi_index(
                tuple(np.broadcast_to(arrays[a], (rows, n)) for a in ordered), shape
            )
            logp = logp_flat[idx]
            finite = np.isfinite(logp).all(axis=1)
            sample = -logp.sum(axis=1) / n
            within = np.abs(sample - h) <= self.epsilon if np.isfinite(self.epsilon) else np.ones(rows, bool)
            ok &= finite & within
        return ok


def is_typical(seqs: Mapping[str, np.ndarray], joint: JointDist, epsilon: float) -> bool:
    """Single-tuple weak typicality test (see TypicalityScorer)."""
    axes = tuple(a for a in joint.axes if a in seqs)
    if set(seqs) - set(axes):
        raise ValidationError(f"is_typical: sequences for unknown axes {sorted(set(seqs) - set(axes))}")
    scorer = TypicalityScorer(joint, axes, epsilon)
    return bool(scorer.mask(seqs)[0])


def decoding_joint(cb: Codebook, output_axis: str) -> JointDist:
    """Joint law over (first layer, second layer, one output) with the
    physical input summed out; the law the decoders test typicality against."""
    full = chain_joint(cb.chain.pu, cb.chain.pvu, cb.chain.pxv, cb.channel)
    return full.marginal({"U", "V", output_axis})
