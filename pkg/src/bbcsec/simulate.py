"""End-to-end simulation: error rates, equivocation, leakage.

Error probabilities come from Monte Carlo trials with uniform messages
(which realizes the average-error criterion). Equivocation is the
conditional entropy of the confidential message given the non-legitimated
node's output and side information; it is computed against the effective
second-layer channel, which is exact because the physical input is sampled
independently per symbol given the second-layer word.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import BroadcastChannel, marginal
from .codebook import Codebook, CodebookParams, generate
from .coding import MessageSets, Node1Decoder, Node2Decoder, encode, transmit
from .exceptions import GuardError, ValidationError
from .probability import chain_joint, conditional_mutual_information, marginalize, _entropy_of_tensor
from .region import AuxChain, evaluate_chain

MAX_EXACT_SEQUENCES = 1 << 20
_CHUNK_ROWS = 1 << 13


@dataclass(frozen=True)
class ErrorEstimate:
    """Empirical error frequency with a 95% confidence interval."""

    rate: float
    ci_low: float
    ci_high: float
    errors: int
    trials: int

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "errors": self.errors,
            "trials": self.trials,
        }


def _binomial_ci(errors: int, trials: int) -> ErrorEstimate:
    """Normal-approximation CI, Wilson when either count is below 10."""
    z = 1.959963984540054
    p = errors / trials
    if min(errors, trials - errors) < 10:
        denom = 1.0 + z * z / trials
        center = (p + z * z / (2 * trials)) / denom
        half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
        low, high = center - half, center + half
    else:
        half = z * math.sqrt(p * (1 - p) / trials)
        low, high = p - half, p + half
    return ErrorEstimate(p, max(0.0, low), min(1.0, high), errors, trials)


@dataclass(frozen=True)
class AsymptoticTerms:
    """Per-letter limits of the four equivocation-bound terms.

    `sub_rate_limit` is the limit of the per-letter codeword entropy given
    the first-layer index (the sub-codebook rate); `h_out2_given_code` and
    `h_out2_given_cloud` condition the non-legitimated output on the coding
    symbol and on the cloud center; the Fano residual vanishes. Their
    combination reproduces the secrecy bound exactly.
    """

    sub_rate_limit: float
    h_out2_given_code: float
    fano_residual: float
    h_out2_given_cloud: float

    @property
    def combination(self) -> float:
        return self.sub_rate_limit + self.h_out2_given_code - self.fano_residual - self.h_out2_given_cloud

    def to_dict(self) -> dict:
        return {
            "sub_rate_limit": self.sub_rate_limit,
            "h_out2_given_code": self.h_out2_given_code,
            "fano_residual": self.fano_residual,
            "h_out2_given_cloud": self.h_out2_given_cloud,
            "combination": self.combination,
        }


def asymptotic_terms(chain: AuxChain, ch: BroadcastChannel) -> AsymptoticTerms:
    """Evaluate the four term limits from the chain joint.

    The coding alphabet is the second layer (input randomization folded
    in), so the output-given-input entropy conditions on it.
    """
    j = chain_joint(chain.pu, chain.pvu, chain.pxv, ch)
    iv1 = conditional_mutual_information(j, {"V"}, {"Y1"}, {"U"})
    h_vy2 = _entropy_of_tensor(marginalize(j, {"V", "Y2"}).tensor)
    h_v = _entropy_of_tensor(marginalize(j, {"V"}).tensor)
    h_uy2 = _entropy_of_tensor(marginalize(j, {"U", "Y2"}).tensor)
    h_u = _entropy_of_tensor(marginalize(j, {"U"}).tensor)
    return AsymptoticTerms(
        sub_rate_limit=iv1,
        h_out2_given_code=h_vy2 - h_v,
        fano_residual=0.0,
        h_out2_given_cloud=h_uy2 - h_u,
    )


# ---------------------------------------------------------------------------
# equivocation
# ---------------------------------------------------------------------------


def _effective_w2(cb: Codebook) -> np.ndarray:
    return cb.chain.pxv.rows @ marginal(cb.channel, 2).matrix


def _word_table(cb: Codebook, ms: MessageSets, m2: int) -> tuple:
    """All sub-words consistent with one node-2 side-information value.

    Returns (v_seqs (W, n), weight matrix (W, mc_size)) where column mc
    holds the encoder probability of each word given that message, averaged
    over the node-2-unknown data index.
    """
    p = cb.params
    grids = np.meshgrid(
        np.arange(p.j_size), np.arange(p.l_size), np.arange(p.m0_size), np.arange(p.m1_size),
        indexing="ij",
    )
    j, l, m0, m1 = (g.reshape(-1) for g in grids)
    v = cb.v_words[j, l, m0, m1, m2].astype(np.int64)

    if ms.case == "A":
        mc = np.ravel_multi_index((j, l, m0), ms.mc_shape)
        w = np.full(j.size, 1.0 / p.m1_size)
    else:
        k = ms.partition.mapping[j]
        mc = np.ravel_multi_index((k, l), ms.mc_shape)
        pre_sizes = np.array([pre.size for pre in ms.partition.preimages], dtype=np.float64)
        w = 1.0 / (p.m1_size * pre_sizes[k])
    wmat = np.zeros((j.size, ms.mc_size))
    wmat[np.arange(j.size), mc] = w
    return v, wmat


def _step_tables(v_seqs: np.ndarray, wv2: np.ndarray) -> list:
    """Per-position likelihood factors: step[k][y, word] = P(y | word symbol k)."""
    return [wv2[v_seqs[:, k], :].T.copy() for k in range(v_seqs.shape[1])]


def _suffix_products(steps: list) -> np.ndarray:
    """Likelihood of every suffix sequence (lexicographic rows) per word."""
    n_words = steps[0].shape[1]
    out = np.ones((1, n_words))
    for step in steps:
        out = (out[:, None, :] * step[None, :, :]).reshape(-1, n_words)
    return out


def equivocation_exact(cb: Codebook, ms: MessageSets) -> float:
    """Exact conditional entropy (bits) of the confidential message given
    the non-legitimated node's full output word and its side information.

    Enumerates all output words in lexicographic chunks; each chunk's
    posterior over confidential messages is computed in closed form.
    """
    p = cb.params
    ny2 = cb.channel.y2_size
    if p.n * math.log2(ny2) > math.log2(MAX_EXACT_SEQUENCES) + 1e-12:
        raise GuardError(
            f"equivocation_exact: {ny2}^{p.n} output words exceeds the limit {MAX_EXACT_SEQUENCES}"
        )
    wv2 = _effective_w2(cb)

    suffix_len = p.n
    while ny2 ** suffix_len > _CHUNK_ROWS and suffix_len > 1:
        suffix_len -= 1
    prefix_len = p.n - suffix_len

    total = 0.0
    for m2 in range(p.m2_size):
        v_seqs, wmat = _word_table(cb, ms, m2)
        steps = _step_tables(v_seqs, wv2)
        suffix = _suffix_products(steps[prefix_len:])

        h_m2 = 0.0
        for pidx in range(ny2 ** prefix_len):
            lp = np.ones(v_seqs.shape[0])
            rem = pidx
            for k in range(prefix_len):
                digit = rem // ny2 ** (prefix_len - 1 - k)
                rem -= digit * ny2 ** (prefix_len - 1 - k)
                lp *= steps[k][digit]
            chunk = suffix * lp[None, :]
            joint = (chunk @ wmat) / ms.mc_size      # P(y word, mc | m2)
            py = joint.sum(axis=1)
            pos = joint > 0.0
            ratio = np.divide(joint, py[:, None], out=np.ones_like(joint), where=pos)
            h_m2 -= float(np.sum(joint[pos] * np.log2(ratio[pos])))
        total += h_m2 / p.m2_size
    return total


def equivocation_mc(cb: Codebook, ms: MessageSets, samples: int, rng) -> tuple:
    """Plug-in Monte Carlo estimate of the same quantity.

    Each episode samples a transmission and evaluates the exact posterior
    of the confidential message for the received word; the estimator is the
    average of -log2(posterior at the true message). Returns (estimate,
    standard error) in bits.
    """
    if samples < 2:
        raise ValidationError("equivocation_mc: need at least 2 samples")
    p = cb.params
    wv2 = _effective_w2(cb)
    cdf_wv2 = np.cumsum(wv2, axis=1)

    tables = {}
    for m2 in range(p.m2_size):
        v_seqs, wmat = _word_table(cb, ms, m2)
        tables[m2] = (v_seqs, wmat, _step_tables(v_seqs, wv2))

    mc_draw = rng.integers(ms.mc_size, size=samples)
    m1_draw = rng.integers(p.m1_size, size=samples)
    m2_draw = rng.integers(p.m2_size, size=samples)

    vals = np.empty(samples)
    for e in range(samples):
        mc, m1, m2 = int(mc_draw[e]), int(m1_draw[e]), int(m2_draw[e])
        if ms.case == "A":
            j, l, m0 = ms.unpack(mc)
        else:
            k, l = ms.unpack(mc)
            pre = ms.partition.preimages[k]
            j = int(pre[rng.integers(pre.size)])
            m0 = 0
        v = cb.v_words[j, l, m0, m1, m2].astype(np.int64)
        u = rng.random(p.n)
        y2 = np.minimum((u[:, None] > cdf_wv2[v]).sum(axis=1), wv2.shape[1] - 1)

        v_seqs, wmat, steps = tables[m2]
        lik = np.ones(v_seqs.shape[0])
        for k_pos in range(p.n):
            lik *= steps[k_pos][y2[k_pos]]
        post = lik @ wmat
        post /= post.sum()
        vals[e] = -math.log2(post[mc])

    est = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(samples))
    return est, se


# ---------------------------------------------------------------------------
# simulation driver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """A full simulation request; blocklength and typicality slack live in
    the codebook parameters."""

    trials: int
    params: CodebookParams
    chain: AuxChain
    channel: BroadcastChannel
    equiv_mode: str = "exact"  # "exact" | "mc" | "none"
    mc_samples: int = 2000
    seed: int = 0
    k_size: Optional[int] = None  # None selects the triple construction (case A)
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("SimConfig: trials must be >= 1")
        if self.equiv_mode not in ("exact", "mc", "none"):
            raise ValidationError(f"SimConfig: unknown equivocation mode {self.equiv_mode!r}")

    def message_sets(self) -> MessageSets:
        if self.k_size is None:
            return MessageSets.case_a(self.params)
        return MessageSets.case_b(self.params, self.k_size)

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "n": self.params.n,
            "sizes": {
                "m0": self.params.m0_size,
                "m1": self.params.m1_size,
                "m2": self.params.m2_size,
                "j": self.params.j_size,
                "l": self.params.l_size,
            },
            "epsilon": self.params.epsilon,
            "codebook_seed": self.params.seed,
            "equiv_mode": self.equiv_mode,
            "mc_samples": self.mc_samples,
            "seed": self.seed,
            "k_size": self.k_size,
            "chain": self.chain.to_dict(),
        }


@dataclass(frozen=True)
class SimReport:
    """Measured operational quantities plus the analytic reference terms."""

    e1: ErrorEstimate
    e2: ErrorEstimate
    equiv_rate: Optional[float]
    equiv_se: Optional[float]
    leakage_rate: Optional[float]
    confidential_rate: float
    equivocation_bound: float
    terms: AsymptoticTerms
    epsilon_n: float
    config: dict

    def to_dict(self) -> dict:
        return {
            "e1": self.e1.to_dict(),
            "e2": self.e2.to_dict(),
            "equivocation_rate": self.equiv_rate,
            "equivocation_se": self.equiv_se,
            "leakage_rate": self.leakage_rate,
            "confidential_rate": self.confidential_rate,
            "equivocation_bound": self.equivocation_bound,
            "asymptotic_terms": self.terms.to_dict(),
            "epsilon_n": self.epsilon_n,
            "config": self.config,
        }


def _run_trials(cfg: SimConfig, cb: Codebook, ms: MessageSets) -> tuple:
    dec1 = Node1Decoder(cb, ms)
    dec2 = Node2Decoder(cb, ms)

    def trial(t: int) -> tuple:
        rng = np.random.default_rng((cfg.seed, 0, t))
        mc = int(rng.integers(ms.mc_size))
        m1 = int(rng.integers(ms.m1_size))
        m2 = int(rng.integers(ms.m2_size))
        block = encode(mc, m1, m2, cb, ms, rng)
        y1, y2 = transmit(block, cfg.channel, rng)
        e1 = dec1(y1, m1) != (mc, m2)
        e2 = dec2(y2, m2) != m1
        return e1, e2

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(trial, range(cfg.trials)))
    else:
        outcomes = [trial(t) for t in range(cfg.trials)]
    n1 = sum(1 for a, _ in outcomes if a)
    n2 = sum(1 for _, b in outcomes if b)
    return n1, n2


def run(cfg: SimConfig) -> SimReport:
    """Generate the codebook, run the trials, measure equivocation."""
    cb = generate(cfg.params, cfg.chain, cfg.channel)
    ms = cfg.message_sets()
    iq = evaluate_chain(cfg.chain, cfg.channel)

    n1, n2 = _run_trials(cfg, cb, ms)
    e1 = _binomial_ci(n1, cfg.trials)
    e2 = _binomial_ci(n2, cfg.trials)

    n = cfg.params.n
    confidential_rate = math.log2(ms.mc_size) / n
    equiv_rate = equiv_se = leakage = None
    if cfg.equiv_mode == "exact":
        equiv_rate = equivocation_exact(cb, ms) / n
    elif cfg.equiv_mode == "mc":
        est, se = equivocation_mc(cb, ms, cfg.mc_samples, np.random.default_rng((cfg.seed, 1)))
        equiv_rate, equiv_se = est / n, se / n
    if equiv_rate is not None:
        leakage = confidential_rate - equiv_rate

    return SimReport(
        e1=e1,
        e2=e2,
        equiv_rate=equiv_rate,
        equiv_se=equiv_se,
        leakage_rate=leakage,
        confidential_rate=confidential_rate,
        equivocation_bound=iq.secrecy_bound,
        terms=asymptotic_terms(cfg.chain, cfg.channel),
        epsilon_n=max(e1.rate, e2.rate),
        config=cfg.to_dict(),
    )
