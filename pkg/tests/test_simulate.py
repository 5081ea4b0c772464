import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbcsec import (
    AuxChain,
    CodebookParams,
    CondDist,
    Dist,
    GuardError,
    MessageSets,
    SimConfig,
    ValidationError,
    asymptotic_terms,
    binary_symmetric,
    equivocation_exact,
    equivocation_mc,
    evaluate_chain,
    from_marginals,
    generate,
    run,
)
from bbcsec.channel import marginal

from . import oracles
from .conftest import random_chain, random_channel


def _uniform_w2_channel(ny2=2):
    return from_marginals(binary_symmetric(0.1), np.full((2, ny2), 1.0 / ny2))


class TestEquivocationExact:
    def test_uniform_output_gives_full_entropy(self, degraded_chain):
        ch = _uniform_w2_channel()
        params = CodebookParams(n=6, j_size=2, l_size=2, seed=0)
        cb = generate(params, degraded_chain, ch)
        ms = MessageSets.case_a(params)
        assert equivocation_exact(cb, ms) == pytest.approx(math.log2(ms.mc_size), abs=1e-12)

    def test_single_message(self, bsc12, degraded_chain):
        params = CodebookParams(n=4, seed=1)
        cb = generate(params, degraded_chain, bsc12)
        ms = MessageSets.case_a(params)
        assert equivocation_exact(cb, ms) == 0.0

    def test_noiseless_distinct_words_leak_everything(self):
        # node 2 sees the second-layer word exactly; with distinct words the
        # posterior is a point mass
        ch = from_marginals(np.eye(2), np.eye(2))
        chain = AuxChain(Dist([1.0]), CondDist([[0.5, 0.5]]), CondDist(np.eye(2)))
        params = CodebookParams(n=8, j_size=2, l_size=2, seed=3)
        cb = generate(params, chain, ch)
        ms = MessageSets.case_a(params)
        words = cb.v_words.reshape(-1, 8)
        if len({tuple(w) for w in words.tolist()}) == words.shape[0]:
            assert equivocation_exact(cb, ms) == pytest.approx(0.0, abs=1e-12)

    def test_matches_brute_force(self, bsc12):
        rng = np.random.default_rng(5)
        for trial in range(4):
            chain = random_chain(rng, 2, 3, 2)
            params = CodebookParams(
                n=3, m1_size=2, j_size=2, l_size=2, seed=100 + trial
            )
            cb = generate(params, chain, bsc12)
            for ms in (MessageSets.case_a(params), MessageSets.case_b(params, 1)):
                from bbcsec.simulate import _word_table

                wv2 = chain.pxv.rows @ marginal(bsc12, 2).matrix
                v, wmat = _word_table(cb, ms, 0)
                expected = oracles.brute_force_equivocation(v, wmat, wv2, ms.mc_size)
                assert equivocation_exact(cb, ms) == pytest.approx(expected, abs=1e-10)

    def test_chunking_matches_unchunked(self, bsc12, degraded_chain, monkeypatch):
        # blocklength large enough to force several prefix chunks; the result
        # must match the single-chunk evaluation exactly
        import bbcsec.simulate as sim

        params = CodebookParams(n=15, j_size=2, l_size=2, seed=6)
        cb = generate(params, degraded_chain, bsc12)
        ms = MessageSets.case_a(params)
        chunked = equivocation_exact(cb, ms)
        monkeypatch.setattr(sim, "_CHUNK_ROWS", 1 << 21)
        whole = equivocation_exact(cb, ms)
        assert chunked == pytest.approx(whole, abs=1e-11)
        assert 0.0 <= chunked <= math.log2(ms.mc_size) + 1e-9

    def test_guard(self, bsc12, degraded_chain):
        params = CodebookParams(n=21, j_size=2, seed=0)
        cb = generate(params, degraded_chain, bsc12)
        with pytest.raises(GuardError):
            equivocation_exact(cb, MessageSets.case_a(params))


class TestEquivocationMc:
    def test_uniform_output_within_three_se(self, degraded_chain):
        ch = _uniform_w2_channel()
        params = CodebookParams(n=5, j_size=2, l_size=2, seed=2)
        cb = generate(params, degraded_chain, ch)
        ms = MessageSets.case_a(params)
        est, se = equivocation_mc(cb, ms, 500, np.random.default_rng(3))
        assert est == pytest.approx(math.log2(ms.mc_size), abs=max(3 * se, 1e-9))

    def test_single_message_exact_zero(self, bsc12, degraded_chain):
        params = CodebookParams(n=4, seed=1)
        cb = generate(params, degraded_chain, bsc12)
        ms = MessageSets.case_a(params)
        est, se = equivocation_mc(cb, ms, 100, np.random.default_rng(0))
        assert est == 0.0
        assert se == 0.0

    def test_cross_validates_exact(self, bsc12):
        rng = np.random.default_rng(7)
        for trial in range(3):
            chain = random_chain(rng, 1, 2, 2)
            params = CodebookParams(n=6, m1_size=2, j_size=2, l_size=2, seed=40 + trial)
            cb = generate(params, chain, bsc12)
            ms = MessageSets.case_a(params)
            exact = equivocation_exact(cb, ms)
            est, se = equivocation_mc(cb, ms, 3000, np.random.default_rng(50 + trial))
            assert abs(est - exact) <= max(3 * se, 1e-9)


class TestAsymptoticTerms:
    def test_trivial_chain_all_zero(self):
        ch = from_marginals(np.eye(2), np.eye(2))
        chain = AuxChain(Dist([1.0]), CondDist([[1.0]]), CondDist([[1.0, 0.0]]))
        terms = asymptotic_terms(chain, ch)
        assert terms.sub_rate_limit == pytest.approx(0.0, abs=1e-12)
        assert terms.combination == pytest.approx(0.0, abs=1e-12)

    def test_uniform_output_channel(self, degraded_chain):
        ch = _uniform_w2_channel()
        terms = asymptotic_terms(degraded_chain, ch)
        assert terms.h_out2_given_code == pytest.approx(1.0, abs=1e-12)
        assert terms.h_out2_given_cloud == pytest.approx(1.0, abs=1e-12)
        assert terms.combination == pytest.approx(terms.sub_rate_limit, abs=1e-12)

    def test_degraded_bsc_combination(self, bsc12, degraded_chain):
        terms = asymptotic_terms(degraded_chain, bsc12)
        expected = oracles.binary_entropy(0.2) - oracles.binary_entropy(0.1)
        assert terms.combination == pytest.approx(expected, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_identity_for_random_chains(self, seed):
        rng = np.random.default_rng(seed)
        chain = random_chain(rng, int(rng.integers(1, 5)), int(rng.integers(1, 6)), 2)
        ch = random_channel(rng, 2, 2, int(rng.integers(2, 4)))
        terms = asymptotic_terms(chain, ch)
        iq = evaluate_chain(chain, ch)
        assert abs(terms.combination - (iq.iv1 - iq.iv2)) < 1e-10
        assert abs((terms.h_out2_given_code - terms.h_out2_given_cloud) + iq.iv2) < 1e-10


class TestRun:
    def test_noiseless_no_errors_and_exact_equivocation(self):
        ch = from_marginals(np.eye(4), np.eye(4))
        chain = AuxChain(Dist([1.0]), CondDist([[0.25] * 4]), CondDist(np.eye(4)))
        params = CodebookParams(n=6, j_size=2, l_size=2, epsilon=1.0, seed=4)
        cfg = SimConfig(trials=60, params=params, chain=chain, channel=ch, seed=9)
        rep = run(cfg)
        assert rep.e1.rate == 0.0
        cb = generate(params, chain, ch)
        assert rep.equiv_rate == pytest.approx(
            equivocation_exact(cb, MessageSets.case_a(params)) / params.n, abs=1e-12
        )

    def test_uniform_output_zero_leakage(self, degraded_chain):
        ch = _uniform_w2_channel()
        params = CodebookParams(n=5, j_size=2, l_size=2, epsilon=0.4, seed=5)
        cfg = SimConfig(trials=40, params=params, chain=degraded_chain, channel=ch, seed=1)
        rep = run(cfg)
        assert rep.leakage_rate == pytest.approx(0.0, abs=1e-12)

    def test_worker_invariance(self, bsc12, degraded_chain):
        params = CodebookParams(n=8, j_size=2, l_size=2, epsilon=0.3, seed=6)
        base = SimConfig(trials=64, params=params, chain=degraded_chain, channel=bsc12,
                         seed=3, workers=1)
        parallel = SimConfig(trials=64, params=params, chain=degraded_chain, channel=bsc12,
                             seed=3, workers=8)
        assert run(base).to_dict() == run(parallel).to_dict()

    def test_equiv_rate_within_range(self, bsc12, degraded_chain):
        params = CodebookParams(n=8, j_size=4, l_size=2, epsilon=0.3, seed=7)
        cfg = SimConfig(trials=30, params=params, chain=degraded_chain, channel=bsc12, seed=2)
        rep = run(cfg)
        assert 0.0 <= rep.equiv_rate <= rep.confidential_rate + 1e-9
        assert rep.epsilon_n == max(rep.e1.rate, rep.e2.rate)

    def test_mc_mode(self, bsc12, degraded_chain):
        params = CodebookParams(n=6, j_size=2, l_size=2, epsilon=0.3, seed=8)
        cfg = SimConfig(trials=20, params=params, chain=degraded_chain, channel=bsc12,
                        equiv_mode="mc", mc_samples=400, seed=4)
        rep = run(cfg)
        assert rep.equiv_se is not None and rep.equiv_se > 0

    def test_bad_mode(self, bsc12, degraded_chain):
        with pytest.raises(ValidationError):
            SimConfig(trials=1, params=CodebookParams(n=4), chain=degraded_chain,
                      channel=bsc12, equiv_mode="sometimes")
