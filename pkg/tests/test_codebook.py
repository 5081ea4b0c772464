import math

import numpy as np
import pytest

from bbcsec import (
    AuxChain,
    CodebookParams,
    CondDist,
    Dist,
    GuardError,
    ValidationError,
    evaluate_chain,
    generate,
    is_typical,
    rate_check,
)
from bbcsec.probability import JointDist, chain_joint

from . import oracles


class TestParams:
    def test_bad_sizes(self):
        with pytest.raises(ValidationError):
            CodebookParams(n=0)
        with pytest.raises(ValidationError):
            CodebookParams(n=4, j_size=0)
        with pytest.raises(ValidationError):
            CodebookParams(n=4, epsilon=0.0)


class TestGenerate:
    def test_constant_first_layer(self, bsc12, degraded_chain):
        params = CodebookParams(n=6, j_size=2, l_size=2, seed=1)
        cb = generate(params, degraded_chain, bsc12)
        assert np.all(cb.u_words == 0)

    def test_deterministic_second_layer_copies_first(self, noiseless2):
        chain = AuxChain(Dist.uniform(2), CondDist(np.eye(2)), CondDist(np.eye(2)))
        params = CodebookParams(n=5, m1_size=2, m2_size=2, seed=2)
        cb = generate(params, chain, noiseless2)
        expected = np.broadcast_to(cb.u_words, cb.v_words.shape)
        assert np.array_equal(cb.v_words, expected)

    def test_seed_determinism(self, bsc12, degraded_chain):
        params = CodebookParams(n=8, j_size=4, l_size=2, seed=7)
        a = generate(params, degraded_chain, bsc12)
        b = generate(params, degraded_chain, bsc12)
        assert np.array_equal(a.u_words, b.u_words)
        assert np.array_equal(a.v_words, b.v_words)

    def test_sampler_frequencies(self, bsc12):
        # empirical check on the symbolwise sampler at long blocklength
        chain = AuxChain(
            Dist([0.2, 0.5, 0.3]),
            CondDist(np.tile([0.7, 0.3], (3, 1))),
            CondDist([[0.5, 0.5], [0.5, 0.5]]),
        )
        params = CodebookParams(n=4096, seed=3)
        cb = generate(params, chain, bsc12)
        freq = np.bincount(cb.u_words.reshape(-1), minlength=3) / 4096
        assert np.max(np.abs(freq - chain.pu.probs)) < 0.05

    def test_guard(self, bsc12, degraded_chain):
        params = CodebookParams(n=1024, j_size=1 << 12, l_size=1 << 6, m1_size=4, seed=0)
        with pytest.raises(GuardError):
            generate(params, degraded_chain, bsc12)


class TestRateCheck:
    def test_all_singleton_sizes(self, bsc12, degraded_chain):
        iq = evaluate_chain(degraded_chain, bsc12)
        conditions = rate_check(CodebookParams(n=8), iq, delta=0.3)
        for c in conditions:
            assert c.code_rate == 0.0
            assert c.exists_ok == (c.bound <= 0.3)

    def test_column_rate_arithmetic(self, bsc12, degraded_chain):
        iq = evaluate_chain(degraded_chain, bsc12)
        conditions = rate_check(CodebookParams(n=16, j_size=4), iq, delta=0.05)
        col = next(c for c in conditions if c.name == "column_index")
        assert col.code_rate == pytest.approx(0.125)
        assert col.bound == pytest.approx(iq.iv2)

    def test_degraded_reliability_direction(self, bsc12, degraded_chain):
        iq = evaluate_chain(degraded_chain, bsc12)
        conditions = rate_check(CodebookParams(n=16, j_size=16), iq, delta=0.05)
        col = next(c for c in conditions if c.name == "column_index")
        assert col.code_rate == pytest.approx(0.25)
        assert iq.iv2 == pytest.approx(1 - oracles.binary_entropy(0.2), abs=1e-12)
        assert col.reliable_ok  # 0.25 <= 0.27807


class TestIsTypical:
    def test_deterministic_joint_any_epsilon(self):
        j = JointDist(("U", "Y1"), np.array([[1.0, 0.0], [0.0, 0.0]]))
        seqs = {"U": np.zeros(8, dtype=int), "Y1": np.zeros(8, dtype=int)}
        assert is_typical(seqs, j, 1e-12)

    def test_zero_probability_symbol(self):
        j = JointDist(("U", "Y1"), np.array([[1.0, 0.0], [0.0, 0.0]]))
        seqs = {"U": np.array([0, 1]), "Y1": np.array([0, 0])}
        assert not is_typical(seqs, j, math.inf)

    def test_uniform_pair(self):
        j = JointDist(("U", "Y1"), np.full((2, 2), 0.25))
        seqs = {"U": np.zeros(16, dtype=int), "Y1": np.zeros(16, dtype=int)}
        # sample log-probability is exactly the joint entropy here
        assert is_typical(seqs, j, 0.1)

    def test_epsilon_zero_exact_match_only(self):
        j = JointDist(("U", "Y1"), np.array([[0.4, 0.1], [0.1, 0.4]]))
        balanced = {"U": np.array([0, 0, 1, 1]), "Y1": np.array([0, 1, 0, 1])}
        assert not is_typical(balanced, j, 0.0)
        uniform_j = JointDist(("U", "Y1"), np.full((2, 2), 0.25))
        assert is_typical(balanced, uniform_j, 0.0)

    def test_epsilon_infinity_accepts_positive_probability(self):
        rng = np.random.default_rng(5)
        j = JointDist(("U", "Y1"), rng.dirichlet(np.ones(4)).reshape(2, 2))
        seqs = {"U": rng.integers(2, size=12), "Y1": rng.integers(2, size=12)}
        if np.all(j.tensor > 0):
            assert is_typical(seqs, j, math.inf)

    def test_matches_independent_oracle(self, bsc12, degraded_chain):
        j = chain_joint(
            degraded_chain.pu, degraded_chain.pvu, degraded_chain.pxv, bsc12
        ).marginal({"V", "Y1"})
        rng = np.random.default_rng(9)
        for _ in range(100):
            eps = float(rng.choice([0.05, 0.15, 0.4]))
            seqs = {
                "V": rng.integers(2, size=10),
                "Y1": rng.integers(2, size=10),
            }
            expected = oracles.sample_entropy_check(seqs, j.tensor, ("V", "Y1"), eps)
            assert is_typical(seqs, j, eps) == expected

    def test_length_mismatch(self):
        j = JointDist(("U", "Y1"), np.full((2, 2), 0.25))
        with pytest.raises(ValidationError):
            is_typical({"U": np.zeros(4, dtype=int), "Y1": np.zeros(5, dtype=int)}, j, 0.1)
