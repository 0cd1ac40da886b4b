import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from jsrlab import (
    MarkovChain,
    enumerate_closed_walks,
    enumerate_simple_cycles,
    invariant_probabilities,
    sample_path,
    scc_decompose,
)
from jsrlab.markov import NU_ZERO_TOL

from helpers import (
    brute_closed_walks,
    brute_simple_cycles,
    example_32_chain,
    least_rotation,
    random_chain_with_nu,
    random_stochastic,
    uniform_iid_chain,
)


class TestMarkovChainValidation:
    def test_row_sums_enforced(self):
        with pytest.raises(ValueError):
            MarkovChain(np.array([[0.5, 0.4], [0.5, 0.5]]))

    def test_negative_entries_rejected(self):
        with pytest.raises(ValueError):
            MarkovChain(np.array([[1.1, -0.1], [0.5, 0.5]]))

    def test_tiny_negatives_clamped(self):
        chain = MarkovChain(np.array([[1.0 + 1e-16, -1e-16], [0.5, 0.5]]))
        assert chain.p[0, 1] == 0.0

    def test_non_invariant_nu_rejected(self):
        p = np.array([[0.5, 0.5], [0.5, 0.5]])
        with pytest.raises(ValueError):
            MarkovChain(p, np.array([0.9, 0.1]))

    def test_successors(self):
        chain = example_32_chain()
        assert chain.successors(1) == (1, 2)
        assert chain.successors(2) == (3,)
        assert chain.successors(3) == (1,)


class TestInvariantProbabilities:
    def test_example_chain(self):
        structure = invariant_probabilities(example_32_chain())
        assert len(structure.extremes) == 1
        assert_allclose(structure.extremes[0], [0.5, 0.25, 0.25], atol=1e-10)

    def test_identity_two_states(self):
        structure = invariant_probabilities(MarkovChain(np.eye(2)))
        assert len(structure.extremes) == 2
        assert_allclose(structure.extremes[0], [1.0, 0.0], atol=1e-12)
        assert_allclose(structure.extremes[1], [0.0, 1.0], atol=1e-12)

    def test_absorbing_plus_transient(self):
        # Oracle: direct solve, state 2 is transient so nu = (1, 0).
        chain = MarkovChain(np.array([[1.0, 0.0], [0.5, 0.5]]))
        structure = invariant_probabilities(chain)
        assert len(structure.extremes) == 1
        assert_allclose(structure.extremes[0], [1.0, 0.0], atol=1e-12)

    def test_decompose_mixture(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            chain = MarkovChain(random_stochastic(rng, 6, max_out_degree=3))
            structure = invariant_probabilities(chain)
            alphas = rng.random(len(structure.extremes))
            alphas = alphas / alphas.sum()
            nu = structure.mixture(alphas)
            recovered = structure.decompose(nu)
            assert_allclose(recovered, alphas, atol=1e-10)
            rebuilt = sum(a * e for a, e in zip(recovered, structure.extremes))
            assert np.max(np.abs(rebuilt - nu)) <= 1e-10
            assert structure.is_invariant(nu)

    def test_membership_rejects_non_invariant(self):
        chain = MarkovChain(np.array([[0.5, 0.5], [0.5, 0.5]]))
        structure = invariant_probabilities(chain)
        assert structure.is_invariant(np.array([0.5, 0.5]))
        assert not structure.is_invariant(np.array([0.9, 0.1]))


class TestSccDecompose:
    def test_example_chain_strongly_connected(self):
        dec = scc_decompose(example_32_chain())
        assert dec.n_recurrent == 1
        assert dec.transient_indices == ()
        assert dec.recurrent_blocks[0][0] == (1, 2, 3)

    def test_identity_three_states(self):
        dec = scc_decompose(MarkovChain(np.eye(3)))
        assert dec.n_recurrent == 3
        assert all(len(idx) == 1 for idx, _ in dec.recurrent_blocks)
        assert dec.transient_matrix.shape == (0, 0)

    def test_two_state_transient(self):
        # Oracle: hand SCC on the 2-node graph.
        chain = MarkovChain(np.array([[1.0, 0.0], [0.5, 0.5]]))
        dec = scc_decompose(chain)
        assert dec.n_recurrent == 1
        assert dec.recurrent_blocks[0][0] == (1,)
        assert dec.transient_indices == (2,)
        assert_allclose(dec.transient_matrix, [[0.5]])

    def test_block_pattern_on_random_chains(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(2, 9))
            chain = MarkovChain(random_stochastic(rng, n, max_out_degree=3))
            dec = scc_decompose(chain)
            perm = dec.permuted(chain.p)
            offset = 0
            for idx, block in dec.recurrent_blocks:
                size = len(idx)
                rows = perm[offset : offset + size]
                assert_allclose(rows[:, offset : offset + size], block, atol=0)
                outside = np.delete(rows, np.s_[offset : offset + size], axis=1)
                assert np.all(outside == 0.0)
                # Each recurrent block is stochastic and strongly connected.
                assert_allclose(block.sum(axis=1), 1.0, atol=1e-12)
                sub = scc_decompose(MarkovChain(block))
                assert sub.n_recurrent == 1 and not sub.transient_indices
                offset += size
            if dec.transient_indices:
                from jsrlab import spectral_radius

                assert spectral_radius(dec.transient_matrix) < 1.0


class TestSimpleCycles:
    def test_example_graph(self):
        records = enumerate_simple_cycles(example_32_chain())
        assert {r.indices for r in records} == {(1,), (1, 2, 3)}

    def test_identity_self_loops(self):
        records = enumerate_simple_cycles(MarkovChain(np.eye(2)))
        assert {r.indices for r in records} == {(1,), (2,)}

    def test_unit_transition_cycle(self):
        # Deterministic cycle chain over pairwise distinct indices.
        p = np.array(
            [
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0],
            ]
        )
        records = enumerate_simple_cycles(MarkovChain(p))
        assert [r.indices for r in records] == [(1, 2, 3)]

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(2)
        for _ in range(60):
            n = int(rng.integers(2, 6))
            chain = MarkovChain(random_stochastic(rng, n, max_out_degree=n))
            records = enumerate_simple_cycles(chain)
            assert {r.indices for r in records} == brute_simple_cycles(chain.p)

    def test_nu_filter_stores_qualifying_start(self):
        p = np.array(
            [
                [0.0, 1.0],
                [1.0, 0.0],
            ]
        )
        nu = np.array([0.5, 0.5])
        records = enumerate_simple_cycles(MarkovChain(p, nu), require_nu_positive=True)
        assert len(records) == 1
        assert records[0].probability_positive
        assert records[0].indices[0] == records[0].starting_index


class TestClosedWalks:
    def test_example_graph_up_to_three(self):
        walks = [r.indices for r in enumerate_closed_walks(example_32_chain(), 3)]
        assert walks == [(1,), (1, 1), (1, 1, 1), (1, 2, 3), (2, 3, 1), (3, 1, 2)]

    def test_max_len_one_gives_self_loops(self):
        chain = example_32_chain()
        walks = [r.indices for r in enumerate_closed_walks(chain, 1)]
        assert walks == [(1,)]

    def test_two_cycle(self):
        chain = MarkovChain(np.array([[0.0, 1.0], [1.0, 0.0]]))
        walks = {r.indices for r in enumerate_closed_walks(chain, 4)}
        assert walks == {(1, 2), (2, 1), (1, 2, 1, 2), (2, 1, 2, 1)}

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n = int(rng.integers(2, 5))
            chain = MarkovChain(random_stochastic(rng, n, max_out_degree=2))
            walks = {r.indices for r in enumerate_closed_walks(chain, 4)}
            assert walks == brute_closed_walks(chain.p, 4)

    def test_decompose_cycle_containment(self):
        # Every admissible cycle lives inside exactly one recurrent block.
        rng = np.random.default_rng(4)
        for _ in range(150):
            n = int(rng.integers(2, 9))
            chain = random_chain_with_nu(rng, n, max_out_degree=3)
            blocks = [set(idx) for idx, _ in scc_decompose(chain).recurrent_blocks]
            for record in enumerate_simple_cycles(chain, require_nu_positive=True):
                hits = [i for i, b in enumerate(blocks) if set(record.indices) <= b]
                assert len(hits) == 1


class TestSamplePath:
    def test_deterministic_chain(self):
        p = np.array(
            [
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0],
            ]
        )
        nu = np.full(3, 1.0 / 3.0)
        chain = MarkovChain(p, nu)
        word = sample_path(chain, 7, seed=0)
        # After the sampled start the word is forced by the unit transitions.
        successor = {1: 2, 2: 3, 3: 1}
        for a, b in zip(word, word[1:]):
            assert b == successor[a]

    def test_absorbing_chain_unique_word(self):
        chain = MarkovChain(np.array([[1.0]]), np.array([1.0]))
        assert sample_path(chain, 5, seed=3) == (1, 1, 1, 1, 1)

    def test_seed_reproducible(self):
        chain = example_32_chain()
        assert sample_path(chain, 50, seed=42) == sample_path(chain, 50, seed=42)
        assert sample_path(chain, 50, seed=42) != sample_path(chain, 50, seed=43)

    def test_start_frequencies_match_nu(self):
        chain = example_32_chain()
        n_samples = 4000
        counts = np.zeros(3)
        for s in range(n_samples):
            counts[sample_path(chain, 1, seed=s)[0] - 1] += 1
        freq = counts / n_samples
        for i, target in enumerate([0.5, 0.25, 0.25]):
            sigma = np.sqrt(target * (1 - target) / n_samples)
            assert abs(freq[i] - target) <= 3 * sigma + 1e-9

    def test_uniform_letter_frequencies(self):
        chain = uniform_iid_chain(2)
        word = sample_path(chain, 4000, seed=9)
        ones = word.count(1) / 4000
        sigma = np.sqrt(0.25 / 4000)
        assert abs(ones - 0.5) <= 3 * sigma + 1e-9

    def test_nu_zero_tolerance(self):
        assert NU_ZERO_TOL == 1e-12
