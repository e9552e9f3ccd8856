import numpy as np
import pytest

from evorank import (
    EpsilonOutOfRange,
    EvoParams,
    affine_transform,
    check_limit_correspondence,
    index_profile,
    is_deviation_stable,
    mcc_chains,
    new_metagame,
    payoff,
    response_graph,
    response_graph_to_dot,
    sink_sccs,
    transition_matrix,
)

from conftest import RPS_MATRIX


def brute_force_multipop_edges(game):
    """All weakly-better unilateral deviations, straight from the payoffs."""
    edges = set()
    for i in range(game.num_states):
        src = index_profile(game, i)
        for k in range(game.num_populations):
            for s in range(game.shape[k]):
                if s == src[k]:
                    continue
                dst = src[:k] + (s,) + src[k + 1 :]
                j = sum(
                    d * int(np.prod(game.shape[c + 1 :]))
                    for c, d in enumerate(dst)
                )
                gain = payoff(game, k, dst) - payoff(game, k, src)
                if gain > 0:
                    edges.add((i, j, "strict"))
                elif gain == 0:
                    edges.add((i, j, "equal"))
    return edges


def reachable(edges, start, num_states):
    adj = {}
    for s, d, _ in edges:
        adj.setdefault(s, []).append(d)
    seen = {start}
    stack = [start]
    while stack:
        node = stack.pop()
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


class TestResponseGraph:
    def test_coordination_brute_force(self, coordination):
        graph = response_graph(coordination)
        assert set(graph.edges) == brute_force_multipop_edges(coordination)
        # all four strict edges point into the two coordinated profiles
        strict = {(s, d) for s, d, kind in graph.edges if kind == "strict"}
        assert strict == {(1, 0), (1, 3), (2, 0), (2, 3)}
        assert not [e for e in graph.edges if e[0] in (0, 3)]

    def test_two_population_rps_brute_force(self):
        a = np.asarray(RPS_MATRIX, dtype=float)
        game = new_metagame(
            2, [["R", "P", "S"]] * 2, [a, a.T], symmetric_flag=False
        )
        graph = response_graph(game)
        expected = brute_force_multipop_edges(game)
        assert set(graph.edges) == expected
        # each of the 9 profiles gives both deviators exactly one winning
        # and one losing switch; no column of the payoff matrix has ties
        assert len(graph.edges) == 18
        assert all(kind == "strict" for _, _, kind in graph.edges)

    def test_single_population_rps_cycle(self, rps):
        graph = response_graph(rps)
        assert set(graph.edges) == {(0, 1, "strict"), (1, 2, "strict"), (2, 0, "strict")}

    def test_constant_payoffs_all_equal_edges(self):
        game = new_metagame(
            2,
            [["a", "b"], ["a", "b"]],
            [np.ones((2, 2)), np.ones((2, 2))],
            symmetric_flag=False,
        )
        graph = response_graph(game)
        assert len(graph.edges) == 8
        assert all(kind == "equal" for _, _, kind in graph.edges)


class TestSinkSccs:
    def test_coordination_two_singletons(self, coordination):
        sinks = sink_sccs(response_graph(coordination))
        assert sinks == [(0,), (3,)]

    def test_matching_pennies_single_sink_of_four(self, matching_pennies):
        sinks = sink_sccs(response_graph(matching_pennies))
        assert sinks == [(0, 1, 2, 3)]

    def test_dominant_profile_single_singleton(self):
        row = np.asarray([[0.0, 0.0], [-1.0, -1.0]])
        col = np.asarray([[0.0, -1.0], [0.0, -1.0]])
        game = new_metagame(2, [["a", "b"], ["a", "b"]], [row, col], False)
        sinks = sink_sccs(response_graph(game))
        assert sinks == [(0,)]

    def test_every_node_reaches_a_sink_and_condensation_is_acyclic(
        self, coordination, matching_pennies, bos, biased_rps
    ):
        for game in (coordination, matching_pennies, bos, biased_rps):
            graph = response_graph(game)
            sinks = sink_sccs(graph)
            sink_states = {s for comp in sinks for s in comp}
            for node in range(game.num_states):
                assert reachable(graph.edges, node, game.num_states) & sink_states
            # once inside a sink component, the walk cannot leave it
            for comp in sinks:
                comp_set = set(comp)
                for node in comp:
                    assert reachable(graph.edges, node, game.num_states) <= comp_set


class TestMccChains:
    def test_singleton_chain(self, coordination):
        mccs = mcc_chains(coordination, epsilon=0.02)
        assert mccs.components == ((0,), (3,))
        for chain in mccs.chains:
            np.testing.assert_array_equal(chain, [[1.0]])

    def test_rps_cycle_half_probabilities(self, rps):
        mccs = mcc_chains(rps, epsilon=0.02)
        assert mccs.components == ((0, 1, 2),)
        expected = np.asarray(
            [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]]
        )
        np.testing.assert_allclose(mccs.chains[0], expected, atol=1e-15)

    def test_all_equal_two_strategy_matches_neutral_macro_chain(self):
        game = new_metagame(2, [["a", "b"]], [np.zeros((2, 2))], symmetric_flag=True)
        mccs = mcc_chains(game, epsilon=1.0 / 50.0)
        assert mccs.components == ((0, 1),)
        assert mccs.chains[0][0, 1] == pytest.approx(0.02, abs=0)
        neutral = transition_matrix(game, EvoParams(ranking_intensity=0.0))
        np.testing.assert_allclose(mccs.chains[0], neutral.to_dense(), atol=1e-15)

    def test_epsilon_bounds(self, rps):
        for bad in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(EpsilonOutOfRange):
                mcc_chains(rps, epsilon=bad)

    def test_chains_row_stochastic_and_irreducible(
        self, rps, biased_rps, bos, coordination, matching_pennies
    ):
        for game in (rps, biased_rps, bos, coordination, matching_pennies):
            mccs = mcc_chains(game, epsilon=0.02)
            for comp, chain in zip(mccs.components, mccs.chains):
                np.testing.assert_allclose(chain.sum(axis=1), 1.0, atol=1e-12)
                positive = [
                    (a, b, "x")
                    for a in range(len(comp))
                    for b in range(len(comp))
                    if chain[a, b] > 0
                ]
                for a in range(len(comp)):
                    assert reachable(positive, a, len(comp)) == set(range(len(comp)))

    def test_singleton_sinks_are_deviation_stable(
        self, coordination, bos, biased_rps
    ):
        for game in (coordination, bos, biased_rps):
            mccs = mcc_chains(game, epsilon=0.02)
            for comp in mccs.components:
                if len(comp) == 1:
                    assert is_deviation_stable(game, comp[0])

    def test_singleton_sinks_are_pure_nash_multipop(self, coordination, bos):
        # direct payoff check, independent of the graph machinery
        for game in (coordination, bos):
            mccs = mcc_chains(game, epsilon=0.02)
            for comp in mccs.components:
                if len(comp) != 1:
                    continue
                state = index_profile(game, comp[0])
                for k in range(game.num_populations):
                    for s in range(game.shape[k]):
                        if s == state[k]:
                            continue
                        other = state[:k] + (s,) + state[k + 1 :]
                        assert payoff(game, k, other) <= payoff(game, k, state)

    def test_affine_invariance(
        self, rps, biased_rps, bos, coordination, matching_pennies
    ):
        for game in (rps, biased_rps, bos, coordination, matching_pennies):
            transformed = affine_transform(game, scale=2.5, offset=-7.0)
            assert (
                mcc_chains(game, 0.02).components
                == mcc_chains(transformed, 0.02).components
            )


class TestLimitCorrespondence:
    def test_rps_no_mass_outside(self, rps):
        report = check_limit_correspondence(rps, 50, (1.0, 10.0, 100.0))
        assert all(off == 0.0 for off in report.off_component_mass)

    def test_bos_mass_vanishes(self, bos):
        report = check_limit_correspondence(bos, 50, (100.0,))
        assert report.off_component_mass[0] < 1e-6

    def test_coordination_even_split(self, coordination):
        report = check_limit_correspondence(coordination, 50, (100.0,))
        assert report.off_component_mass[0] < 1e-6
        # even split across the two singleton components by symmetry
        chain = transition_matrix(
            coordination, EvoParams(ranking_intensity=100.0), prob_floor=1e-300
        )
        from evorank import stationary_distribution

        dist = stationary_distribution(chain)
        assert dist.probabilities[0] == pytest.approx(0.5, abs=1e-9)
        assert dist.probabilities[3] == pytest.approx(0.5, abs=1e-9)

    def test_deviation_shrinks_with_intensity(self, rps, biased_rps, bos, coordination):
        for game in (rps, biased_rps, bos, coordination):
            report = check_limit_correspondence(game, 50, (10.0, 100.0, 1000.0))
            dev = report.max_chain_deviation
            off = report.off_component_mass
            assert dev[1] <= dev[0] + 1e-15 and dev[2] <= dev[1] + 1e-15
            assert off[1] <= off[0] + 1e-15 and off[2] <= off[1] + 1e-15


def test_response_graph_dot(coordination):
    text = response_graph_to_dot(coordination)
    assert text.count("subgraph cluster_sink_") == 2
    assert "style=solid" in text
    assert text.strip().startswith("digraph")
    constant = new_metagame(
        2,
        [["a", "b"], ["a", "b"]],
        [np.ones((2, 2)), np.ones((2, 2))],
        symmetric_flag=False,
    )
    dashed = response_graph_to_dot(constant)
    assert "style=dashed" in dashed
