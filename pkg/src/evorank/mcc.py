"""Response graphs, sink components, and their canonical Markov chains.

The response graph has one node per pure state and a directed edge for every
unilateral switch that does not decrease the switching population's payoff;
edges are tagged ``strict`` (payoff increases) or ``equal`` (payoff ties
within the shared equality threshold).  Sink strongly connected components of
this graph are the long-term recurrent strategy sets of the game: a singleton
sink is deviation-stable on its own, larger sinks are cycles of improvement.

Each sink component carries a canonical irreducible Markov chain: out of a
node, strictly improving switches get weight 1 and equal-payoff switches a
smaller weight ``epsilon``, all normalized by the total number of unilateral
switches; leftover mass self-transitions.  With ``epsilon = 1/m`` this chain
is exactly the infinite-intensity limit of the finite-population macro-model,
which :func:`check_limit_correspondence` verifies numerically.  Because only
payoff comparisons enter, the components are invariant under positive affine
payoff transformations.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import evodyn, metagame, stationary
from .errors import EpsilonOutOfRange, ShapeMismatch
from .evodyn import EvoParams, PAYOFF_EQUAL_RTOL
from .metagame import MetaGame, Profile

#: floor used when querying stationary mass beyond the underflow knee
_LIMIT_PROB_FLOOR = 1e-300


@dataclass(frozen=True)
class ResponseGraph:
    """Directed weakly-better-response graph over all pure states.

    ``edges`` holds ``(source, target, kind)`` triples with ``kind`` in
    ``{"strict", "equal"}``, in deterministic order (source index ascending,
    then the neighbor enumeration order).
    """

    num_states: int
    edges: tuple[tuple[int, int, str], ...]

    def successors(self, node: int) -> list[int]:
        return [dst for src, dst, _ in self.edges if src == node]


@dataclass(frozen=True)
class MccSet:
    """Sink components with their canonical chains.

    ``components`` are disjoint, each sorted ascending, and listed by
    smallest member.  ``chains[c]`` is a row-stochastic matrix over
    ``components[c]`` in that order.
    """

    components: tuple[tuple[int, ...], ...]
    chains: tuple[np.ndarray, ...]
    epsilon: float

    @property
    def states(self) -> tuple[int, ...]:
        """Union of all component states, ascending."""
        return tuple(sorted(s for comp in self.components for s in comp))


def deviation_payoffs(
    game: MetaGame, state: Profile, population: int, target: Profile
) -> tuple[float, float]:
    """(payoff after switching, payoff before) for the switching population.

    Multi-population games compare the deviator's payoff at the new state
    against the old one.  Single-population games compare the invading
    strategy against the resident in their pairwise contest, matching the
    fitness comparison that drives the macro-model.
    """
    if game.single_population:
        contest = evodyn.PairwiseContest(
            population=0,
            resident=state[0],
            mutant=target[0],
            background=state,
        )
        return evodyn.contest_fitnesses(game, contest)
    new = metagame.payoff(game, population, target)
    old = metagame.payoff(game, population, state)
    return new, old


def deviation_gain(
    game: MetaGame, state: Profile, population: int, target: Profile
) -> float:
    new, old = deviation_payoffs(game, state, population, target)
    return new - old


def response_graph(game: MetaGame, equal_rtol: float = PAYOFF_EQUAL_RTOL) -> ResponseGraph:
    """Weakly-better-response graph; payoff-decreasing switches get no edge.

    The strict/equal classification uses the same relative payoff-equality
    threshold as the transition matrix, so both views of the game agree.
    """
    edges = []
    for i in range(game.num_states):
        state = metagame.index_profile(game, i)
        for k, neighbor in metagame.neighbors(game, state):
            new, old = deviation_payoffs(game, state, k, neighbor)
            j = metagame.profile_index(game, neighbor)
            if evodyn.payoffs_equal(new, old, equal_rtol):
                edges.append((i, j, "equal"))
            elif new > old:
                edges.append((i, j, "strict"))
    return ResponseGraph(game.num_states, tuple(edges))


def sink_sccs(graph: ResponseGraph) -> list[tuple[int, ...]]:
    """Strongly connected components with no outgoing condensation edges.

    Deterministic order: by smallest member state index.
    """
    n = graph.num_states
    if graph.edges:
        src, dst, _ = zip(*graph.edges)
        adjacency = sp.csr_matrix(
            (np.ones(len(src)), (np.array(src), np.array(dst))), shape=(n, n)
        )
    else:
        adjacency = sp.csr_matrix((n, n))
    n_comps, labels = connected_components(adjacency, directed=True, connection="strong")
    has_exit = np.zeros(n_comps, dtype=bool)
    for s, d, _ in graph.edges:
        if labels[s] != labels[d]:
            has_exit[labels[s]] = True
    sinks = []
    for comp in range(n_comps):
        if not has_exit[comp]:
            members = tuple(int(i) for i in np.flatnonzero(labels == comp))
            sinks.append(members)
    sinks.sort(key=lambda members: members[0])
    return sinks


def mcc_chains(
    game: MetaGame, epsilon: float, equal_rtol: float = PAYOFF_EQUAL_RTOL
) -> MccSet:
    """Canonical chain over each sink component.

    Out of a node, each strictly improving switch carries probability
    ``1/D`` and each equal-payoff switch ``epsilon/D``, where ``D`` is the
    total number of unilateral switches; the remainder self-transitions.
    ``epsilon`` must lie strictly in (0, 1).
    """
    if not 0.0 < epsilon < 1.0:
        raise EpsilonOutOfRange(f"epsilon must lie strictly in (0, 1), got {epsilon}")
    graph = response_graph(game, equal_rtol)
    components = tuple(tuple(c) for c in sink_sccs(graph))
    deviations = game.num_deviations
    chains = []
    for comp in components:
        index_in_comp = {state: pos for pos, state in enumerate(comp)}
        matrix = np.zeros((len(comp), len(comp)))
        if deviations == 0:
            matrix[0, 0] = 1.0
            chains.append(matrix)
            continue
        for src, dst, kind in graph.edges:
            if src not in index_in_comp:
                continue
            # a sink component has no outgoing edges, so dst stays inside
            weight = 1.0 if kind == "strict" else epsilon
            matrix[index_in_comp[src], index_in_comp[dst]] += weight / deviations
        for pos in range(len(comp)):
            matrix[pos, pos] += 1.0 - matrix[pos].sum()
        chains.append(matrix)
    return MccSet(components, tuple(chains), epsilon)


def is_deviation_stable(game: MetaGame, state_index: int, equal_rtol: float = PAYOFF_EQUAL_RTOL) -> bool:
    """True iff no unilateral switch strictly improves the switcher's payoff.

    For multi-population games this is the pure Nash condition; for
    single-population games the comparison is the pairwise invasion contest.
    """
    state = metagame.index_profile(game, state_index)
    for k, neighbor in metagame.neighbors(game, state):
        new, old = deviation_payoffs(game, state, k, neighbor)
        if new > old and not evodyn.payoffs_equal(new, old, equal_rtol):
            return False
    return True


@dataclass(frozen=True)
class CorrespondenceReport:
    """How closely the macro-model approaches the sink-component chains.

    Per intensity value: the largest entrywise gap between the macro chain
    restricted to each component and the canonical chain at
    ``epsilon = 1/m``, and the stationary mass lying outside all components.
    Both shrink toward zero as the intensity grows past the knee.
    """

    alphas: tuple[float, ...]
    max_chain_deviation: tuple[float, ...]
    off_component_mass: tuple[float, ...]
    components: tuple[tuple[int, ...], ...]

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.alphas, self.max_chain_deviation, self.off_component_mass))


def check_limit_correspondence(
    game: MetaGame,
    m: int,
    alpha_grid,
    equal_rtol: float = PAYOFF_EQUAL_RTOL,
) -> CorrespondenceReport:
    """Compare the macro-model against the canonical sink chains on a grid.

    Chains are built with a tiny probability floor so the stationary query
    stays well-posed beyond the intensity where real transitions underflow.
    """
    alphas = tuple(float(a) for a in alpha_grid)
    mccs = mcc_chains(game, epsilon=1.0 / m, equal_rtol=equal_rtol)
    inside = set(mccs.states)
    deviations = []
    off_masses = []
    for alpha in alphas:
        chain = evodyn.transition_matrix(
            game,
            EvoParams(ranking_intensity=alpha, population_size=m),
            prob_floor=_LIMIT_PROB_FLOOR,
            equal_rtol=equal_rtol,
        )
        dense = chain.to_dense()
        worst = 0.0
        for comp, target in zip(mccs.components, mccs.chains):
            restricted = dense[np.ix_(comp, comp)]
            worst = max(worst, float(np.max(np.abs(restricted - target))))
        deviations.append(worst)
        dist = stationary.stationary_distribution(chain)
        off = 1.0 - sum(float(dist.probabilities[s]) for s in inside)
        off_masses.append(max(off, 0.0))
    return CorrespondenceReport(
        alphas, tuple(deviations), tuple(off_masses), mccs.components
    )


def response_graph_to_dot(
    game: MetaGame,
    graph: ResponseGraph | None = None,
    equal_rtol: float = PAYOFF_EQUAL_RTOL,
) -> str:
    """DOT rendering: strict edges solid, equal edges dashed, sinks clustered."""
    if graph is None:
        graph = response_graph(game, equal_rtol)
    if graph.num_states != game.num_states:
        raise ShapeMismatch("response graph does not match the game")
    sinks = sink_sccs(graph)
    in_sink = {s for comp in sinks for s in comp}
    labels = game.state_labels()
    out = io.StringIO()
    out.write("digraph response_graph {\n")
    out.write("  rankdir=LR;\n  node [shape=ellipse, style=filled, fillcolor=white];\n")
    palette = ["lightskyblue", "palegreen", "lightsalmon", "plum", "khaki", "lightcyan"]
    for c, comp in enumerate(sinks):
        out.write(f"  subgraph cluster_sink_{c} {{\n")
        out.write(f'    label="sink component {c}";\n    style=filled;\n')
        out.write(f'    color="{palette[c % len(palette)]}";\n')
        for s in comp:
            out.write(f'    s{s} [label="{labels[s]}"];\n')
        out.write("  }\n")
    for s in range(graph.num_states):
        if s not in in_sink:
            out.write(f'  s{s} [label="{labels[s]}"];\n')
    for src, dst, kind in graph.edges:
        style = "solid" if kind == "strict" else "dashed"
        out.write(f"  s{src} -> s{dst} [style={style}];\n")
    out.write("}\n")
    return out.getvalue()
