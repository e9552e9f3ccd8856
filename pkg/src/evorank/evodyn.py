"""Finite-population discrete-time selection dynamics over monomorphic states.

Each evolving population holds ``m`` individuals playing one strategy; a rare
mutant either fixates or goes extinct before the next mutation arrives, so
the macro process is a Markov chain whose states are monomorphic profiles.
From state ``i``, each of the ``sum_k (|S^k| - 1)`` single-population switches
``j`` receives probability ``eta * rho``, where ``eta`` normalizes over the
possible mutations and ``rho`` is the fixation probability of the mutant
under logistic (Fermi) pairwise imitation with selection strength given by
the ranking intensity.

The mutation rate itself never appears at runtime: the model is defined in
the small-mutation limit, where mutations are rare enough that at most one
population is ever polymorphic.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import metagame
from .errors import IndexOutOfRange, ShapeMismatch
from .metagame import MetaGame, Profile

#: relative threshold below which two payoffs count as equal
PAYOFF_EQUAL_RTOL = 1e-12


def payoffs_equal(a: float, b: float, rtol: float = PAYOFF_EQUAL_RTOL) -> bool:
    """Equality test shared by the transition matrix and the response graph."""
    return abs(a - b) < rtol * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class EvoParams:
    """Population size ``m`` and ranking intensity of the selection rule.

    The mutation rate has no field: it only enters as the vanishing-mutation
    assumption that keeps at most one population polymorphic at a time.
    """

    ranking_intensity: float
    population_size: int = 50

    def __post_init__(self):
        if self.population_size < 2:
            raise ShapeMismatch(
                f"population size must be >= 2, got {self.population_size}"
            )
        if not math.isfinite(self.ranking_intensity) or self.ranking_intensity < 0:
            raise ShapeMismatch(
                f"ranking intensity must be finite and >= 0, "
                f"got {self.ranking_intensity}"
            )


@dataclass(frozen=True)
class PairwiseContest:
    """A mutant strategy challenging a monomorphic resident in one population.

    ``background`` is the chain state supplying the other populations'
    strategies; its entry at ``population`` is ignored.  In single-population
    games the resident and mutant play each other directly and the background
    carries no information.
    """

    population: int
    resident: int
    mutant: int
    background: Profile

    def __post_init__(self):
        if self.resident == self.mutant:
            raise IndexOutOfRange("resident and mutant strategies must differ")


def fitness(game: MetaGame, population: int, strategy: int, background: Profile) -> float:
    """Fitness of a ``strategy`` player in ``population`` against ``background``.

    Under vanishing mutation the other populations are monomorphic, so the
    fitness reduces to the raw payoff entry.  For single-population games the
    background is the opposing strategy of the pairwise contest.
    """
    if game.single_population:
        if len(background) != 1:
            raise IndexOutOfRange("single-population background is one strategy")
        if game.num_players == 1:
            return metagame.payoff(game, 0, (strategy,))
        return metagame.payoff(game, 0, (strategy,) + background * (game.num_players - 1))
    state = background[:population] + (strategy,) + background[population + 1 :]
    return metagame.payoff(game, population, state)


def contest_fitnesses(game: MetaGame, contest: PairwiseContest) -> tuple[float, float]:
    """(mutant fitness, resident fitness) for a pairwise contest."""
    if game.single_population:
        if game.num_players == 1:
            return (
                metagame.payoff(game, 0, (contest.mutant,)),
                metagame.payoff(game, 0, (contest.resident,)),
            )
        # resident and mutant meet each other in the two-player contest
        f_mut = metagame.payoff(game, 0, (contest.mutant, contest.resident))
        f_res = metagame.payoff(game, 0, (contest.resident, contest.mutant))
        return f_mut, f_res
    f_mut = fitness(game, contest.population, contest.mutant, contest.background)
    f_res = fitness(game, contest.population, contest.resident, contest.background)
    return f_mut, f_res


def fermi_copy_prob(f_tau: float, f_sigma: float, alpha: float) -> float:
    """Probability that a tau-player copies a sigma-player's strategy.

    Logistic selection: ``(1 + exp(alpha * (f_tau - f_sigma)))**-1``.
    Saturates smoothly for large arguments; complementary in its arguments.
    """
    u = alpha * (f_tau - f_sigma)
    if u >= 0.0:
        e = math.exp(-u)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(u))


def fixation_probability(
    f_tau: float,
    f_sigma: float,
    alpha: float,
    m: int,
    equal_rtol: float = PAYOFF_EQUAL_RTOL,
) -> float:
    """Probability that one tau-mutant overtakes m-1 sigma-residents.

    Closed form ``(1 - exp(-u)) / (1 - exp(-m*u))`` with ``u = alpha * (f_tau
    - f_sigma)``; equal fitness gives the neutral value ``1/m``.  Branches
    keep every intermediate bounded: for ``u < 0`` the value is computed as
    ``exp(-(m-1)*|u|)`` times a bounded ratio, so extreme selection strengths
    underflow toward 0 instead of overflowing.
    """
    if m < 2:
        raise ShapeMismatch(f"population size must be >= 2, got {m}")
    if payoffs_equal(f_tau, f_sigma, equal_rtol):
        return 1.0 / m
    u = alpha * (f_tau - f_sigma)
    if abs(u) < 1e-12:
        return 1.0 / m
    if u > 0.0:
        return math.expm1(-u) / math.expm1(-m * u)
    v = -u
    return math.exp(-(m - 1) * v) * math.expm1(-v) / math.expm1(-m * v)


@dataclass(frozen=True)
class SparseMarkovChain:
    """Row-stochastic sparse transition matrix over monomorphic states.

    ``rows[i]`` lists ``(column, probability)`` pairs sorted by column, at
    most ``1 + sum_k (|S^k| - 1)`` of them.  ``eta`` is the per-mutation
    normalizer ``1 / sum_k (|S^k| - 1)`` (0.0 for the degenerate one-state
    game, which has no mutations).
    """

    num_states: int
    rows: tuple[tuple[tuple[int, float], ...], ...]
    eta: float

    def __post_init__(self):
        if len(self.rows) != self.num_states:
            raise ShapeMismatch(
                f"{len(self.rows)} rows for {self.num_states} states"
            )
        for i, row in enumerate(self.rows):
            total = 0.0
            for col, prob in row:
                if not 0 <= col < self.num_states:
                    raise IndexOutOfRange(f"column {col} out of range in row {i}")
                if not -1e-15 <= prob <= 1.0 + 1e-15:
                    raise ShapeMismatch(f"probability {prob} outside [0, 1]")
                total += prob
            if abs(total - 1.0) > 1e-12:
                raise ShapeMismatch(f"row {i} sums to {total}, expected 1")
            if any(row[t][0] >= row[t + 1][0] for t in range(len(row) - 1)):
                raise ShapeMismatch(f"row {i} columns not sorted")

    def to_csr(self) -> sp.csr_matrix:
        data, rows, cols = [], [], []
        for i, row in enumerate(self.rows):
            for col, prob in row:
                rows.append(i)
                cols.append(col)
                data.append(prob)
        return sp.csr_matrix(
            (data, (rows, cols)), shape=(self.num_states, self.num_states)
        )

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.num_states, self.num_states))
        for i, row in enumerate(self.rows):
            for col, prob in row:
                out[i, col] = prob
        return out


def transition_matrix(
    game: MetaGame,
    params: EvoParams,
    prob_floor: float = 0.0,
    equal_rtol: float = PAYOFF_EQUAL_RTOL,
) -> SparseMarkovChain:
    """The macro-model Markov chain at the given population size and intensity.

    Off-diagonal entries are ``eta * rho`` for each single-population switch;
    the self-transition is the complement of its row, which makes every row
    stochastic by construction.  Entries that underflow to exactly zero are
    dropped, which at extreme intensities can disconnect the chain; passing a
    tiny ``prob_floor`` (e.g. 1e-300) keeps every structural transition
    present without measurably changing well-conditioned results.
    """
    if prob_floor < 0.0 or prob_floor >= 1.0:
        raise ShapeMismatch(f"probability floor {prob_floor} outside [0, 1)")
    num_deviations = game.num_deviations
    if num_deviations == 0:
        return SparseMarkovChain(game.num_states, (((0, 1.0),),), 0.0)
    eta = 1.0 / num_deviations
    alpha = params.ranking_intensity
    m = params.population_size

    rows = []
    for i in range(game.num_states):
        state = metagame.index_profile(game, i)
        entries = []
        total = 0.0
        for k, neighbor in metagame.neighbors(game, state):
            contest = PairwiseContest(
                population=k,
                resident=state[k],
                mutant=neighbor[k],
                background=state,
            )
            f_mut, f_res = contest_fitnesses(game, contest)
            rho = fixation_probability(f_mut, f_res, alpha, m, equal_rtol)
            prob = eta * rho
            if prob < prob_floor:
                prob = prob_floor
            if prob > 0.0:
                entries.append((metagame.profile_index(game, neighbor), prob))
                total += prob
        # rounding in the sum must not push the complement below zero
        entries.append((i, max(1.0 - total, 0.0)))
        entries.sort()
        rows.append(tuple(entries))
    return SparseMarkovChain(game.num_states, tuple(rows), eta)


def sparsity(game: MetaGame) -> float:
    """Fraction of structurally-zero entries of the transition matrix.

    Each of the ``|S|`` rows holds at most ``1 + sum_k (|S^k| - 1)`` nonzeros,
    so the sparsity is ``1 - |S| * (1 + sum_k (|S^k| - 1)) / |S|**2``.
    """
    states = game.num_states
    return 1.0 - (1 + game.num_deviations) / states


def chain_to_coo_csv(chain: SparseMarkovChain) -> str:
    """Coordinate-list export: one ``row,col,prob`` line per stored entry."""
    out = io.StringIO()
    out.write("row,col,prob\n")
    for i, row in enumerate(chain.rows):
        for col, prob in row:
            out.write(f"{i},{col},{prob!r}\n")
    return out.getvalue()
