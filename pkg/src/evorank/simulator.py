"""Stochastic copy/mutate simulation of the finite-population process.

This is the micro-level oracle for the analytic pipeline: individuals are
simulated one imitation event at a time, so occupancy statistics and
fixation frequencies can be compared against the transition-matrix results
they are supposed to reproduce.

An event: pick a population uniformly, sample two of its individuals without
replacement, and update the first one, which either mutates to a uniformly
random different strategy (probability ``mu``) or copies the second one's
strategy with the logistic copy probability.  Fitnesses use the sampled
opponents only: one individual is drawn from each other population to form
the background contest.

Runs at a given seed are deterministic.  Time is counted in events;
occupancy fractions are ratios and insensitive to how events map onto
generations.  Two exact shortcuts keep long runs fast without changing the
law of the process: while every population is monomorphic, the run length
until the next mutation is sampled geometrically instead of event-by-event,
and fixation trials walk the embedded birth-death jump chain, whose jump
odds are exactly the two copy probabilities (the pair-sampling prefactors
cancel).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import metagame
from .errors import ShapeMismatch
from .evodyn import PairwiseContest, contest_fitnesses, fermi_copy_prob
from .metagame import MetaGame
from .rng import Xoshiro256StarStar

#: per-trial event cap for fixation runs; hitting it is a hard failure
_TRIAL_STEP_CAP = 10**8


@dataclass(frozen=True)
class SimConfig:
    """Simulation knobs; ``mutation_rate`` stands in for the vanishing-mutation
    limit and must stay small."""

    population_size: int
    ranking_intensity: float
    mutation_rate: float = 1e-3
    steps: int = 10**6
    seed: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ShapeMismatch(
                f"population size must be >= 2, got {self.population_size}"
            )
        if not 0.0 < self.mutation_rate <= 0.1:
            raise ShapeMismatch(
                f"mutation rate must lie in (0, 0.1], got {self.mutation_rate}"
            )
        if self.steps < 1:
            raise ShapeMismatch(f"steps must be >= 1, got {self.steps}")
        if not math.isfinite(self.ranking_intensity) or self.ranking_intensity < 0:
            raise ShapeMismatch(
                f"ranking intensity must be finite and >= 0, "
                f"got {self.ranking_intensity}"
            )


@dataclass(frozen=True)
class OccupancyReport:
    """Dwell statistics over monomorphic states.

    ``occupancy`` is normalized over monomorphic events only and sums to 1;
    ``mixed_fraction`` reports the share of all events spent in polymorphic
    states; ``fixations`` counts arrivals at a new monomorphic state.
    """

    occupancy: np.ndarray
    fixations: int
    mixed_fraction: float
    total_events: int

    def to_json(self, game: MetaGame | None = None) -> str:
        payload = {
            "occupancy": [float(p) for p in self.occupancy],
            "fixations": self.fixations,
            "mixed_fraction": self.mixed_fraction,
            "total_events": self.total_events,
        }
        if game is not None:
            payload["states"] = game.state_labels()
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


class _Population:
    """Strategy counts for one population, with O(1) monomorphism tracking."""

    __slots__ = ("counts", "size", "support")

    def __init__(self, num_strategies: int, strategy: int, size: int):
        self.counts = [0] * num_strategies
        self.counts[strategy] = size
        self.size = size
        self.support = 1

    def monomorphic_strategy(self) -> int:
        return self.counts.index(self.size)

    def strategy_of(self, individual: int) -> int:
        acc = 0
        for strategy, count in enumerate(self.counts):
            acc += count
            if individual < acc:
                return strategy
        raise IndexError(individual)

    def move(self, source: int, target: int) -> None:
        if source == target:
            return
        if self.counts[source] == self.size:
            self.support += 1
        self.counts[source] -= 1
        if self.counts[source] == 0:
            self.support -= 1
        if self.counts[target] == 0:
            self.support += 1
        self.counts[target] += 1
        if self.counts[target] == self.size:
            self.support = 1


def simulate(game: MetaGame, config: SimConfig) -> OccupancyReport:
    """Run ``config.steps`` imitation events and report occupancy.

    Deterministic for a fixed seed.
    """
    rng = Xoshiro256StarStar(config.seed)
    num_pops = game.num_populations
    m = config.population_size
    mu = config.mutation_rate
    log1m_mu = math.log1p(-mu)
    pops = [_Population(game.shape[k], 0, m) for k in range(num_pops)]

    dwell = [0] * game.num_states
    mixed_events = 0
    fixations = 0
    remaining = config.steps
    fermi_cache: dict[tuple, float] = {}

    def all_monomorphic() -> bool:
        return all(p.support == 1 for p in pops)

    def current_state() -> tuple[int, ...]:
        return tuple(p.monomorphic_strategy() for p in pops)

    last_mono = current_state()

    def copy_prob(k: int, s_first: int, s_second: int, background: tuple[int, ...]) -> float:
        key = (k, s_first, s_second, background)
        prob = fermi_cache.get(key)
        if prob is None:
            contest = PairwiseContest(
                population=k, resident=s_second, mutant=s_first, background=background
            )
            f_first, f_second = contest_fitnesses(game, contest)
            prob = fermi_copy_prob(f_first, f_second, config.ranking_intensity)
            fermi_cache[key] = prob
        return prob

    single_pop = num_pops == 1
    fermi_table: list[list[float]] = []
    if single_pop:
        n = game.shape[0]
        fermi_table = [
            [
                copy_prob(0, a, b, (0,)) if a != b else 0.5
                for b in range(n)
            ]
            for a in range(n)
        ]

    while remaining > 0:
        if all_monomorphic():
            state = current_state()
            state_index = metagame.profile_index(game, state)
            if state != last_mono:
                fixations += 1
            last_mono = state
            # monomorphic events are no-ops unless a mutation fires; the
            # number of quiet events before the next mutation is geometric
            u = 1.0 - rng.random()
            quiet = int(math.log(u) / log1m_mu) if u < 1.0 else 0
            if quiet >= remaining:
                dwell[state_index] += remaining
                remaining = 0
                break
            dwell[state_index] += quiet
            remaining -= quiet
            # the mutation event itself
            k = rng.randbelow(num_pops) if num_pops > 1 else 0
            n_k = game.shape[k]
            if n_k > 1:
                resident = pops[k].monomorphic_strategy()
                offset = rng.randbelow(n_k - 1)
                mutant = offset + (offset >= resident)
                pops[k].move(resident, mutant)
                mixed_events += 1
            else:
                dwell[state_index] += 1
            remaining -= 1
            continue

        # at least one population is polymorphic: simulate the event raw
        k = rng.randbelow(num_pops) if num_pops > 1 else 0
        pop = pops[k]
        first = rng.randbelow(m)
        second = rng.randbelow(m - 1)
        second += second >= first
        s_first = pop.strategy_of(first)
        s_second = pop.strategy_of(second)
        n_k = game.shape[k]
        if rng.random() < mu:
            if n_k > 1:
                offset = rng.randbelow(n_k - 1)
                mutant = offset + (offset >= s_first)
                pop.move(s_first, mutant)
        elif s_first != s_second:
            if single_pop:
                prob = fermi_table[s_first][s_second]
            else:
                background = tuple(
                    p.strategy_of(rng.randbelow(m)) if c != k else 0
                    for c, p in enumerate(pops)
                )
                prob = copy_prob(k, s_first, s_second, background)
            if rng.random() < prob:
                pop.move(s_first, s_second)
        remaining -= 1
        if all_monomorphic():
            state = current_state()
            dwell[state_index := metagame.profile_index(game, state)] += 1
            if state != last_mono:
                fixations += 1
            last_mono = state
        else:
            mixed_events += 1

    mono_events = sum(dwell)
    if mono_events > 0:
        occupancy = np.asarray(dwell, dtype=float) / mono_events
    else:
        occupancy = np.full(game.num_states, 1.0 / game.num_states)
    return OccupancyReport(
        occupancy=occupancy,
        fixations=fixations,
        mixed_fraction=mixed_events / config.steps,
        total_events=config.steps,
    )


@dataclass(frozen=True)
class FixationEstimate:
    estimate: float
    stderr: float
    trials: int
    fixations: int


def empirical_fixation(
    game: MetaGame,
    contest: PairwiseContest,
    m: int,
    alpha: float,
    trials: int,
    seed: int = 1,
) -> FixationEstimate:
    """Monte-Carlo fixation probability of one mutant among m-1 residents.

    Mutation is disabled, so each trial is an absorbing two-strategy
    birth-death walk; only count-changing events are simulated (the embedded
    jump chain), whose upward odds equal the resident-copies-mutant Fermi
    probability.  Returns the fixation fraction with its binomial standard
    error.
    """
    if m < 2:
        raise ShapeMismatch(f"population size must be >= 2, got {m}")
    if trials < 1:
        raise ShapeMismatch(f"trials must be >= 1, got {trials}")
    f_mut, f_res = contest_fitnesses(game, contest)
    up = fermi_copy_prob(f_res, f_mut, alpha)  # resident copies the mutant
    rng = Xoshiro256StarStar(seed)
    fixed = 0
    for _ in range(trials):
        count = 1
        steps = 0
        while 0 < count < m:
            steps += 1
            if steps > _TRIAL_STEP_CAP:
                raise RuntimeError(
                    f"fixation trial exceeded {_TRIAL_STEP_CAP} steps; "
                    "the contest chain failed to absorb"
                )
            count += 1 if rng.random() < up else -1
        fixed += count == m
    estimate = fixed / trials
    stderr = math.sqrt(max(estimate * (1.0 - estimate), 0.0) / trials)
    return FixationEstimate(estimate, stderr, trials, fixed)
