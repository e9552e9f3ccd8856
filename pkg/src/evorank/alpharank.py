"""Evolutionary strategy rankings from stationary distributions.

The alpha-rank procedure: build the finite-population transition matrix,
solve for its unique stationary distribution, and order the states by their
stationary mass, which is each state's score.  Since "large enough" ranking
intensity is game-dependent, :func:`alpha_sweep` evaluates the distribution
on a geometric intensity grid and :func:`converged_alpha` finds where the
ordering stabilizes.
"""

from __future__ import annotations

import csv as _csv
import io
import json
from dataclasses import dataclass

import numpy as np

from . import metagame, stationary
from .errors import EvoRankError
from .evodyn import PAYOFF_EQUAL_RTOL, EvoParams, transition_matrix
from .metagame import MetaGame, Profile

DEFAULT_TIE_TOL = 1e-3
DEFAULT_SWEEP = dict(alpha_start=1e-4, factor=2.0, num_points=30)
DEFAULT_WINDOW = 3


@dataclass(frozen=True)
class RankingEntry:
    state: Profile
    label: str
    rank: int
    score: float


@dataclass(frozen=True)
class RankingResult:
    """Ordered ranking table; scores are stationary masses and sum to 1.

    Entries are sorted by descending score with ties broken by ascending
    state index.  States whose scores agree within the tie tolerance share a
    rank; the next distinct score takes the next rank, so a "two winners,
    two losers" leaderboard reads 1, 1, 2, 2.
    """

    alpha_used: float
    entries: tuple[RankingEntry, ...]

    def scores_by_state(self) -> dict[Profile, float]:
        return {e.state: e.score for e in self.entries}

    def ranks_by_state(self) -> dict[Profile, int]:
        return {e.state: e.rank for e in self.entries}

    def to_text(self) -> str:
        """Human-readable table with scores rounded to two decimals."""
        rows = [("Agent", "Rank", "Score")]
        for e in self.entries:
            rows.append((e.label, str(e.rank), f"{e.score:.2f}"))
        widths = [max(len(r[c]) for r in rows) for c in range(3)]
        lines = [
            "  ".join(cell.ljust(widths[c]) for c, cell in enumerate(row)).rstrip()
            for row in rows
        ]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = _csv.writer(out, lineterminator="\n")
        writer.writerow(["agent", "rank", "score"])
        for e in self.entries:
            writer.writerow([e.label, e.rank, repr(e.score)])
        return out.getvalue()

    def to_json(self) -> str:
        payload = {
            "alpha": self.alpha_used,
            "entries": [
                {
                    "agent": e.label,
                    "state": list(e.state),
                    "rank": e.rank,
                    "score": e.score,
                }
                for e in self.entries
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class SweepResult:
    """Distributions along a strictly increasing intensity grid.

    Failed grid points keep their slot: ``distributions[i]`` is None and
    ``errors[i]`` records why.  ``converged_at`` is the smallest grid value
    where the ranking stabilized under the default window policy, or None.
    """

    alphas: tuple[float, ...]
    distributions: tuple[np.ndarray | None, ...]
    errors: tuple[str | None, ...]
    converged_at: float | None


def _rank_assignment(probabilities, tie_tol: float) -> tuple[int, ...]:
    """Per-state ranks: tolerance-grouped scores share a rank, next group +1."""
    order = sorted(range(len(probabilities)), key=lambda i: (-probabilities[i], i))
    ranks = [0] * len(probabilities)
    rank = 0
    group_score = None
    for i in order:
        score = float(probabilities[i])
        if group_score is None or group_score - score > tie_tol:
            rank += 1
            group_score = score
        ranks[i] = rank
    return tuple(ranks)


def ranking_from_distribution(
    game: MetaGame,
    probabilities: np.ndarray,
    alpha: float,
    tie_tol: float = DEFAULT_TIE_TOL,
) -> RankingResult:
    """Rank states by stationary mass with tolerance-grouped shared ranks."""
    ranks = _rank_assignment(probabilities, tie_tol)
    order = sorted(range(game.num_states), key=lambda i: (-probabilities[i], i))
    entries = []
    for i in order:
        state = metagame.index_profile(game, i)
        entries.append(
            RankingEntry(
                state=state,
                label=game.state_label(state),
                rank=ranks[i],
                score=float(probabilities[i]),
            )
        )
    return RankingResult(alpha_used=float(alpha), entries=tuple(entries))


def alpha_rank(
    game: MetaGame,
    params: EvoParams,
    tie_tol: float = DEFAULT_TIE_TOL,
    tol: float = 1e-10,
    max_iters: int = 10**6,
    prob_floor: float = 0.0,
    equal_rtol: float = PAYOFF_EQUAL_RTOL,
) -> RankingResult:
    """Rank all pure states of the game at one ranking intensity.

    Raises ``ReducibleChain`` when the intensity is so large that some
    state's outgoing probabilities all underflowed to zero; either reduce it
    or pass a tiny ``prob_floor`` to keep the chain connected.
    """
    chain = transition_matrix(game, params, prob_floor=prob_floor, equal_rtol=equal_rtol)
    dist = stationary.stationary_distribution(chain, tol=tol, max_iters=max_iters)
    return ranking_from_distribution(
        game, dist.probabilities, params.ranking_intensity, tie_tol
    )


def alpha_sweep(
    game: MetaGame,
    m: int = 50,
    alpha_start: float = DEFAULT_SWEEP["alpha_start"],
    factor: float = DEFAULT_SWEEP["factor"],
    num_points: int = DEFAULT_SWEEP["num_points"],
    tol: float = 1e-10,
    max_iters: int = 10**6,
    prob_floor: float = 0.0,
    equal_rtol: float = PAYOFF_EQUAL_RTOL,
    rank_tol: float = DEFAULT_TIE_TOL,
    window: int = DEFAULT_WINDOW,
) -> SweepResult:
    """Stationary distributions over a geometric ranking-intensity grid.

    Solver failures at individual grid points are recorded, not fatal.
    """
    if not alpha_start > 0:
        raise ValueError(f"alpha_start must be > 0, got {alpha_start}")
    if not factor > 1:
        raise ValueError(f"factor must be > 1, got {factor}")
    if num_points < 2:
        raise ValueError(f"num_points must be >= 2, got {num_points}")
    alphas = tuple(alpha_start * factor**i for i in range(num_points))
    distributions: list[np.ndarray | None] = []
    errors: list[str | None] = []
    for alpha in alphas:
        try:
            chain = transition_matrix(
                game,
                EvoParams(ranking_intensity=alpha, population_size=m),
                prob_floor=prob_floor,
                equal_rtol=equal_rtol,
            )
            dist = stationary.stationary_distribution(chain, tol=tol, max_iters=max_iters)
            distributions.append(dist.probabilities)
            errors.append(None)
        except EvoRankError as exc:
            distributions.append(None)
            errors.append(f"{type(exc).__name__}: {exc}")
    sweep = SweepResult(alphas, tuple(distributions), tuple(errors), None)
    converged = converged_alpha(sweep, rank_tol=rank_tol, window=window)
    return SweepResult(alphas, sweep.distributions, sweep.errors, converged)


def converged_alpha(
    sweep: SweepResult,
    rank_tol: float = DEFAULT_TIE_TOL,
    window: int = DEFAULT_WINDOW,
) -> float | None:
    """Smallest grid intensity where the ranking has stabilized.

    Stabilized means: for ``window`` consecutive valid grid points starting
    there, the rank ordering is identical and no state's score moves by more
    than ``rank_tol`` across the window.  Returns None when no such point
    exists (including sweeps shorter than the window).
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    n = len(sweep.alphas)
    if n < window:
        return None
    rankings: list[tuple[int, ...] | None] = [
        None if dist is None else _rank_assignment(dist, rank_tol)
        for dist in sweep.distributions
    ]
    for start in range(n - window + 1):
        chunk = range(start, start + window)
        if any(rankings[i] is None for i in chunk):
            continue
        if any(rankings[i] != rankings[start] for i in chunk):
            continue
        stacked = np.stack([sweep.distributions[i] for i in chunk])
        spread = float(np.max(stacked.max(axis=0) - stacked.min(axis=0)))
        if spread <= rank_tol:
            return sweep.alphas[start]
    return None


def sweep_to_csv(game: MetaGame, sweep: SweepResult) -> str:
    """Matrix export: one row per grid intensity, one column per state."""
    out = io.StringIO()
    writer = _csv.writer(out, lineterminator="\n")
    writer.writerow(["alpha"] + game.state_labels())
    for alpha, dist, err in zip(sweep.alphas, sweep.distributions, sweep.errors):
        if dist is None:
            writer.writerow([repr(alpha)] + [err] * game.num_states)
        else:
            writer.writerow([repr(alpha)] + [repr(float(p)) for p in dist])
    return out.getvalue()
