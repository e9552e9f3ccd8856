"""K-player normal-form meta-games and their pure-strategy state space.

A meta-game assigns a real payoff tensor ``M^k`` to each player slot
``k``; the entry ``M^k[s]`` is player ``k``'s payoff at the pure profile
``s``.  Strategies are whole agents under evaluation, payoffs are typically
empirical outcomes such as win rates.

Two kinds of index tuples appear throughout:

* an *NFG profile* has one entry per player slot (length ``num_players``)
  and indexes the payoff tensors;
* a *state* (also called a profile where unambiguous) has one entry per
  evolving population (length ``num_populations``) and is a node of the
  evolutionary Markov chain.

For asymmetric games the two coincide.  A symmetric 2-player game is stored
and evaluated single-population: one ``n x n`` tensor, states of length 1,
and pairwise contests between resident and mutant strategies.  Symmetric
games with more than two players keep one base tensor and expose the per-slot
views via axis moves, but evolve as ``K`` populations (the pairwise contest
reduction only exists for two players).

State indices use mixed-radix encoding with population 0 most significant,
so all outputs have a deterministic, documented ordering.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    IndexOutOfRange,
    NonFinitePayoff,
    NotSquare,
    OutOfRangeEntry,
    ShapeMismatch,
    SymmetryViolation,
)

Profile = tuple[int, ...]


@dataclass(frozen=True)
class MetaGame:
    """An immutable K-player meta-game.

    Instances are safe for concurrent read access; construct via
    :func:`new_metagame` or :func:`from_winrate_matrix`, which validate.
    """

    num_players: int
    strategy_labels: tuple[tuple[str, ...], ...]
    payoffs: tuple[np.ndarray, ...]
    symmetric: bool
    #: per-population strategy counts (the radix of the chain's state space)
    shape: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "shape", tuple(len(labels) for labels in self.strategy_labels)
        )
        for tensor in self.payoffs:
            tensor.setflags(write=False)

    @property
    def num_populations(self) -> int:
        return len(self.strategy_labels)

    @property
    def single_population(self) -> bool:
        return self.num_populations == 1

    @property
    def num_states(self) -> int:
        return int(np.prod(self.shape, dtype=np.int64))

    @property
    def num_deviations(self) -> int:
        """Unilateral deviations available from any state: sum_k (|S^k| - 1)."""
        return sum(n - 1 for n in self.shape)

    def state_label(self, state: Profile) -> str:
        names = [self.strategy_labels[k][s] for k, s in enumerate(state)]
        if self.single_population:
            return names[0]
        return "(" + ",".join(names) + ")"

    def state_labels(self) -> list[str]:
        return [self.state_label(index_profile(self, i)) for i in range(self.num_states)]


def _check_population(game: MetaGame, k: int) -> None:
    if not 0 <= k < game.num_players:
        raise IndexOutOfRange(f"player index {k} not in [0, {game.num_players})")


def payoff(game: MetaGame, k: int, profile: Profile) -> float:
    """Payoff ``M^k(profile)`` for player slot ``k`` at a full NFG profile."""
    _check_population(game, k)
    if len(profile) != game.num_players:
        raise IndexOutOfRange(
            f"profile length {len(profile)} != number of players {game.num_players}"
        )
    if game.symmetric:
        n = len(game.strategy_labels[0])
        if any(not 0 <= s < n for s in profile):
            raise IndexOutOfRange(f"profile {profile} out of range")
        # one stored tensor; slot k's payoff reads it with slot k moved first
        ordered = (profile[k],) + profile[:k] + profile[k + 1 :]
        return float(game.payoffs[0][ordered])
    for c, s in enumerate(profile):
        if not 0 <= s < game.shape[c]:
            raise IndexOutOfRange(f"profile {profile} out of range")
    return float(game.payoffs[k][profile])


def profile_index(game: MetaGame, state: Profile) -> int:
    """Flat index of a chain state (mixed radix, population 0 most significant)."""
    if len(state) != game.num_populations:
        raise IndexOutOfRange(
            f"state length {len(state)} != number of populations {game.num_populations}"
        )
    idx = 0
    for k, s in enumerate(state):
        n = game.shape[k]
        if not 0 <= s < n:
            raise IndexOutOfRange(f"strategy {s} not in [0, {n}) for population {k}")
        idx = idx * n + s
    return idx


def index_profile(game: MetaGame, index: int) -> Profile:
    """Inverse of :func:`profile_index`."""
    if not 0 <= index < game.num_states:
        raise IndexOutOfRange(f"state index {index} not in [0, {game.num_states})")
    out = []
    for n in reversed(game.shape):
        out.append(index % n)
        index //= n
    return tuple(reversed(out))


def neighbors(game: MetaGame, state: Profile) -> list[tuple[int, Profile]]:
    """All states reachable by a single population switching strategy.

    Returns exactly ``sum_k (|S^k| - 1)`` pairs ``(population, state)`` in a
    deterministic order: population ascending, then strategy ascending.
    """
    profile_index(game, state)  # bounds check
    out = []
    for k, n in enumerate(game.shape):
        for s in range(n):
            if s == state[k]:
                continue
            out.append((k, state[:k] + (s,) + state[k + 1 :]))
    return out


def _as_tensor(values) -> np.ndarray:
    arr = np.array(values, dtype=float, copy=True)
    if not np.all(np.isfinite(arr)):
        raise NonFinitePayoff("payoff tensor contains NaN or infinite entries")
    return arr


def _verify_symmetric(labels: list[list[str]], tensors: list[np.ndarray]) -> None:
    """Exhaustive permutation check of the symmetry definition."""
    k = len(tensors)
    if any(labels[0] != other for other in labels[1:]):
        raise SymmetryViolation("symmetric game requires identical strategy sets")
    for perm in itertools.permutations(range(k)):
        inv = [0] * k
        for j, p in enumerate(perm):
            inv[p] = j
        for slot in range(k):
            expected = np.transpose(tensors[perm[slot]], axes=inv)
            if not np.array_equal(tensors[slot], expected):
                raise SymmetryViolation(
                    f"permuting the profile does not permute the payoff profile "
                    f"(player {slot}, permutation {perm})"
                )


def _verify_opponent_exchangeable(tensor: np.ndarray) -> None:
    """A single symmetric tensor must not depend on the order of opponents."""
    k = tensor.ndim
    for perm in itertools.permutations(range(1, k)):
        axes = (0,) + perm
        if not np.array_equal(tensor, np.transpose(tensor, axes=axes)):
            raise SymmetryViolation(
                "symmetric payoff tensor depends on the ordering of opponents"
            )


def new_metagame(
    num_players: int,
    strategy_labels,
    payoff_tensors,
    symmetric_flag: bool,
) -> MetaGame:
    """Build and validate a meta-game.

    ``strategy_labels`` is a list of per-player label lists; for a symmetric
    game a single label list (plus a single payoff tensor) is also accepted.
    Declared symmetry is verified: identical strategy sets, and permuting a
    profile permutes the payoff profile identically.

    Raises ``ShapeMismatch``, ``NonFinitePayoff``, or ``SymmetryViolation``.
    """
    if num_players < 1:
        raise ShapeMismatch("a game needs at least one player")
    if strategy_labels and isinstance(strategy_labels[0], str):
        strategy_labels = [list(strategy_labels)]
    labels = [list(map(str, pop)) for pop in strategy_labels]
    if any(len(pop) == 0 for pop in labels):
        raise ShapeMismatch("every player needs at least one strategy")
    tensors = [_as_tensor(t) for t in payoff_tensors]

    if symmetric_flag:
        if len(labels) not in (1, num_players) or len(tensors) != len(labels):
            raise ShapeMismatch(
                "symmetric game expects one label list and one tensor, "
                "or one of each per player"
            )
        n = len(labels[0])
        for tensor in tensors:
            if tensor.shape != (n,) * num_players:
                raise ShapeMismatch(
                    f"payoff tensor shape {tensor.shape} != {(n,) * num_players}"
                )
        if len(tensors) == num_players and num_players > 1:
            _verify_symmetric(labels, tensors)
        base = tensors[0]
        if num_players > 2:
            _verify_opponent_exchangeable(base)
        if num_players == 2:
            # pairwise symmetric games evolve as a single population
            return MetaGame(num_players, (tuple(labels[0]),), (base,), True)
        return MetaGame(
            num_players,
            tuple(tuple(labels[0]) for _ in range(num_players)),
            tuple(base for _ in range(num_players)),
            True,
        )

    if len(labels) != num_players or len(tensors) != num_players:
        raise ShapeMismatch(
            f"expected {num_players} label lists and payoff tensors, "
            f"got {len(labels)} and {len(tensors)}"
        )
    shape = tuple(len(pop) for pop in labels)
    for k, tensor in enumerate(tensors):
        if tensor.shape != shape:
            raise ShapeMismatch(
                f"payoff tensor {k} has shape {tensor.shape}, expected {shape}"
            )
    return MetaGame(num_players, tuple(tuple(pop) for pop in labels), tuple(tensors), False)


def from_winrate_matrix(labels, matrix) -> MetaGame:
    """Symmetric single-population 2-player game from a win-rate matrix.

    ``matrix[i][j]`` is the empirical win rate of agent ``i`` against agent
    ``j`` and must lie in [0, 1].  Raw values are preserved: no rescaling is
    applied, since finite-intensity rankings are not affine-invariant.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotSquare(f"win-rate matrix must be square, got shape {arr.shape}")
    if len(labels) != arr.shape[0]:
        raise ShapeMismatch(
            f"{len(labels)} labels for a {arr.shape[0]}x{arr.shape[1]} matrix"
        )
    if not np.all(np.isfinite(arr)):
        raise NonFinitePayoff("win-rate matrix contains NaN or infinite entries")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        bad = arr[(arr < 0.0) | (arr > 1.0)].flat[0]
        raise OutOfRangeEntry(f"win rate {bad} outside [0, 1]")
    return new_metagame(2, [list(labels)], [arr], symmetric_flag=True)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def game_to_dict(game: MetaGame) -> dict:
    """JSON-ready dict: players, symmetric, strategies, payoffs."""
    if game.symmetric:
        strategies = [list(game.strategy_labels[0])]
        payoffs = [game.payoffs[0].tolist()]
    else:
        strategies = [list(pop) for pop in game.strategy_labels]
        payoffs = [tensor.tolist() for tensor in game.payoffs]
    return {
        "players": game.num_players,
        "symmetric": game.symmetric,
        "strategies": strategies,
        "payoffs": payoffs,
    }


def game_from_dict(data: dict) -> MetaGame:
    try:
        players = int(data["players"])
        symmetric = bool(data["symmetric"])
        strategies = data["strategies"]
        payoffs = data["payoffs"]
    except (KeyError, TypeError) as exc:
        raise ShapeMismatch(f"malformed game document: {exc}") from exc
    return new_metagame(players, strategies, payoffs, symmetric_flag=symmetric)


def canonical_json(game: MetaGame) -> str:
    """Canonical serialization: sorted keys, compact separators, newline end.

    Loading and re-serializing a canonical document is byte-identical.
    """
    return json.dumps(game_to_dict(game), sort_keys=True, separators=(",", ":")) + "\n"


def load_game(path: str) -> MetaGame:
    with open(path, encoding="utf-8") as handle:
        return game_from_dict(json.load(handle))


def save_game(game: MetaGame, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(canonical_json(game))


def load_winrate_csv(path: str) -> MetaGame:
    """Win-rate CSV: first row agent labels, then an NxN block of decimals."""
    with open(path, encoding="utf-8", newline="") as handle:
        return parse_winrate_csv(handle.read())


def parse_winrate_csv(text: str) -> MetaGame:
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    if not rows:
        raise ShapeMismatch("empty win-rate file")
    labels = [cell.strip() for cell in rows[0]]
    try:
        matrix = [[float(cell) for cell in row] for row in rows[1:]]
    except ValueError as exc:
        raise ShapeMismatch(f"non-numeric win-rate entry: {exc}") from exc
    if len(matrix) != len(labels) or any(len(row) != len(labels) for row in matrix):
        raise NotSquare(
            f"expected a {len(labels)}x{len(labels)} block under the label row"
        )
    return from_winrate_matrix(labels, matrix)


def winrate_csv(game: MetaGame) -> str:
    """Inverse of :func:`parse_winrate_csv` for symmetric 2-player games."""
    if not (game.symmetric and game.num_players == 2):
        raise ShapeMismatch("win-rate export requires a symmetric 2-player game")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(game.strategy_labels[0])
    for row in game.payoffs[0]:
        writer.writerow([repr(float(v)) for v in row])
    return out.getvalue()


def affine_transform(game: MetaGame, scale: float, offset: float) -> MetaGame:
    """New game with payoffs ``scale * M^k + offset`` (scale must be > 0)."""
    if not scale > 0 or not math.isfinite(scale) or not math.isfinite(offset):
        raise ShapeMismatch("affine transform needs a finite positive scale")
    if game.symmetric:
        base = scale * game.payoffs[0] + offset
        payoffs = (base,) * len(game.payoffs)
    else:
        payoffs = tuple(scale * t + offset for t in game.payoffs)
    return MetaGame(game.num_players, game.strategy_labels, payoffs, game.symmetric)
