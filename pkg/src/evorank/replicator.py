"""Continuous-time replicator dynamics and the simplex-edge reduction.

For each population the share of a strategy grows in proportion to its
fitness advantage over the population average:
``dx^k_i/dt = x^k_i (f^k_i(x) - fbar^k(x))``, where the fitness is the
expected payoff against the other populations' current mixtures.  Symmetric
2-player games use the single-population form ``dx_i/dt = x_i ((Mx)_i -
x.Mx)``.

On an edge of the simplex (two strategies present), the large-population
mean dynamics of the finite-population imitation process reduce to
``dx/dt = x (1 - x) tanh(alpha * (f_tau - f_sigma) / 2)``, the logistic-
selection counterpart of the replicator flow; :func:`edge_mean_dynamics`
evaluates it and the test-suite cross-checks it against the difference of
the two copy probabilities.

Integration uses fixed-step classical Runge-Kutta so trajectories are
byte-for-byte reproducible; states are clipped and renormalized each step
with the applied correction recorded.
"""

from __future__ import annotations

import csv as _csv
import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, StepUnstable
from .metagame import MetaGame

#: a pre-renormalization coordinate outside this range aborts integration
_STABLE_LOW = -0.01
_STABLE_HIGH = 1.01

PopulationState = tuple[np.ndarray, ...]


@dataclass(frozen=True)
class Trajectory:
    """Integrated states at uniform time steps.

    ``states[t]`` is a tuple of per-population probability vectors at
    ``times[t]``; ``renorm_drift[t]`` is the total variation of the clip-
    and-rescale correction applied at that step (0 for the initial state).
    """

    times: np.ndarray
    states: tuple[PopulationState, ...]
    step_size: float
    renorm_drift: np.ndarray

    @property
    def final_state(self) -> PopulationState:
        return self.states[-1]

    @property
    def max_drift(self) -> float:
        return float(self.renorm_drift.max())


def _as_state(game: MetaGame, state) -> PopulationState:
    if isinstance(state, np.ndarray) and state.ndim == 1 and game.num_populations == 1:
        state = (state,)
    elif isinstance(state, (list, tuple)) and state and np.isscalar(state[0]):
        if game.num_populations != 1:
            raise ShapeMismatch("flat state given for a multi-population game")
        state = (np.asarray(state, dtype=float),)
    vectors = tuple(np.asarray(x, dtype=float) for x in state)
    if len(vectors) != game.num_populations:
        raise ShapeMismatch(
            f"{len(vectors)} population vectors for {game.num_populations} populations"
        )
    for k, x in enumerate(vectors):
        if x.shape != (game.shape[k],):
            raise ShapeMismatch(
                f"population {k} vector has shape {x.shape}, expected ({game.shape[k]},)"
            )
        if np.any(x < -1e-12) or abs(float(x.sum()) - 1.0) > 1e-9:
            raise ShapeMismatch(
                f"population {k} state is not a probability vector: {x}"
            )
    return vectors


def _population_fitness(game: MetaGame, state: PopulationState, k: int) -> np.ndarray:
    """Expected payoff of each pure strategy in population k against state."""
    if game.single_population:
        matrix = game.payoffs[0]
        if game.num_players == 1:
            return matrix.copy()
        return matrix @ state[0]
    letters = "abcdefghijklmnopqrstuvwxyz"
    if game.num_populations > len(letters):
        raise ShapeMismatch("too many populations for the contraction")
    subscripts = letters[: game.num_populations]
    operands = [subscripts]
    arrays: list[np.ndarray] = []
    if game.symmetric:
        # stored tensor is slot-k-first; contract it against the others
        tensor = np.moveaxis(game.payoffs[0], 0, k)
    else:
        tensor = game.payoffs[k]
    arrays.append(tensor)
    for c in range(game.num_populations):
        if c == k:
            continue
        operands.append(subscripts[c])
        arrays.append(state[c])
    expr = ",".join(operands) + "->" + subscripts[k]
    return np.einsum(expr, *arrays)


def replicator_derivative(game: MetaGame, state) -> PopulationState:
    """Per-population velocity vectors; each sums to zero (simplex tangency)."""
    vectors = _as_state(game, state)
    out = []
    for k, x in enumerate(vectors):
        f = _population_fitness(game, vectors, k)
        avg = float(x @ f)
        out.append(x * (f - avg))
    return tuple(out)


def edge_mean_dynamics(f_tau: float, f_sigma: float, alpha: float, x_tau: float) -> float:
    """Mean share velocity of a two-strategy population under Fermi imitation.

    ``x (1 - x) tanh(alpha (f_tau - f_sigma) / 2)``; zero at the boundary
    and whenever the two fitnesses tie.
    """
    if not 0.0 <= x_tau <= 1.0:
        raise ShapeMismatch(f"share {x_tau} outside [0, 1]")
    return x_tau * (1.0 - x_tau) * math.tanh(0.5 * alpha * (f_tau - f_sigma))


def integrate(game: MetaGame, x0, step: float, num_steps: int) -> Trajectory:
    """Fixed-step RK4 trajectory from ``x0``.

    After each step every population vector is clipped at zero and rescaled
    to sum one; the total correction is recorded per step.  Raises
    ``StepUnstable`` if any raw coordinate leaves [-0.01, 1.01], which
    signals a step size too large for the game's payoff scale.
    """
    if not step > 0:
        raise ShapeMismatch(f"step must be positive, got {step}")
    if num_steps < 1:
        raise ShapeMismatch(f"num_steps must be >= 1, got {num_steps}")
    current = _as_state(game, x0)
    states = [current]
    drifts = [0.0]

    def derivative(vectors: PopulationState) -> PopulationState:
        out = []
        for k, x in enumerate(vectors):
            f = _population_fitness(game, vectors, k)
            avg = float(x @ f)
            out.append(x * (f - avg))
        return tuple(out)

    def axpy(vectors: PopulationState, scale: float, deltas: PopulationState):
        return tuple(x + scale * d for x, d in zip(vectors, deltas))

    for _ in range(num_steps):
        k1 = derivative(current)
        k2 = derivative(axpy(current, 0.5 * step, k1))
        k3 = derivative(axpy(current, 0.5 * step, k2))
        k4 = derivative(axpy(current, step, k3))
        raw = tuple(
            x + (step / 6.0) * (a + 2.0 * b + 2.0 * c + d)
            for x, a, b, c, d in zip(current, k1, k2, k3, k4)
        )
        drift = 0.0
        renormed = []
        for x in raw:
            low = float(x.min())
            high = float(x.max())
            if low < _STABLE_LOW or high > _STABLE_HIGH:
                raise StepUnstable(
                    f"coordinate left [{_STABLE_LOW}, {_STABLE_HIGH}] "
                    f"(min {low}, max {high}); reduce the step size"
                )
            clipped = np.maximum(x, 0.0)
            rescaled = clipped / clipped.sum()
            drift += float(np.abs(rescaled - x).sum())
            renormed.append(rescaled)
        current = tuple(renormed)
        states.append(current)
        drifts.append(drift)

    times = step * np.arange(num_steps + 1)
    return Trajectory(times, tuple(states), float(step), np.asarray(drifts))


def trajectory_to_csv(game: MetaGame, trajectory: Trajectory) -> str:
    """One row per step: time, then every population block's coordinates."""
    out = io.StringIO()
    writer = _csv.writer(out, lineterminator="\n")
    header = ["t"]
    for k, labels in enumerate(game.strategy_labels):
        prefix = "" if game.num_populations == 1 else f"pop{k}:"
        header.extend(prefix + name for name in labels)
    writer.writerow(header)
    for t, state in zip(trajectory.times, trajectory.states):
        row = [repr(float(t))]
        row.extend(repr(float(v)) for v in itertools.chain.from_iterable(state))
        writer.writerow(row)
    return out.getvalue()
