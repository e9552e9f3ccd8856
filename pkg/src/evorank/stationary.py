"""Stationary distributions of the evolutionary Markov chain.

The default solver is damped power iteration on the sparse chain: iterating
``pi <- pi (C + I) / 2`` preserves the fixed point, converges even for
periodic chains, and costs one sparse matvec per step.  Games with several
competing near-absorbing states mix too slowly for the iteration cap, so
small chains automatically fall back to a dense linear solve.
Irreducibility is checked up front; chains built by the macro-model at
finite intensity are irreducible whenever no transition underflowed to zero.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from . import metagame
from .errors import NoConvergence, ReducibleChain, ShapeMismatch, SizeMismatch
from .evodyn import SparseMarkovChain
from .metagame import MetaGame

#: chains at or below this size use dense matvecs inside power iteration
_DENSE_CUTOFF = 64

#: largest chain the dense direct solver accepts
_DIRECT_SOLVE_LIMIT = 2000

#: a state exiting with less than this total mass counts as quasi-absorbing
_QUASI_ABSORBING_EXIT = 1e-6


@dataclass(frozen=True)
class StationaryDistribution:
    """A probability vector fixed by the chain, with its solver residual."""

    probabilities: np.ndarray
    residual: float
    method: str

    def __post_init__(self):
        self.probabilities.setflags(write=False)

    def __len__(self) -> int:
        return len(self.probabilities)


def is_irreducible(chain: SparseMarkovChain) -> bool:
    """True iff the strictly-positive transition graph is strongly connected."""
    if chain.num_states == 1:
        return True
    n_components, _ = connected_components(
        chain.to_csr(), directed=True, connection="strong"
    )
    return n_components == 1


def stationary_distribution(
    chain: SparseMarkovChain,
    tol: float = 1e-10,
    max_iters: int = 10**6,
    method: str = "auto",
) -> StationaryDistribution:
    """Solve ``pi^T C = pi^T`` with ``sum(pi) = 1``.

    ``method`` is ``"power-iteration"``, ``"direct-solve"``, or ``"auto"``
    (the default), which runs power iteration and falls back to the dense
    solve for chains up to {limit} states when mixing is too slow; the
    returned ``method`` tag records which route produced the result.

    Raises ``ReducibleChain`` if the chain has more than one closed
    communicating class and ``NoConvergence`` if the residual
    ``max|pi^T C - pi^T|`` does not reach ``tol`` within ``max_iters``
    matvecs.  The result is deterministic for fixed inputs.
    """
    if not is_irreducible(chain):
        raise ReducibleChain(
            "chain has more than one closed communicating class; if it came "
            "from the macro-model, the ranking intensity is large enough that "
            "some transitions underflowed to zero (reduce it or build the "
            "chain with a probability floor)"
        )
    if method == "power-iteration":
        return _power_iteration(chain, tol, max_iters)
    if method == "direct-solve":
        return _direct_solve(chain, tol)
    if method == "auto":
        if chain.num_states <= _DIRECT_SOLVE_LIMIT and _is_quasi_absorbing(chain):
            # competing near-absorbing states: the iteration would either
            # stall or report a start-dependent split whose residual passes
            # anyway; only the subtraction-free solve resolves the ratio
            return _direct_solve(chain, tol)
        try:
            return _power_iteration(chain, tol, max_iters)
        except NoConvergence:
            if chain.num_states > _DIRECT_SOLVE_LIMIT:
                raise
            return _direct_solve(chain, tol)
    raise ShapeMismatch(f"unknown solver method {method!r}")


def _is_quasi_absorbing(chain: SparseMarkovChain) -> bool:
    """True when two or more states barely leak any probability."""
    dead = 0
    for i, row in enumerate(chain.rows):
        exit_mass = sum(prob for col, prob in row if col != i)
        if exit_mass < _QUASI_ABSORBING_EXIT:
            dead += 1
            if dead >= 2:
                return True
    return False


stationary_distribution.__doc__ = stationary_distribution.__doc__.format(
    limit=_DIRECT_SOLVE_LIMIT
)


def _transition_operator(chain: SparseMarkovChain):
    """Returns pi -> pi @ C, dense below the cutoff and sparse above it."""
    if chain.num_states <= _DENSE_CUTOFF:
        dense_t = chain.to_dense().T.copy()
        return lambda pi: dense_t @ pi
    csr_t = chain.to_csr().T.tocsr()
    return lambda pi: csr_t @ pi


def _power_iteration(
    chain: SparseMarkovChain, tol: float, max_iters: int
) -> StationaryDistribution:
    n = chain.num_states
    step = _transition_operator(chain)
    pi = np.full(n, 1.0 / n)
    for iteration in range(max_iters):
        advanced = step(pi)
        residual = float(np.max(np.abs(advanced - pi)))
        if residual <= tol:
            candidate = np.maximum(advanced, 0.0)
            candidate /= candidate.sum()
            final_residual = float(np.max(np.abs(step(candidate) - candidate)))
            if final_residual <= tol:
                return StationaryDistribution(
                    candidate, final_residual, "power-iteration"
                )
        pi = 0.5 * (pi + advanced)
        if iteration % 1000 == 999:
            pi /= pi.sum()
    raise NoConvergence(
        f"power iteration did not reach residual {tol} in {max_iters} steps"
    )


def _direct_solve(chain: SparseMarkovChain, tol: float) -> StationaryDistribution:
    """Dense state-reduction solve (Grassmann-Taksar-Heyman).

    Censors states one at a time using only additions, multiplications, and
    divisions of nonnegative numbers, so it stays accurate even when the
    chain is nearly reducible and iterative or elimination-based solvers
    lose the tiny escape probabilities to cancellation.
    """
    n = chain.num_states
    if n > _DIRECT_SOLVE_LIMIT:
        raise ShapeMismatch(
            f"direct solve limited to {_DIRECT_SOLVE_LIMIT} states, got {n}"
        )
    if n == 1:
        return StationaryDistribution(np.ones(1), 0.0, "direct-solve")
    work = chain.to_dense()
    exit_mass = np.empty(n)
    for k in range(n - 1, 0, -1):
        mass = float(work[k, :k].sum())
        if mass <= 0.0:
            raise NoConvergence(
                f"state {k} has no representable path to lower states; "
                "the chain is numerically reducible at this precision"
            )
        exit_mass[k] = mass
        work[k, :k] /= mass
        work[:k, :k] += np.outer(work[:k, k], work[k, :k])
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = float(pi[:k] @ work[:k, k]) / exit_mass[k]
    pi /= pi.sum()
    step = _transition_operator(chain)
    residual = float(np.max(np.abs(step(pi) - pi)))
    if residual > tol:
        raise NoConvergence(
            f"direct solve residual {residual} exceeds tolerance {tol}"
        )
    return StationaryDistribution(pi, residual, "direct-solve")


def distribution_to_csv(game: MetaGame, dist: StationaryDistribution) -> str:
    """Export ``profile_label,probability`` sorted by descending probability.

    Ties break by ascending flat state index.
    """
    if len(dist) != game.num_states:
        raise SizeMismatch(
            f"distribution over {len(dist)} states for a game with "
            f"{game.num_states}"
        )
    import csv as _csv

    order = sorted(
        range(game.num_states), key=lambda i: (-dist.probabilities[i], i)
    )
    out = io.StringIO()
    writer = _csv.writer(out, lineterminator="\n")
    writer.writerow(["profile_label", "probability"])
    for i in order:
        writer.writerow(
            [
                game.state_label(metagame.index_profile(game, i)),
                repr(float(dist.probabilities[i])),
            ]
        )
    return out.getvalue()
