"""Rank a set of agents from an empirical win-rate table.

The most common workflow: you ran a round-robin tournament between trained
agents, you have the pairwise win rates, and you want a principled
leaderboard.  Evolutionary ranking scores each agent by the share of time an
imitating population would spend playing it in the long run, which rewards
robustness against every other agent rather than average win rate alone.
"""

import numpy as np

import evorank as er

# A synthetic tournament: "veteran" beats everything slightly, "gambler"
# crushes weak agents but loses hard to "counter", and "counter" is built to
# beat "gambler" while being mediocre otherwise.
labels = ["veteran", "gambler", "counter", "rookie"]
wins = np.array(
    [
        [0.50, 0.55, 0.60, 0.70],  # veteran
        [0.45, 0.50, 0.15, 0.95],  # gambler
        [0.40, 0.85, 0.50, 0.55],  # counter
        [0.30, 0.05, 0.45, 0.50],  # rookie
    ]
)

game = er.from_winrate_matrix(labels, wins)

# Sweep the ranking intensity until the ordering stabilizes; reading the
# ranking at the convergence knee avoids both the uninformative weak-selection
# regime and numerical trouble at extreme intensities.
sweep = er.alpha_sweep(game, m=50, prob_floor=1e-300)
print(f"ranking stabilized at intensity {sweep.converged_at:g}\n")

index = sweep.alphas.index(sweep.converged_at)
ranking = er.ranking_from_distribution(
    game, sweep.distributions[index], sweep.converged_at
)
print(ranking.to_text())

# The stationary masses behind the scores, at three points of the sweep:
print("mass per agent along the sweep:")
print(f"{'intensity':>12}  " + "  ".join(f"{name:>8}" for name in labels))
for pick in (0, index, len(sweep.alphas) - 1):
    dist = sweep.distributions[pick]
    cells = "  ".join(f"{p:8.3f}" for p in dist)
    print(f"{sweep.alphas[pick]:12.4g}  {cells}")
