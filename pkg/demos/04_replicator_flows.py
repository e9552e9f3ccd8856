"""Replicator trajectories and the edge correspondence.

The continuous-time view: strategy shares grow in proportion to their
fitness advantage.  Integrating the flow shows basins of attraction the
stationary distribution summarizes, and on any two-strategy edge of the
simplex the large-population mean dynamics of the imitation process reduce
to a tanh-shaped replicator variant, tying the micro and macro models
together.
"""

import numpy as np

import evorank as er

rps = er.new_metagame(
    2, ["R", "P", "S"], [[[0, -1, 1], [1, 0, -1], [-1, 1, 0]]], symmetric_flag=True
)

# The interior of the cycle orbits the uniform point; the product of the
# three shares is conserved, which makes a good integration-accuracy gauge.
trajectory = er.integrate(rps, np.array([0.5, 0.25, 0.25]), step=0.01, num_steps=5000)
products = [float(np.prod(state[0])) for state in trajectory.states]
print("rock-paper-scissors orbit, t in [0, 50]:")
print(f"  share product at start {products[0]:.12f}")
print(f"  share product at end   {products[-1]:.12f}")
print(f"  worst renormalization drift per step: {trajectory.max_drift:.2e}")

# A coordination game flows to whichever pure convention starts ahead.
coordination = er.new_metagame(
    2, ["A", "B"], [[[1, -1], [-1, 1]]], symmetric_flag=True
)
for start in (0.45, 0.55):
    traj = er.integrate(coordination, np.array([start, 1.0 - start]), 0.01, 3000)
    end = traj.final_state[0]
    print(f"coordination from A-share {start:.2f}: ends at A-share {end[0]:.4f}")

# Edge correspondence: the mean imitation dynamics on a two-strategy edge
# equal x(1-x) tanh(alpha * gap / 2), which is also the difference of the
# two copy probabilities.
print("\nedge dynamics vs copy-probability difference (alpha=1):")
print(f"{'share':>6}  {'gap':>5}  {'tanh form':>12}  {'fermi diff':>12}")
for x in (0.25, 0.5, 0.75):
    for gap in (-1.0, 0.5, 2.0):
        tanh_form = er.edge_mean_dynamics(gap, 0.0, 1.0, x)
        fermi = x * (1 - x) * (
            er.fermi_copy_prob(0.0, gap, 1.0) - er.fermi_copy_prob(gap, 0.0, 1.0)
        )
        print(f"{x:6.2f}  {gap:5.1f}  {tanh_form:12.6f}  {fermi:12.6f}")

# Trajectories export as CSV for plotting with any external tool.
short = er.integrate(rps, np.array([0.6, 0.3, 0.1]), step=0.1, num_steps=5)
print("\ntrajectory CSV:")
print(er.trajectory_to_csv(rps, short))
