"""Watch the L_RI automaton concentrate probability on the best action.

Ten actions pay fixed rewards; action 0 pays 0.9 and the others at most
0.2. Rewarded actions gain probability in proportion to their reward and
nothing is taken away on a zero reward (reward/inaction).
"""

import numpy as np

from lacircles.automaton import best_action, init_uniform, lri_update, select_action

rng = np.random.default_rng(0)
payoff = np.concatenate([[0.9], rng.uniform(0.0, 0.2, 9)])
print("rewards:", np.round(payoff, 3))

p = init_uniform(10)
for cycle in range(1, 501):
    a = select_action(p, rng.random())
    p = lri_update(p, a, payoff[a], theta=0.1)
    if cycle in (1, 10, 50, 100, 250, 500):
        print(f"cycle {cycle:>3}: p[0] = {p[0]:.3f}, max other = {p[1:].max():.3f}, sum = {p.sum():.15f}")
print("best action:", best_action(p))

# the learning rate trades speed for reliability
for theta in (0.01, 0.1, 0.5):
    wins = 0
    for seed in range(200):
        g = np.random.default_rng(seed)
        q = init_uniform(10)
        for _ in range(500):
            a = select_action(q, g.random())
            q = lri_update(q, a, payoff[a], theta)
        wins += best_action(q) == 0
    print(f"theta = {theta:<4}: best action found in {wins}/200 runs")
