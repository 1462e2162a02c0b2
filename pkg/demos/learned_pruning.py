"""
Shrinking the branch-and-bound tree with a learned pruning policy.

Channel gains drift, and every new realization means re-solving the schedule
design from scratch.  The baseline solver's node traces are cheap training
data: each visited node's features get labeled with the decision the baseline
rules made, and a small classifier learns to call "prune" earlier.  The policy
is only consulted on nodes the baseline would expand, so it can cut the tree
but never grow it.

This script trains on a handful of perfect-knowledge instances and reports
per-instance node counts on held-out channels.

Run from the repository root:  python3 demos/learned_pruning.py
"""
import time

import numpy as np

from lwadm import (ArrayConfig, DMProblem, SolveLimits, TrainingCorpus,
                   collect_training_data, generate_channel, make_policy,
                   solve, speed_metric, train_policy)
from lwadm.seeding import child_seed

n_cells = 10
n_steps = 2
n_train = 6
n_holdout = 3
seed = 11

cfg = ArrayConfig(n_cells=n_cells)
limits = SolveLimits(max_nodes=300)
solve_kw = dict(multistarts=6, pgd_iters=150)


def make_instance(label):
    s = child_seed(seed, label)
    bob = generate_channel("rayleigh-iid", n_cells, child_seed(s, "channel/bob")).gains
    eve = generate_channel("rayleigh-iid", n_cells, child_seed(s, "channel/eve-0")).gains
    return DMProblem(kind="channel-perfect", config=cfg, n_steps=n_steps,
                     csi_bob=bob, csi_eve=eve)


train = [make_instance(f"instance/train-{i}") for i in range(n_train)]
hold = [make_instance(f"instance/eval-{j}") for j in range(n_holdout)]

t0 = time.time()
traces, _ = collect_training_data(train, seed=seed, limits=limits, **solve_kw)
corpus = TrainingCorpus()
corpus.add_round(traces)
net, stats = train_policy(corpus, seed=seed, epochs=30)
last = stats["rounds"][-1]
print("trained on %d instances (%d nodes) in %.1fs; "
      "holdout label accuracy %.2f (majority floor %.2f)"
      % (n_train, sum(len(t) for t in traces), time.time() - t0,
         last["holdout_accuracy"], last["holdout_floor"]))

policy = make_policy(net)
base_nodes, learned_nodes = [], []
print("\n instance  baseline  learned  objectives")
for j, prob in enumerate(hold):
    s = child_seed(seed, f"instance/eval-{j}")
    rb = solve(prob, seed=s, limits=limits, **solve_kw)
    rl = solve(prob, seed=s, limits=limits, policy=policy,
               policy_name="learned", **solve_kw)
    base_nodes.append(rb.visited_nodes)
    learned_nodes.append(rl.visited_nodes)
    print("%9d  %8d  %7d  %.4f / %.4f"
          % (j, rb.visited_nodes, rl.visited_nodes, rb.objective, rl.objective))

print("\nmean node ratio baseline/learned: %.2f"
      % speed_metric(base_nodes, learned_nodes))
