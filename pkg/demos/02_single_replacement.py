"""
One member leaves: fast candidate search
========================================

On a preferential-attachment network, one team member becomes unavailable.
The fast evaluator scores every candidate from a shared inverse of the
remaining team's block, and we check it against the direct solve.
"""

import time

import numpy as np

from subteam import (BAConfig, ReplacementProblem, SkillRelevance, approx_kernel, build_context,
                     evaluate_candidate, extract_subgraph, generate_ba, instance_decay,
                     prune_candidates, sample_team)
from subteam.fast import best_candidate

net = generate_ba(BAConfig(n=300, attach=3, l=6, seed=11))
W = SkillRelevance.ones_upper(6)
team = sample_team(net, 8, seed=5)
leaving = team[:1]
prob = ReplacementProblem(team, leaving, net.n)
params = instance_decay(net, team, W)
print("team", team, "leaving", leaving, f"decay {params.c:.4g}")

R = prob.remaining
pool = np.array(prob.candidates)

# candidates with no edge into the remaining team cannot raise the score
cand, fell_back = prune_candidates(net, R, pool)
print(f"pool {len(pool)} -> {len(cand)} connected candidates (fallback: {fell_back})")

start = time.perf_counter()
ctx = build_context(net, team, R, W, params)
fast = np.array([evaluate_candidate(ctx, net, q) for q in cand])
t_fast = time.perf_counter() - start

G_T = extract_subgraph(net, team)
start = time.perf_counter()
direct = np.array([approx_kernel(G_T, extract_subgraph(net, R + (q,)), W, params) for q in cand])
t_direct = time.perf_counter() - start

print(f"max relative difference {np.max(np.abs(fast - direct) / direct):.1e}")
print(f"fast {t_fast * 1e3:.1f} ms, direct {t_direct * 1e3:.1f} ms")

best = best_candidate(net, team, R, W, params, pool=pool)
print("best replacement:", net.node_ids[best.node], f"score {best.score:.6g}")
print("matches direct argmax:", best.node == cand[np.argmax(direct)])
