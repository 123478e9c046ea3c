import itertools
import math

import numpy as np
import pytest

from subteam import (BudgetExceeded, ReplacementProblem, brute_force, fast_kernel_best,
                     iterative_replace, local_best, reform, score_g)
from subteam import baselines
from subteam.baselines import team_value
from subteam.fast import best_candidate, prune_candidates

from conftest import make_instance


def test_brute_single_subset_when_pool_equals_s():
    net, prob, W, params = make_instance(1, s=2)
    pool = prob.candidates[4:6]
    p = ReplacementProblem(prob.team, prob.subteam, net.n, pool=pool)
    res = brute_force(net, p, W, params)
    assert res.members == tuple(pool) and res.evaluations == 1


@pytest.mark.parametrize("seed", range(4))
def test_brute_is_exhaustive_argmax(seed):
    net, prob, W, params = make_instance(seed, n=14, t=5, s=2)
    res = brute_force(net, prob, W, params)
    assert res.evaluations == math.comb(len(prob.candidates), prob.s)
    vals = {c: score_g(c, prob, net, W, params) for c in itertools.combinations(prob.candidates, 2)}
    best = max(vals.values())
    assert res.final_score == pytest.approx(best, rel=1e-10)
    assert vals[res.members] >= best - 1e-12 * best


def test_brute_paths_agree(monkeypatch):
    net, prob, W, params = make_instance(5, n=16, t=5, s=2)
    batched = brute_force(net, prob, W, params, chunk=7)
    monkeypatch.setattr(baselines, "_MAX_PRODUCT_DIM", 0)
    direct = brute_force(net, prob, W, params)
    assert batched.members == direct.members
    assert batched.final_score == pytest.approx(direct.final_score, rel=1e-12)


def test_brute_lexicographic_tie_break():
    from subteam import SkillRelevance, SocialNetwork, KernelParams
    # three identical leaves hanging off the remaining member
    A = np.zeros((6, 6))
    for v in (1, 3, 4, 5):
        A[0, v] = A[v, 0] = 1.0
    net = SocialNetwork(A, np.ones((6, 1)))
    prob = ReplacementProblem((0, 1, 2), (1, 2), 6)
    res = brute_force(net, prob, SkillRelevance.ones_upper(1), KernelParams(0.05))
    assert res.members == (3, 4)


def test_brute_budget_guard():
    net, prob, W, params = make_instance(2, n=30, t=6, s=3)
    with pytest.raises(BudgetExceeded) as err:
        brute_force(net, prob, W, params, budget=10)
    assert err.value.required == math.comb(24, 3)


def test_brute_s1_agrees_with_fast_best():
    net, prob, W, params = make_instance(8, s=1)
    res = brute_force(net, prob, W, params)
    node, score = fast_kernel_best(net, prob.team, prob.remaining, W, params, pool=prob.candidates)
    assert res.members == (node,)
    assert score == pytest.approx(team_value(net, prob, W, params, res.members), rel=1e-9)
    assert res.final_score == pytest.approx(score_g((node,), prob, net, W, params), rel=1e-9)


@pytest.mark.parametrize("seed", range(10))
def test_brute_dominates_everyone(seed):
    net, prob, W, params = make_instance(200 + seed, n=20, t=6, s=2 + seed % 2)
    opt = brute_force(net, prob, W, params).final_score
    for res in (reform(net, prob, W, params), iterative_replace(net, prob, W, params, rng_seed=seed),
                local_best(net, prob, W, params)):
        assert opt >= res.final_score - 1e-12 * abs(opt)
        members = res.members
        assert len(set(members)) == prob.s and not set(members) & set(prob.team)


def test_iterative_single_member_ignores_seed():
    net, prob, W, params = make_instance(9, s=1)
    node, _ = fast_kernel_best(net, prob.team, prob.remaining, W, params)
    for seed in range(4):
        assert iterative_replace(net, prob, W, params, rng_seed=seed).members == (node,)


def test_iterative_deterministic_per_seed():
    net, prob, W, params = make_instance(10, n=30, t=7, s=3)
    a = iterative_replace(net, prob, W, params, rng_seed=4)
    b = iterative_replace(net, prob, W, params, rng_seed=4)
    assert a.members == b.members and a.final_score == b.final_score


def test_iterative_keeps_unreplaced_members_in_working_team():
    net, prob, W, params = make_instance(12, n=30, t=6, s=2)
    rng = np.random.default_rng(0)
    first = prob.subteam[int(rng.integers(2))]
    rest = tuple(v for v in prob.team if v != first)
    expected = best_candidate(net, prob.team, rest, W, params).node
    assert iterative_replace(net, prob, W, params, rng_seed=0).members[0] == expected


def test_reform_beats_iterative_on_majority():
    wins = 0
    trials = 30
    for seed in range(trials):
        net, prob, W, params = make_instance(300 + seed, n=30, t=6, s=3)
        r = reform(net, prob, W, params).final_score
        it = iterative_replace(net, prob, W, params, rng_seed=seed).final_score
        wins += r >= it - 1e-9 * abs(r)
    assert wins > trials / 2


def test_local_best_single_member():
    net, prob, W, params = make_instance(13, s=1)
    node, _ = fast_kernel_best(net, prob.team, prob.remaining, W, params)
    assert local_best(net, prob, W, params).members == (node,)


def test_local_best_rounds_are_exhaustive_best():
    net, prob, W, params = make_instance(14, n=16, t=5, s=2)
    res = local_best(net, prob, W, params)
    current = list(prob.team)
    pending = sorted(prob.subteam)
    expected_evals = 0
    for pick in res.members:
        best, best_pair = -np.inf, None
        for p in pending:
            rest = tuple(v for v in current if v != p)
            kept, _ = prune_candidates(net, rest, [v for v in prob.candidates if v not in rest])
            expected_evals += len(kept)
            for q in kept:
                val = team_value_for(net, prob, W, params, rest + (int(q),))
                if val > best:
                    best, best_pair = val, (p, int(q))
        assert best_pair[1] == pick
        current[current.index(best_pair[0])] = pick
        pending.remove(best_pair[0])
    assert res.evaluations == expected_evals


def team_value_for(net, prob, W, params, members):
    from subteam import approx_kernel, extract_subgraph
    return approx_kernel(extract_subgraph(net, prob.team), extract_subgraph(net, members), W, params)
