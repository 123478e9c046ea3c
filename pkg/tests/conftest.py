import numpy as np
import pytest

from subteam import (BAConfig, ReplacementProblem, SkillRelevance, generate_ba,
                     instance_decay, sample_subteam, sample_team)

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance_log(request):
    """Record one pass/fail line per criterion for the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}"
        print(line)
        lines.append(line)

    return record


def dense_walk_matrix(A1, L1, A2, L2, W):
    """Oracle: build E_x with explicit Kronecker products of full slices, then mask by A1 kron A2."""
    W = np.asarray(W, dtype=float)
    l = W.shape[0]
    t1, t2 = len(A1), len(A2)
    Ex = np.zeros((t1 * t2, t1 * t2))
    for i in range(l):
        for j in range(i, l):
            if W[i, j] == 0:
                continue
            E1 = np.maximum(np.outer(L1[:, i], L1[:, j]), np.outer(L1[:, j], L1[:, i]))
            E2 = np.maximum(np.outer(L2[:, i], L2[:, j]), np.outer(L2[:, j], L2[:, i]))
            Ex += W[i, j] * np.kron(E1, E2)
    return Ex * np.kron(A1, A2)


def dense_approx_kernel(net, T, members, W, c):
    """Oracle: pad explicitly with dummies and sum the explicit inverse."""
    T = list(T)
    t = len(T)
    A = net.A.toarray()
    A0, L0 = A[np.ix_(T, T)], net.L[T]
    members = list(members)
    A1 = np.zeros((t, t))
    L1 = np.zeros((t, net.l))
    k = len(members)
    A1[:k, :k] = A[np.ix_(members, members)]
    L1[:k] = net.L[members]
    M = c * dense_walk_matrix(A0, L0, A1, L1, W.W)
    return np.linalg.inv(np.eye(t * t) - M).sum() / t ** 4


def make_instance(seed, n=20, t=6, s=2, l=3, attach=3, safety=0.9):
    net = generate_ba(BAConfig(n=n, attach=attach, l=l, seed=seed))
    team = sample_team(net, t, seed=[seed, 1])
    sub = sample_subteam(team, s, seed=[seed, 2])
    prob = ReplacementProblem(team, sub, net.n)
    W = SkillRelevance.ones_upper(l)
    params = instance_decay(net, team, W, safety)
    return net, prob, W, params


@pytest.fixture
def small_instance():
    return make_instance(3)
