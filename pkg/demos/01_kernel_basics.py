"""
Attributed random-walk kernel on two tiny teams
===============================================

Builds two three-person teams by hand, compares them with the walk kernel,
and checks the block form of the product-graph matrix against a literal
Kronecker construction.
"""

import numpy as np

from subteam import SkillRelevance, SocialNetwork, KernelParams, choose_decay, extract_subgraph, kernel
from subteam.kernel import edge_attribute_slice, walk_matrix

# a path a-b-c and a triangle d-e-f, two skills each
A = np.zeros((6, 6))
for u, v, w in [(0, 1, 1.0), (1, 2, 0.5), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 0.5)]:
    A[u, v] = A[v, u] = w
L = np.array([[1.0, 0.2], [0.5, 0.5], [0.0, 1.0],
              [0.9, 0.1], [0.4, 0.6], [0.1, 0.8]])
net = SocialNetwork(A, L, node_ids=list("abcdef"))

# skill 1 with skill 1, skill 2 with skill 2, plus a weaker cross term
W = SkillRelevance(np.array([[1.0, 0.3], [0.0, 1.0]]))

path = extract_subgraph(net, [0, 1, 2])
tri = extract_subgraph(net, [3, 4, 5])

# the product matrix, built from edge-skill slices without forming kron(A1, A2)
M = walk_matrix(path, tri, W)
print("product matrix", M.shape)   # (9, 9), index u * 3 + v

# same thing the slow way
dense = np.zeros_like(M)
for i in range(2):
    for j in range(i, 2):
        # edge (a, b) carries max(L[a,i] L[b,j], L[a,j] L[b,i]) for the skill pair
        E1 = edge_attribute_slice(path.L, i, j)
        E2 = edge_attribute_slice(tri.L, i, j)
        dense += W.W[i, j] * np.kron(E1 * path.A, E2 * tri.A)
print("block form matches kron:", np.allclose(M, dense, atol=1e-15))

# the decay must keep the walk series convergent; 0.9 of the inverse row-sum bound
c = choose_decay(M)
print(f"decay c = {c:.4f}, row-sum bound of cM = {(c * M).sum(axis=1).max():.3f}")

params = KernelParams(c)
print("k(path, path)     =", kernel(path, path, W, params))
print("k(path, triangle) =", kernel(path, tri, W, params))
print("k(tri, tri)       =", kernel(tri, tri, W, params))
