"""Subteam replacement on skill-labelled social networks.

Replace an unavailable part of a team with people from the surrounding
network, scoring candidate teams by an edge-labelled random-walk kernel
against the original team.

Modules
-------
network     data model, validation, subgraph extraction
kernel      kernel, approximate kernel, gain function, decay selection
fast        pruning and the blockwise single-member evaluator
reform      greedy replacement, curvature certificate, property checks
baselines   brute force, Iterative, LocalBest
data        Barabasi-Albert generator, record ingestion, team sampling
io          edges/skills/W file set
bench       batch experiments and CSV metrics
cli         ``subteam`` command line
"""

from .network import (ReplacementProblem, SkillRelevance, SocialNetwork, TeamSubgraph,
                      ValidationReport, extract_subgraph, validate_network, validate_problem)
from .kernel import (ConvergenceError, KernelParams, approx_kernel, choose_decay,
                     edge_attribute_slice, instance_decay, kernel, product_attribute_matrix,
                     score_g)
from .fast import (KernelContext, build_context, evaluate_candidate, fast_kernel_best,
                   prune_candidates)
from .reform import (CurvatureCertificate, GreedySolution, check_monotonicity,
                     check_supermodularity, greedy_max, reform, supermodular_curvature)
from .baselines import BaselineResult, BudgetExceeded, brute_force, iterative_replace, local_best
from .data import (BAConfig, CollabRecord, generate_ba, ingest_records, sample_subteam,
                   sample_team)

__version__ = "0.1.0"
