"""
A small benchmark batch
=======================

Runs a few instances per (t, s) cell with every algorithm, writes the CSV
outputs, and prints how often the greedy answer was optimal.
"""

import sys
import tempfile
from pathlib import Path

from subteam.bench import BatchConfig, aggregate, audit, run_batch, write_results

cfg = BatchConfig(source={"ba": {"n": 20, "attach": 3, "l": 4, "rate": 1.0}},
                  batch_size=5, t_range=(3, 6), s_range=(2, 3), seed=1)
rows = run_batch(cfg)

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
paths = write_results(rows, out)
print("wrote", ", ".join(str(p) for p in paths.values()))
print("audit problems:", audit(out) or "none")

print(f"{'t':>3} {'s':>3} {'algorithm':>11} {'optimal':>8} {'ms':>8}")
for rec in aggregate(rows):
    print(f"{rec['t']:>3} {rec['s']:>3} {rec['algorithm']:>11} "
          f"{rec['optimal_rate']:>8.2f} {rec['mean_elapsed_s'] * 1e3:>8.2f}")
