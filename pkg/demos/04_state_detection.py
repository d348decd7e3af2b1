"""Separate periodic from chaotic signals across the whole registry.

Same thing as ``wopn detect`` with a handful of seeds, kept in memory.
"""

import tempfile

from wopn.experiments import ExperimentConfig, run_state_detection

with tempfile.TemporaryDirectory() as out:
    cfg = ExperimentConfig(seeds=list(range(10)), out=out)
    rows, pipe = run_state_detection(cfg)

for err in pipe.errors:
    print("failed:", err["item"], err["message"])
print(f"baseline {100 * rows[0]['baseline']:.1f}%")
for r in rows:
    tag = "normalized" if r["normalized"] else "standard"
    print(f"{r['method']:5s} {tag:10s} {100 * r['mean']:5.1f} +/- {100 * r['std']:.1f}")
