"""How far the periodic Rossler diagram moves as noise is added."""

import tempfile

from wopn.experiments import ExperimentConfig, run_stability

with tempfile.TemporaryDirectory() as out:
    rows, _ = run_stability(ExperimentConfig(systems=["rossler"], out=out))

for r in rows:
    print(f"{r['method']:5s} {r['snr_db']:>5} dB  d*_B = {r['d_star_b']:.3f}")
