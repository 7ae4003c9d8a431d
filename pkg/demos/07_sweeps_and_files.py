"""
Parameter sweeps and output files
=================================

How the subharmonic weight depends on kappa and on the pulse error, and
what a run leaves on disk.
"""

import math
import tempfile
from pathlib import Path

from dtcchain import get_preset, run
from dtcchain.runner import SweepConfig, sweep, sweep_csv

cfg = SweepConfig(get_preset("fig2-boson"),
                  (("kappa", (0.1, 0.5, 2.0, 10.0, math.inf)), ("epsilon", (0.0, 0.1 * math.pi))),
                  ("subharmonic_weight", "split_detected"))
print(sweep_csv(cfg, sweep(cfg)))

with tempfile.TemporaryDirectory() as tmp:
    res = run(get_preset("fig2-boson"), tmp)
    for key, path in sorted(res.paths.items()):
        head = Path(path).read_text().splitlines()[:2]
        print(f"{key:10s} {Path(path).name}: {head}")
