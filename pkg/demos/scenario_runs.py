"""
Canned scenarios, CSV logs, and summary rows
============================================

Every figure-style experiment is a named scenario: a policy, a rate, a
horizon, and seeds derived from one master seed. Runs land as one CSV per
replicate plus a summary.jsonl, and identical seeds give identical bytes.
"""

import json
import tempfile
from pathlib import Path

from fountainswarm import SCENARIOS, make_spec, run_matrix

print("builtin scenarios:")
for name, cfg in SCENARIOS.items():
    print(f"  {name:<14} policy={cfg.policy.coding}+{cfg.policy.server_target} "
          f"rate={cfg.lam} k={cfg.k} slots={cfg.max_slots}")

out = Path(tempfile.mkdtemp()) / "fig5"
spec = make_spec("fig5", out_dir=out, master_seed=1, replicates=2)
rows = run_matrix([spec])

print(f"\nsummary rows ({out}/summary.jsonl):")
for row in rows:
    print("  " + json.dumps(row, sort_keys=True))

csv_path = sorted(out.glob("*.csv"))[0]
lines = csv_path.read_text().splitlines()
print(f"\n{csv_path.name}: {len(lines)} lines; head and tail:")
for ln in lines[:6] + ["..."] + lines[-2:]:
    print("  " + ln)
