"""Command-line front end: one scenario per invocation, CSVs plus a summary.

Values come from three layers, strongest first: command-line flags, then the
--config file (flat `key = value` lines, `#` comments), then the scenario
defaults. A run writes `<scenario>_r<i>.csv` per replicate and one
`summary.jsonl` into --out, and prints one verdict line per run.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .experiments import SCENARIOS, make_spec, run_matrix
from .swarm import POLICIES, SimConfig

# key -> parser for values coming from a config file
_CONFIG_PARSERS = {
    "policy": str,
    "lambda": float,
    "k": int,
    "K": int,
    "slots": int,
    "threshold": int,
    "seed": int,
    "replicates": int,
    "tau": int,
    "out": str,
    "scenario": str,
}


def parse_config_file(path: Path) -> dict:
    """Flat `key = value` lines; `#` starts a comment anywhere."""
    values = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not sep or not key or not val:
            raise ValueError(f"{path}:{lineno}: expected `key = value`, got {raw!r}")
        if key not in _CONFIG_PARSERS:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](val)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: bad value for {key}: {val!r}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fountainswarm",
        description="Run seeded swarm simulations and write CSV time series.",
    )
    p.add_argument("--config", type=Path, help="flat key = value file; flags win")
    p.add_argument("--scenario", choices=sorted(SCENARIOS),
                   help="builtin scenario tag; flags below override its fields")
    p.add_argument("--policy", choices=sorted(POLICIES))
    p.add_argument("--lambda", dest="lam", type=float, metavar="RATE",
                   help="mean arrivals per slot, >= 1")
    p.add_argument("--k", type=int, help="chunks needed to decode")
    p.add_argument("--K", type=int, help="coded pool size; 0 draws fresh")
    p.add_argument("--slots", type=int, help="horizon in slots")
    p.add_argument("--threshold", type=int, help="population declaring divergence")
    p.add_argument("--seed", type=int, help="master seed (replicates derive from it)")
    p.add_argument("--replicates", type=int, help="independent runs (default 1)")
    p.add_argument("--tau", type=int,
                   help="arrival-rate window in slots; enables the adaptive controller")
    p.add_argument("--out", type=Path, help="output directory (default ./runs)")
    return p


def _merged_options(argv: Optional[Sequence[str]]) -> dict:
    parser = build_parser()
    args = vars(parser.parse_args(argv))
    config_path = args.pop("config")
    merged = parse_config_file(config_path) if config_path else {}
    if "lambda" in merged:
        merged["lam"] = merged.pop("lambda")
    for key, val in args.items():
        if val is not None:
            merged[key] = val
    return merged


def build_config(options: dict) -> tuple[str, SimConfig]:
    """Resolve (scenario tag, SimConfig) from merged options."""
    scenario = options.get("scenario")
    cfg = SCENARIOS[scenario] if scenario else SimConfig()
    fields = {}
    if "policy" in options:
        fields["policy"] = POLICIES[options["policy"]]
    for key, attr in (("lam", "lam"), ("k", "k"), ("K", "K"),
                      ("slots", "max_slots"), ("threshold", "pop_threshold"),
                      ("tau", "tau")):
        if key in options:
            fields[attr] = options[key]
    cfg = replace(cfg, **fields) if fields else cfg
    cfg.validate()
    return scenario or "custom", cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        options = _merged_options(argv)
    except SystemExit as e:  # argparse already printed the reason
        return int(e.code or 0)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        tag, cfg = build_config(options)
        spec = make_spec(
            tag,
            out_dir=Path(options.get("out", "runs")),
            master_seed=options.get("seed", 0),
            replicates=options.get("replicates", 1),
            cfg=cfg,
        )
        rows = run_matrix([spec])
    except (OSError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    for i, row in enumerate(rows):
        where = f" at slot {row['divergence_slot']}" if row["divergence_slot"] else ""
        print(f"{row['scenario']} r{i} seed={row['seed']}: "
              f"{row['verdict']}{where}, final population {row['final_population']}")
    print(f"wrote {len(rows)} run(s) to {spec.out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
