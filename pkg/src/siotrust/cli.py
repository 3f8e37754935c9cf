"""Batch runner.

Resolves a scenario from defaults, an optional JSON config file, and
command-line flags (in that order of precedence), expands the seed list,
runs every seed, and writes one set of output files per seed plus an
aggregate metrics table and a manifest. Re-running from the manifest
reproduces the event logs byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Sequence

from .authn import write_decision_csv
from .community import write_communities_csv
from .adversary import write_attack_csv
from .metrics import write_esr_csv, write_metrics_csv
from .sim import RunResult, ScenarioConfig, run_scenario
from .social import ConfigError
from .trust import write_trust_trace_csv

MANIFEST_FORMAT = "siotrust-manifest/1"

# flag destination -> ScenarioConfig field
_FLAG_FIELDS = {
    "nodes": "node_count",
    "attacker_pct": "attacker_fraction",
    "behavior": "behavior",
    "identity": "identity_source",
    "context": "context_kind",
    "relation": "relation",
    "duration": "duration",
    "friends": "friends_path",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siotrust",
        description="Run seeded social-trust admission scenarios and write CSV results.",
    )
    parser.add_argument("--nodes", type=int, help="total device count, attackers included")
    parser.add_argument(
        "--attacker-pct",
        type=float,
        dest="attacker_pct",
        help="attacker fraction of the node count, e.g. 0.1",
    )
    parser.add_argument("--behavior", choices=["churn", "multi"], help="attacker request schedule")
    parser.add_argument(
        "--identity", choices=["stolen", "fabricated"], help="attacker identity source"
    )
    parser.add_argument(
        "--context",
        choices=["residence", "office", "school", "gym", "park"],
        help="evaluation context (sets the base rate)",
    )
    parser.add_argument(
        "--relation",
        choices=["por", "oor", "clor", "cwor", "sor"],
        help="relation filter for recommendations and weights",
    )
    parser.add_argument("--seed", type=int, help="base seed (default 1)")
    parser.add_argument("--seeds", type=int, help="number of consecutive seeds to run (default 1)")
    parser.add_argument("--duration", type=float, help="simulated seconds (default 600)")
    parser.add_argument("--friends", help="friendship edge list; omit for a synthetic small world")
    parser.add_argument("--out", help="output directory (default siotrust-out)")
    parser.add_argument(
        "--config", help="JSON file of scenario parameter overrides, applied before flags"
    )
    parser.add_argument(
        "--from-manifest",
        dest="from_manifest",
        help="re-run exactly the scenario and seed list a previous run's manifest records",
    )
    return parser


def _load_json(path: str) -> dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            loaded = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path!r} is not valid JSON: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError(f"{path!r} must hold a JSON object")
    return loaded


def resolve(args: argparse.Namespace) -> tuple[ScenarioConfig, list[int]]:
    """Turn parsed flags into a base config and the seed list."""
    if args.from_manifest:
        conflicting = [
            name
            for name in (*_FLAG_FIELDS, "seed", "seeds", "config")
            if getattr(args, name) is not None
        ]
        if conflicting:
            raise ConfigError(
                "--from-manifest replays a recorded scenario; it cannot be combined with "
                + ", ".join(sorted(f"--{n.replace('_', '-')}" for n in conflicting))
            )
        manifest = _load_json(args.from_manifest)
        if manifest.get("format") != MANIFEST_FORMAT:
            raise ConfigError(f"{args.from_manifest!r} is not a recognized run manifest")
        base = ScenarioConfig.from_mapping(manifest["config"])
        seeds = [int(s) for s in manifest["seeds"]]
        if not seeds:
            raise ConfigError("manifest lists no seeds")
        return base, seeds

    mapping: dict[str, Any] = {}
    if args.config:
        mapping.update(_load_json(args.config))
    for flag, field_name in _FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            mapping[field_name] = value
    if args.seed is not None:
        mapping["seed"] = args.seed
    base = ScenarioConfig.from_mapping(mapping)
    count = 1 if args.seeds is None else args.seeds
    if count < 1:
        raise ConfigError(f"--seeds must be positive: {count}")
    seeds = [base.seed + i for i in range(count)]
    return base, seeds


def _output_names(seed: int) -> dict[str, str]:
    return {
        "events": f"events-s{seed}.log",
        "decisions": f"decisions-s{seed}.csv",
        "trust": f"trust-s{seed}.csv",
        "esr": f"esr-s{seed}.csv",
        "communities": f"communities-s{seed}.csv",
        "attacks": f"attacks-s{seed}.csv",
    }


def _run_one(config: ScenarioConfig, out_dir: Path) -> RunResult:
    result = run_scenario(config)
    names = _output_names(config.seed)
    result.log.write(out_dir / names["events"])
    write_decision_csv(result.decisions, out_dir / names["decisions"])
    write_trust_trace_csv(result.assessments, out_dir / names["trust"])
    write_esr_csv(result.esr_splits(), out_dir / names["esr"])
    write_communities_csv(result.communities, out_dir / names["communities"])
    write_attack_csv(result.attempts, out_dir / names["attacks"])
    return result


def run_batch(base: ScenarioConfig, seeds: Sequence[int], out_dir: Path) -> list[RunResult]:
    """Run every seed (concurrently), then write the aggregate files."""
    out_dir.mkdir(parents=True, exist_ok=True)
    configs = [base.with_seed(seed) for seed in seeds]
    workers = min(len(configs), os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda cfg: _run_one(cfg, out_dir), configs))
    else:
        results = [_run_one(cfg, out_dir) for cfg in configs]

    write_metrics_csv((r.metrics_report() for r in results), out_dir / "metrics.csv")
    manifest = {
        "format": MANIFEST_FORMAT,
        "config": base.to_mapping(),
        "seeds": list(seeds),
        "outputs": {str(seed): _output_names(seed) for seed in seeds},
        "aggregate": {"metrics": "metrics.csv"},
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return results


def _fmt(value: float | None) -> str:
    return "NA" if value is None else f"{value:.2f}"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        base, seeds = resolve(args)
        out_dir = Path(args.out) if args.out else Path("siotrust-out")
        results = run_batch(base, seeds, out_dir)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    for result in results:
        report = result.metrics_report()
        print(
            f"seed {result.config.seed}: {report.scenario} {report.context} "
            f"DR={_fmt(report.dr)} ACC={_fmt(report.acc)} FN={_fmt(report.fn)} "
            f"FP={_fmt(report.fp)} decisions={len(result.decisions)}"
        )
    print(f"wrote {out_dir}/metrics.csv and manifest.json for {len(seeds)} seed(s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
