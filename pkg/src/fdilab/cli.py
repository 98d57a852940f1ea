"""Command-line scenario runner.

    fdi-lab <study> --config scenario.json [--out DIR] [--threads N] [--seed K]

Writes ``<study>.csv`` and ``<study>-summary.json`` into the output directory.
Exit codes: 0 all claims hold, 2 configuration error, 3 numerical failure,
4 at least one claim violated (data is still written).
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .errors import ConfigError, NumericalFailure, PositivityViolation
from .studies import STUDIES, StudyResult, run_study, scenario_from_dict

__all__ = ["main", "run", "write_outputs"]

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VIOLATION = 0, 2, 3, 4

log = logging.getLogger("fdilab")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    try:
        return format(float(value), ".17g")
    except (TypeError, ValueError):
        return str(value)


def write_outputs(result: StudyResult, scenario_doc: dict, out_dir: Path, seconds: float) -> tuple[Path, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{result.study}.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow([_fmt(row[c]) for c in result.columns])
    summary = {
        "scenario": scenario_doc,
        "verdicts": [v.to_dict() for v in result.verdicts],
        "timing": {"seconds": round(seconds, 6), "rows": len(result.rows)},
    }
    summary.update(result.extra)
    json_path = out_dir / f"{result.study}-summary.json"
    json_path.write_text(json.dumps(summary, indent=2, sort_keys=False) + "\n")
    return csv_path, json_path


def _resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        env = os.environ.get("FDI_LAB_THREADS")
        if env:
            try:
                threads = int(env)
            except ValueError:
                raise ConfigError(f"FDI_LAB_THREADS must be an integer, got {env!r}")
        else:
            threads = 1
    if threads < 1:
        raise ConfigError("thread count must be >= 1")
    return threads


def run(study: str, config_path, out_dir=None, threads: Optional[int] = None,
        seed: Optional[int] = None) -> int:
    """Run one study from a JSON config file and return the process exit code."""
    try:
        if study not in STUDIES:
            raise ConfigError(f"unknown study {study!r}; choose from {sorted(STUDIES)}")
        try:
            doc = json.loads(Path(config_path).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if isinstance(doc, dict) and seed is not None:
            doc["seed"] = int(seed)
        scenario = scenario_from_dict(doc)
        if scenario.study is not None and scenario.study != study:
            raise ConfigError(f"config is for study {scenario.study!r}, not {study!r}")
        scenario.threads = _resolve_threads(threads)
        out = Path(out_dir or scenario.out or ".")
        started = time.perf_counter()
        result = run_study(study, scenario)
        elapsed = time.perf_counter() - started
    except (ConfigError, PositivityViolation) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL

    doc = dict(doc)
    doc.setdefault("study", study)
    csv_path, json_path = write_outputs(result, doc, out, elapsed)
    for v in result.verdicts:
        log.info("%-55s %s", v.claim, v.status)
    log.info("wrote %s and %s", csv_path, json_path)
    return EXIT_VIOLATION if result.violated else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fdi-lab", description=__doc__.splitlines()[0])
    p.add_argument("study", help="one of: " + ", ".join(sorted(STUDIES)))
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", default=None, help="output directory (default: config 'out' or .)")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $FDI_LAB_THREADS or 1)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("-q", "--quiet", action="store_true", help="only log errors")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s")
    return run(args.study, args.config, args.out, args.threads, args.seed)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
