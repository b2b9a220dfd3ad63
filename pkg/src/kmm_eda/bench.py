"""Benchmark harness: repeated seeded runs and ARDP aggregation."""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional

from .eda import EdaConfig, run
from .qap import QapInstance, ardp, is_qaplib_file, load_qaplib

REPORT_HEADER = (
    "instance",
    "n",
    "reps",
    "mean_objective",
    "best_objective",
    "ardp_percent",
    "mean_seconds",
    "evals_per_run",
)


class RegistryError(ValueError):
    pass


def load_registry(path) -> Dict[str, int]:
    """Read a ``name,best_known`` CSV. A header row with those names is optional."""
    registry = {}
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip() or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise RegistryError("%s:%d: expected 2 columns, got %d" % (path, lineno, len(row)))
            name, value = row[0].strip(), row[1].strip()
            if lineno == 1 and (name, value) == ("name", "best_known"):
                continue
            try:
                best = int(value)
            except ValueError:
                raise RegistryError("%s:%d: best known value %r is not an integer" % (path, lineno, value)) from None
            if best <= 0:
                raise RegistryError("%s:%d: best known value must be positive" % (path, lineno))
            if name in registry:
                raise RegistryError("%s:%d: duplicate instance %r" % (path, lineno, name))
            registry[name] = best
    return registry


@dataclass
class BenchRow:
    instance: str
    n: int
    reps: int
    seeds: List[int]
    mean_objective: float
    best_objective: int
    ardp_percent: float
    mean_seconds: float
    evals_per_run: int


def _job(args):
    inst, cfg = args
    result = run(inst, cfg)
    return result.best_objective, result.wall_seconds, result.evaluations_used


def find_instances(instance_dir) -> List[Path]:
    paths = sorted(p for p in Path(instance_dir).iterdir() if p.is_file() and is_qaplib_file(p))
    if not paths:
        raise FileNotFoundError("no QAPLIB .dat files in %s" % instance_dir)
    return paths


def run_bench(
    instances: List[QapInstance],
    registry: Dict[str, int],
    repetitions: int,
    base_seed: int = 0,
    workers: int = 1,
    config: Optional[EdaConfig] = None,
) -> List[BenchRow]:
    """Run every instance ``repetitions`` times with seeds ``base_seed + r``.

    Rows come back sorted by instance name; the result does not depend on
    ``workers`` other than through the timing column.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    missing = [inst.name for inst in instances if inst.name not in registry]
    if missing:
        raise RegistryError("instance %s missing from best-known registry" % ", ".join(sorted(missing)))
    config = config or EdaConfig()
    instances = sorted(instances, key=lambda inst: inst.name)
    seeds = [base_seed + r for r in range(repetitions)]
    jobs = [(inst, replace(config, seed=seed)) for inst in instances for seed in seeds]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_job, jobs))
    else:
        outcomes = [_job(job) for job in jobs]

    rows = []
    for i, inst in enumerate(instances):
        chunk = outcomes[i * repetitions : (i + 1) * repetitions]
        objectives = [obj for obj, _, _ in chunk]
        rows.append(
            BenchRow(
                instance=inst.name,
                n=inst.n,
                reps=repetitions,
                seeds=seeds,
                mean_objective=sum(objectives) / repetitions,
                best_objective=min(objectives),
                ardp_percent=ardp(registry[inst.name], objectives),
                mean_seconds=sum(sec for _, sec, _ in chunk) / repetitions,
                evals_per_run=chunk[0][2],
            )
        )
    return rows


def report_csv(rows: List[BenchRow], timing: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for row in rows:
        writer.writerow(
            [
                row.instance,
                row.n,
                row.reps,
                repr(row.mean_objective),
                row.best_objective,
                repr(row.ardp_percent),
                "%.4f" % row.mean_seconds if timing else "",
                row.evals_per_run,
            ]
        )
    return buf.getvalue()


def report_json(rows: List[BenchRow], timing: bool = True) -> str:
    records = []
    for row in rows:
        record = asdict(row)
        if not timing:
            record["mean_seconds"] = None
        records.append(record)
    return json.dumps(records, indent=2, sort_keys=True) + "\n"
