"""Multi-run aggregation of training logs into figure-ready curves."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

from .trainer import RUN_CSV_HEADER

AGGREGATE_CSV_HEADER = "step,mean,min,max"
BLOCKS_CSV_HEADER = "run,block_start,block_end,block_min"


@dataclass(frozen=True)
class RunCurve:
    path: str
    steps: list[int]
    batch_min_energy: list[float]
    min_energy_so_far: list[float]


@dataclass(frozen=True)
class AggregatePoint:
    step: int
    mean: float
    min: float
    max: float


def parse_run_csv(lines: Sequence[str], name: str) -> RunCurve:
    """Parse training-log rows, insisting on the exact column header."""
    if not lines or lines[0].rstrip("\r\n") != RUN_CSV_HEADER:
        found = lines[0].rstrip("\r\n") if lines else "<empty>"
        raise ValueError(f"{name}: header {found!r} does not match {RUN_CSV_HEADER!r}")
    steps: list[int] = []
    batch_min: list[float] = []
    min_so_far: list[float] = []
    for row in csv.reader(lines[1:]):
        if not row:
            continue
        steps.append(int(row[0]))
        batch_min.append(float(row[2]))
        min_so_far.append(float(row[3]))
    if not steps:
        raise ValueError(f"{name}: no data rows")
    return RunCurve(name, steps, batch_min, min_so_far)


def read_run_csv(path: str) -> RunCurve:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_run_csv(fh.readlines(), path)


def aggregate_curves(curves: Sequence[RunCurve]) -> list[AggregatePoint]:
    """Per-step mean/min/max of min_energy_so_far across runs."""
    if not curves:
        raise ValueError("need at least one run")
    steps = curves[0].steps
    for curve in curves[1:]:
        if curve.steps != steps:
            raise ValueError(
                f"{curve.path}: step column differs from {curves[0].path}"
            )
    points = []
    for i, step in enumerate(steps):
        values = [c.min_energy_so_far[i] for c in curves]
        points.append(
            AggregatePoint(
                step=step,
                mean=sum(values) / len(values),
                min=min(values),
                max=max(values),
            )
        )
    return points


def block_minima(curve: RunCurve, block: int) -> list[tuple[int, int, float]]:
    """Per-block minima of batch_min_energy: (block_start, block_end, min)."""
    if block < 1:
        raise ValueError("block size must be >= 1")
    out = []
    for lo in range(0, len(curve.steps), block):
        hi = min(lo + block, len(curve.steps))
        out.append(
            (curve.steps[lo], curve.steps[hi - 1], min(curve.batch_min_energy[lo:hi]))
        )
    return out


def write_aggregate_csv(points: Sequence[AggregatePoint], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(AGGREGATE_CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for p in points:
            writer.writerow([p.step, repr(p.mean), repr(p.min), repr(p.max)])


def write_blocks_csv(
    curves: Sequence[RunCurve], block: int, path: str
) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(BLOCKS_CSV_HEADER + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        for curve in curves:
            for lo, hi, value in block_minima(curve, block):
                writer.writerow([curve.path, lo, hi, repr(value)])
