"""Sweep orchestration: replicate tasks, deterministic aggregation, outputs.

The unit of parallelism is the replicate.  Each task derives its RNG stream
from (master_seed, cell_index, replicate_index) and BLAS is pinned to one
thread inside workers, so the numeric output is identical for any worker
count.  Results are folded per cell in replicate order and written only
after every task has finished; a validation failure aborts before any
sampling, leaving no partial files.
"""
from __future__ import annotations

import csv
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import __version__
from .config import Cell, SweepConfig, enumerate_cells
from .matrices import MatrixKind, ScaleShift, apply_scale_shift, build
from .metrics import DistanceReport, ks_to_semicircle, w1_to_semicircle
from .models import ChungLuSpec, ErSpec, replicate_stream, sample_chung_lu, sample_er
from .spectra import eigvals_sym
from .stats import CSV_COLUMNS, CellSummary, TraceStat, aggregate, csv_row, trace_stat_chung_lu, trace_stat_er

THREADS_ENV = "SPECLAW_THREADS"


@dataclass
class SweepResult:
    cells: list[CellSummary]
    csv_path: Path | None
    manifest_path: Path
    output_paths: list[Path]


def worker_count(requested: int | None = None) -> int:
    cap = os.environ.get(THREADS_ENV)
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap is not None:
        n = min(n, max(1, int(cap)))
    return max(1, n)


def _task_args(cfg: SweepConfig, cell: Cell, rep: int) -> tuple:
    return (
        cfg.master_seed, cell.index, rep, cell.n, cell.p,
        None if cell.weights is None else np.asarray(cell.weights),
        cfg.spectra, cfg.scale, cell.u_n,
    )


def _run_replicate(args: tuple) -> tuple[int, int, TraceStat, DistanceReport | None, np.ndarray | None]:
    (master_seed, cell_index, rep, n, p, weights, spectra, scale, u_n) = args
    rng = replicate_stream(master_seed, cell_index, rep)
    if weights is None:
        spec = ErSpec(n, p)
        g = sample_er(spec, rng)
        ts = trace_stat_er(g, p)
    else:
        spec = ChungLuSpec(weights)
        g = sample_chung_lu(spec, rng)
        ts = trace_stat_chung_lu(g, spec)

    report = None
    values = None
    if spectra:
        base = build(g, MatrixKind.NORMALIZED_LAPLACIAN)
        if scale == "theorem-er":
            ss = ScaleShift.theorem_er(n, p)
        elif scale == "theorem-cl":
            ss = ScaleShift.theorem_cl(u_n)
        else:
            ss = ScaleShift(1.0, 0.0)
        s = eigvals_sym(apply_scale_shift(base, ss))
        report = DistanceReport(ks=ks_to_semicircle(s), w1=w1_to_semicircle(s))
        values = s.values
    return cell_index, rep, ts, report, values


def _worker_init() -> None:
    # one BLAS thread per worker: deterministic eigensolves independent of
    # machine core count; parallelism comes from replicates
    threadpool_limits(limits=1)


def execute(cfg: SweepConfig, cells: list[Cell], workers: int) -> dict[tuple[int, int], tuple]:
    tasks = [_task_args(cfg, cell, rep) for cell in cells for rep in range(cfg.replicates)]
    results: dict[tuple[int, int], tuple] = {}
    if workers <= 1 or len(tasks) == 1:
        with threadpool_limits(limits=1):
            for args in tasks:
                cell_index, rep, ts, report, values = _run_replicate(args)
                results[(cell_index, rep)] = (ts, report, values)
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_worker_init) as pool:
            for cell_index, rep, ts, report, values in pool.map(
                    _run_replicate, tasks, chunksize=1):
                results[(cell_index, rep)] = (ts, report, values)
    return results


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    cells = enumerate_cells(cfg)  # validates everything before any sampling
    nworkers = worker_count(workers)
    started = _utc_now()
    results = execute(cfg, cells, nworkers)

    summaries: list[CellSummary] = []
    pooled_values: dict[int, np.ndarray] = {}
    for cell in cells:
        stats = [results[(cell.index, r)][0] for r in range(cfg.replicates)]
        reports = [results[(cell.index, r)][1] for r in range(cfg.replicates)]
        reports = None if reports[0] is None else reports
        summaries.append(aggregate(
            stats, reports, n=cell.n, schedule=cell.label, p=cell.p,
            u_n=cell.u_n, seed=cfg.master_seed, w_min=cell.w_min,
        ))
        if cfg.spectra and "svg" in cfg.formats:
            pooled_values[cell.index] = np.concatenate(
                [results[(cell.index, r)][2] for r in range(cfg.replicates)]
            )
    finished = _utc_now()

    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[Path] = []
    csv_path = None
    if "csv" in cfg.formats:
        csv_path = out_dir / "summary.csv"
        write_summary_csv(summaries, csv_path)
        outputs.append(csv_path)
    if "json" in cfg.formats:
        json_path = out_dir / "summary.json"
        json_path.write_text(_summaries_json(summaries), encoding="ascii")
        outputs.append(json_path)
    if "svg" in cfg.formats and pooled_values:
        from .svgplot import histogram_svg

        for cell in cells:
            svg_path = out_dir / f"cell_{cell.index:03d}_spectrum.svg"
            title = f"n={cell.n} {cell.label} scale={cfg.scale}"
            svg_path.write_text(histogram_svg(pooled_values[cell.index], title=title),
                                encoding="utf-8")
            outputs.append(svg_path)

    manifest_path = out_dir / "manifest.json"
    _write_manifest(manifest_path, cfg, cells, outputs, started, finished)
    return SweepResult(cells=summaries, csv_path=csv_path,
                       manifest_path=manifest_path, output_paths=outputs)


def write_summary_csv(summaries: list[CellSummary], path) -> None:
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for cell in summaries:
            writer.writerow(csv_row(cell))


def read_summary_csv(path) -> list[dict]:
    with open(path, "r", encoding="ascii", newline="") as fh:
        return list(csv.DictReader(fh))


def _summaries_json(summaries: list[CellSummary]) -> str:
    rows = []
    for cell in summaries:
        fields = ", ".join(
            f'"{name}": {_json_value(value)}'
            for name, value in zip(CSV_COLUMNS, csv_row(cell))
        )
        rows.append("  {" + fields + "}")
    return "[\n" + ",\n".join(rows) + "\n]\n"


def _json_value(text: str) -> str:
    try:
        v = float(text)
    except ValueError:
        return f'"{text}"'
    if math.isnan(v):
        return '"nan"'
    return text


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(path: Path, cfg: SweepConfig, cells: list[Cell],
                    outputs: list[Path], started: str, finished: str) -> None:
    import json

    doc = {
        "schema": "speclaw-manifest-v1",
        "tool_version": __version__,
        "started_utc": started,
        "finished_utc": finished,
        "config": cfg.raw,
        "cells": [
            {
                "cell_index": c.index,
                "n": c.n,
                "label": c.label,
                "seed_entropy": [cfg.master_seed, c.index],
                "replicates": cfg.replicates,
            }
            for c in cells
        ],
        "outputs": [
            {"path": out.name, "sha256": sha256_file(out)} for out in outputs
        ],
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")
