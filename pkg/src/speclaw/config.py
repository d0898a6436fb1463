"""Sweep configuration: a versioned JSON document, validated up front.

Validation enumerates every (n, model-parameter) cell and rejects the whole
sweep before any sampling if a single cell is invalid, so a sweep never
leaves partial outputs behind.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .matrices import DENSE_CAP
from .models import (
    ChungLuSpec,
    Schedule,
    ValidationError,
    eval_schedule,
    profile_label,
    weights_from_profile,
)

CONFIG_SCHEMA = "speclaw-sweep-v1"
SCALE_KINDS = ("theorem-er", "theorem-cl", "none")
OUTPUT_FORMATS = ("csv", "json", "svg")


@dataclass(frozen=True)
class Cell:
    """One sweep cell: a vertex count plus fully resolved model parameters."""

    index: int
    n: int
    label: str
    p: float = math.nan                 # ER cells
    weights: np.ndarray | None = None   # Chung-Lu cells
    u_n: float = math.nan
    w_min: float = math.nan

    @property
    def is_er(self) -> bool:
        return self.weights is None


@dataclass(frozen=True)
class SweepConfig:
    master_seed: int
    model_kind: str                      # "er" | "chung-lu"
    n_list: tuple[int, ...]
    replicates: int
    spectra: bool
    scale: str
    out_dir: str
    formats: tuple[str, ...]
    schedule: Schedule | None = None     # ER
    profiles: tuple[dict, ...] = ()      # Chung-Lu
    raw: dict = field(default_factory=dict, repr=False)


def load_config(path) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    return parse_config(doc)


def parse_config(doc: dict) -> SweepConfig:
    if doc.get("schema") != CONFIG_SCHEMA:
        raise ValidationError(
            f"config schema must be {CONFIG_SCHEMA!r}, got {doc.get('schema')!r}"
        )
    try:
        master_seed = int(doc["master_seed"])
        model = doc["model"]
        kind = model["kind"]
        n_list = tuple(int(n) for n in model["n_list"])
        replicates = int(doc["replicates"])
        compare = doc.get("compare", {})
        outputs = doc["outputs"]
        out_dir = str(outputs["directory"])
        formats = tuple(outputs.get("formats", ["csv"]))
    except KeyError as exc:
        raise ValidationError(f"config is missing required key {exc}") from None

    if replicates < 1:
        raise ValidationError(f"replicates must be >= 1, got {replicates}")
    if any(b <= a for a, b in zip(n_list, n_list[1:])) or not n_list:
        raise ValidationError(f"n_list must be non-empty and strictly increasing, got {list(n_list)}")
    spectra = bool(compare.get("spectra", False))
    scale = compare.get("scale", "none")
    if scale not in SCALE_KINDS:
        raise ValidationError(f"scale must be one of {SCALE_KINDS}, got {scale!r}")
    for fmt in formats:
        if fmt not in OUTPUT_FORMATS:
            raise ValidationError(f"unknown output format {fmt!r}")

    schedule = None
    profiles: tuple[dict, ...] = ()
    if kind == "er":
        sch = model.get("schedule")
        if sch is None:
            raise ValidationError("er model requires a schedule")
        schedule = Schedule(kind=sch["kind"], c=float(sch["c"]),
                            alpha=float(sch["alpha"]) if "alpha" in sch else None)
        schedule.validate()
        if scale == "theorem-cl":
            raise ValidationError("theorem-cl scaling applies to chung-lu models")
    elif kind == "chung-lu":
        raw_profiles = model.get("profiles")
        if not raw_profiles:
            raise ValidationError("chung-lu model requires a non-empty profiles list")
        profiles = tuple(dict(p) for p in raw_profiles)
        if scale == "theorem-er":
            raise ValidationError("theorem-er scaling applies to er models")
    else:
        raise ValidationError(f"unknown model kind {kind!r}")

    return SweepConfig(
        master_seed=master_seed, model_kind=kind, n_list=n_list,
        replicates=replicates, spectra=spectra, scale=scale,
        out_dir=out_dir, formats=formats, schedule=schedule,
        profiles=profiles, raw=doc,
    )


def enumerate_cells(cfg: SweepConfig) -> list[Cell]:
    """Resolve and validate every cell; raises on the first invalid one."""
    cells: list[Cell] = []
    index = 0
    if cfg.model_kind == "er":
        for n in cfg.n_list:
            p = eval_schedule(cfg.schedule, n)  # raises ScheduleRangeError
            _check_spectra_cap(cfg, n)
            cells.append(Cell(index=index, n=n, label=cfg.schedule.describe(),
                              p=p, u_n=(n - 1) * p))
            index += 1
    else:
        for n in cfg.n_list:
            for prof in cfg.profiles:
                w = weights_from_profile(n, prof)
                spec = ChungLuSpec(w)
                spec.validate()
                _check_spectra_cap(cfg, n)
                cells.append(Cell(index=index, n=n, label=profile_label(prof),
                                  weights=spec.weights, u_n=spec.w_bar,
                                  w_min=spec.w_min))
                index += 1
    return cells


def _check_spectra_cap(cfg: SweepConfig, n: int) -> None:
    if cfg.spectra and n > DENSE_CAP:
        raise ValidationError(
            f"cell n={n} exceeds the dense eigensolve cap {DENSE_CAP}; "
            f"disable spectra or use a smaller n"
        )
