"""Deterministic parameter sweeps over a 1- or 2-axis grid, written as CSV.

Every (cell, seed slot) pair gets its own generator seed, derived as
sha256("<master>:<cellIndex>:<seedIndex>") reduced modulo 2^63, so cells
are reproducible in isolation and insensitive to execution order.  Output
is long-format CSV: one row per seed, one mean row and one sample-standard-
deviation row per cell, and optional growth rows sampling the neighborhood
measures twenty times along each run.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from random import Random
from typing import IO, Optional, Sequence, Union

import numpy as np

from .analytics import (
    blcc_summary,
    degree_histogram,
    fit_distribution_shape,
    neighborhood_report,
)
from .bigraph import Bigraph, Modality, USER
from .generator import GeneratorParams, apply_patch, run, step_iteration

MEASURES = ("degree_fit", "blcc_mean", "similar_users", "neighbor_items")

# Axis name → params field; "uv" moves both edge counts together and "T"
# follows the usual symbol for the iteration budget.
AXIS_FIELDS = {
    "alpha": ("alpha",),
    "beta": ("beta",),
    "b": ("bounce",),
    "p": ("p",),
    "u": ("u",),
    "v": ("v",),
    "uv": ("u", "v"),
    "T": ("iterations",),
}

GROWTH_SAMPLES = 20


@dataclass(frozen=True)
class SweepSpec:
    """A grid of parameter cells, each run with several derived seeds."""

    base: GeneratorParams
    axes: tuple[tuple[str, tuple], ...]
    seeds_per_cell: int = 10
    measures: tuple[str, ...] = ("blcc_mean",)
    master_seed: int = 0
    modality: Modality = USER
    sample_growth: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("need one or two axes")
        for name, values in self.axes:
            if name not in AXIS_FIELDS:
                raise ValueError(
                    f"unknown axis {name!r}; pick from {sorted(AXIS_FIELDS)}"
                )
            if not values:
                raise ValueError(f"axis {name!r} has no values")
        if len({name for name, _ in self.axes}) != len(self.axes):
            raise ValueError("axes must differ")
        if self.seeds_per_cell < 1:
            raise ValueError("seeds_per_cell must be >= 1")
        if not self.measures:
            raise ValueError("no measures selected")
        for m in self.measures:
            if m not in MEASURES:
                raise ValueError(f"unknown measure {m!r}; pick from {MEASURES}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        for cell in range(self.cell_count):
            self.cell_params(cell)  # raises on an invalid combination

    @property
    def cell_count(self) -> int:
        n = 1
        for _, values in self.axes:
            n *= len(values)
        return n

    def cell_values(self, cell_index: int) -> tuple:
        """Axis values of a cell, row-major over the axis value lists."""
        combos = list(product(*(values for _, values in self.axes)))
        return combos[cell_index]

    def cell_params(self, cell_index: int) -> GeneratorParams:
        patch: dict = {}
        for (name, _), value in zip(self.axes, self.cell_values(cell_index)):
            for fieldname in AXIS_FIELDS[name]:
                patch[fieldname] = value
        return apply_patch(self.base, patch)


def cell_seed(master_seed: int, cell_index: int, seed_index: int) -> int:
    """Stable per-run seed: sha256 of "master:cell:slot", reduced mod 2^63."""
    digest = hashlib.sha256(
        f"{master_seed}:{cell_index}:{seed_index}".encode()
    ).hexdigest()
    return int(digest, 16) % 2**63


def _measure(graph: Bigraph, spec: SweepSpec, wanted: Sequence[str]) -> dict:
    out: dict[str, float] = {}
    if "blcc_mean" in wanted:
        mean = blcc_summary(graph, spec.modality).mean
        out["blcc_mean"] = math.nan if mean is None else mean
    if "degree_fit" in wanted:
        try:
            fit = fit_distribution_shape(degree_histogram(graph, spec.modality))
            out["degree_fit"] = fit.power_law_exponent
        except ValueError:
            out["degree_fit"] = math.nan
    if "similar_users" in wanted or "neighbor_items" in wanted:
        rep = neighborhood_report(graph)
        out["similar_users"] = rep.mean_similar_users
        out["neighbor_items"] = rep.mean_neighbor_items
    return {m: out[m] for m in wanted}


_GROWTH_MEASURES = ("similar_users", "neighbor_items")


def run_cell(spec: SweepSpec, cell_index: int) -> list[dict]:
    """All rows of one cell: per-seed, growth samples, then mean and std."""
    params = spec.cell_params(cell_index)
    values = spec.cell_values(cell_index)
    axis_cols = {name: value for (name, _), value in zip(spec.axes, values)}
    rows: list[dict] = []
    per_seed: dict[str, list[float]] = {m: [] for m in spec.measures}
    growth_wanted = tuple(m for m in spec.measures if m in _GROWTH_MEASURES)

    for slot in range(spec.seeds_per_cell):
        seed = cell_seed(spec.master_seed, cell_index, slot)
        if spec.sample_growth and growth_wanted and params.iterations > 0:
            graph, growth = _run_sampled(params, seed, spec, growth_wanted)
            for t, sampled in growth:
                rows.append(
                    {
                        "cell": cell_index,
                        **axis_cols,
                        "kind": "growth",
                        "seed": seed,
                        "t": t,
                        **sampled,
                    }
                )
        else:
            graph = run(params, seed).graph
        measured = _measure(graph, spec, spec.measures)
        for m, value in measured.items():
            per_seed[m].append(value)
        rows.append(
            {
                "cell": cell_index,
                **axis_cols,
                "kind": "seed",
                "seed": seed,
                "t": params.iterations,
                **measured,
            }
        )

    for kind, reducer in (("mean", _nanmean), ("std", _nanstd)):
        rows.append(
            {
                "cell": cell_index,
                **axis_cols,
                "kind": kind,
                "seed": "",
                "t": params.iterations,
                **{m: float(reducer(per_seed[m])) for m in spec.measures},
            }
        )
    return rows


def _nanmean(values: Sequence[float]) -> float:
    kept = [v for v in values if not math.isnan(v)]
    if not kept:
        return math.nan
    return float(np.mean(kept))


def _nanstd(values: Sequence[float]) -> float:
    # sample deviation; undefined below two defined values
    kept = [v for v in values if not math.isnan(v)]
    if len(kept) < 2:
        return math.nan
    return float(np.std(kept, ddof=1))


def _run_sampled(
    params: GeneratorParams,
    seed: int,
    spec: SweepSpec,
    growth_wanted: tuple[str, ...],
) -> tuple[Bigraph, list[tuple[int, dict]]]:
    step = max(1, params.iterations // GROWTH_SAMPLES)
    rng = Random(seed)
    graph = Bigraph.from_pairs(params.m)
    growth: list[tuple[int, dict]] = []
    for t in range(1, params.iterations + 1):
        step_iteration(graph, params, rng)
        if t % step == 0 or t == params.iterations:
            growth.append((t, _measure(graph, spec, growth_wanted)))
    return graph, growth


def run_sweep(spec: SweepSpec) -> list[dict]:
    """All rows of all cells, in cell order regardless of worker count."""
    if spec.workers == 1:
        per_cell = [run_cell(spec, c) for c in range(spec.cell_count)]
    else:
        from multiprocessing import Pool

        with Pool(spec.workers) as pool:
            per_cell = pool.starmap(
                run_cell, [(spec, c) for c in range(spec.cell_count)]
            )
    return [row for rows in per_cell for row in rows]


def write_sweep_csv(
    spec: SweepSpec, rows: list[dict], sink: Union[str, Path, IO[str]]
) -> None:
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            write_sweep_csv(spec, rows, fh)
        return
    columns = (
        ["cell"]
        + [name for name, _ in spec.axes]
        + ["kind", "seed", "t"]
        + list(spec.measures)
    )
    writer = csv.DictWriter(sink, fieldnames=columns, restval="")
    writer.writeheader()
    for row in rows:
        printable = dict(row)
        for m in spec.measures:
            v = printable.get(m)
            if isinstance(v, float):
                printable[m] = "" if math.isnan(v) else repr(round(v, 8))
        writer.writerow(printable)
