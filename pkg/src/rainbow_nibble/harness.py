"""Experiment orchestration: Monte Carlo trials over parameter grids,
trajectory aggregation against the schedule predictions, CSV output.

Per-trial outcomes are a pure function of (spec, trial index): the instance
seed is ``base_seed`` and trial t runs with seed ``base_seed + t`` (the
nibble RNG keys its streams on (seed, restart, iteration, purpose), so the
instance generator and trial 0 sharing an integer is harmless).
Workers partition trials by index and results are merged in index order, so
output is byte-identical regardless of worker count.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from functools import lru_cache
from itertools import product

import numpy as np

from . import generators, rmf
from .model import MatchingFamily, verify_rainbow
from .nibble import run
from .schedule import ScheduleParams

GRID_KEYS = ("n", "m", "k", "epsilon", "alpha", "c", "delta", "mode")

CELL_HEADER = ("cell", "n", "m", "k", "epsilon", "alpha", "c", "delta", "mode",
               "trials", "successes", "restarts", "mean_rel_size_dev",
               "max_rel_size_dev", "a1_breaches", "a2_breaches", "error")

TRAJECTORY_HEADER = ("i", "x", "min_size", "mean_size", "max_size",
                     "predicted_size", "rel_size_dev", "max_next_degree",
                     "predicted_degree", "f", "c_slack", "marked", "killed",
                     "zapped", "collisions", "deferred")


@dataclass(frozen=True)
class ExperimentSpec:
    source: dict            # {"generator": name, "params": {...}} or {"file": path}
    grid: dict              # subset of GRID_KEYS -> list of values
    trials: int = 1
    base_seed: int = 0
    max_restarts: int = 10

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not isinstance(self.grid, dict):
            raise ValueError("grid must be a mapping of parameter lists")
        for key in self.grid:
            if key not in GRID_KEYS:
                raise ValueError(f"unknown grid key {key!r}")

    @staticmethod
    def from_json(path_or_text) -> "ExperimentSpec":
        if os.path.exists(str(path_or_text)):
            with open(path_or_text) as f:
                data = json.load(f)
        else:
            data = json.loads(path_or_text)
        return ExperimentSpec(source=data["source"], grid=data.get("grid", {}),
                              trials=data.get("trials", 1),
                              base_seed=data.get("base_seed", 0),
                              max_restarts=data.get("max_restarts", 10))

    def to_json(self) -> str:
        return json.dumps({"source": self.source, "grid": self.grid,
                           "trials": self.trials, "base_seed": self.base_seed,
                           "max_restarts": self.max_restarts},
                          indent=2, sort_keys=True)

    def cells(self) -> list:
        keys = [k for k in GRID_KEYS if k in self.grid]
        if not keys:
            return [{}]
        return [dict(zip(keys, combo)) for combo in product(*(self.grid[k] for k in keys))]


@dataclass(frozen=True)
class CellResult:
    cell: dict
    trials: int
    successes: int
    restarts: int
    mean_rel_size_dev: float
    max_rel_size_dev: float
    a1_breaches: int
    a2_breaches: int
    mean_trajectory: tuple = ()   # rows matching TRAJECTORY_HEADER
    error: str = ""


def _instance_for(source: dict, cell: dict, base_seed: int) -> MatchingFamily:
    return _cached_instance(json.dumps(source, sort_keys=True),
                            json.dumps(cell, sort_keys=True), base_seed)


@lru_cache(maxsize=32)
def _cached_instance(source_json: str, cell_json: str, base_seed: int) -> MatchingFamily:
    source = json.loads(source_json)
    cell = json.loads(cell_json)
    if "file" in source:
        return rmf.read_rmf(source["file"])
    name = source["generator"]
    params = dict(source.get("params", {}))
    if name == "random":
        params.setdefault("n", cell.get("n"))
        params.setdefault("m", cell.get("m"))
        params.setdefault("k", cell.get("k", 2))
        params.setdefault("seed", base_seed)
        return generators.gen_random_simple(**params)
    if name == "latin":
        params.setdefault("n", cell.get("n"))
        params.setdefault("seed", base_seed)
        return generators.gen_latin(**params)
    if name == "double-star":
        return generators.gen_double_star(**params)
    if name == "two-k4":
        return generators.gen_two_k4()
    raise ValueError(f"unknown generator {name!r}")


def _params_for(family: MatchingFamily, cell: dict) -> ScheduleParams:
    n = family.equal_size()
    kwargs = dict(n=n, m=family.m, k=family.k)
    for key in ("epsilon", "alpha", "c", "delta"):
        if key in cell:
            kwargs[key] = cell[key]
    if cell.get("mode", "adaptive") == "theoretical":
        return ScheduleParams.theoretical(n=n, k=family.k, m=family.m,
                                          **{k: v for k, v in kwargs.items()
                                             if k in ("c", "delta", "alpha")})
    degs = np.zeros(family.num_vertices, dtype=np.int64)
    for _, e in family.all_edges():
        for v in e:
            degs[v] += 1
    return ScheduleParams.adaptive(max_degree=int(degs.max()) if len(degs) else 0, **kwargs)


def _run_trial(source_json: str, cell_json: str, base_seed: int, trial: int,
               max_restarts: int):
    """Worker entry; returns a plain tuple so process pools stay cheap."""
    cell = json.loads(cell_json)
    family = _cached_instance(source_json, cell_json, base_seed)
    params = _params_for(family, cell)
    outcome = run(family, params, seed=base_seed + trial, max_restarts=max_restarts)
    if outcome.status == "success":
        assert not verify_rainbow(family, outcome.rainbow, require_full=True)
    traj = tuple((r.i, r.x, r.min_size, r.mean_size, r.max_size, r.predicted_size,
                  r.max_next_degree, r.predicted_degree, r.f, r.c_slack,
                  r.marked, r.killed, r.zapped, r.collisions, r.deferred,
                  r.a1_breach, r.a2_breach) for r in outcome.trajectory)
    return (outcome.status, outcome.restarts, traj)


def run_experiment(spec: ExperimentSpec, threads: int = 1, out_dir: str = None) -> list:
    """One CellResult per grid point; deterministic and order-independent."""
    results = []
    for cell_idx, cell in enumerate(spec.cells()):
        source_json = json.dumps(spec.source, sort_keys=True)
        cell_json = json.dumps(cell, sort_keys=True)
        args = [(source_json, cell_json, spec.base_seed, t, spec.max_restarts)
                for t in range(spec.trials)]
        try:
            if threads > 1:
                with ProcessPoolExecutor(max_workers=threads) as pool:
                    trial_outs = list(pool.map(_run_trial_star, args))
            else:
                trial_outs = [_run_trial(*a) for a in args]
            results.append(_aggregate(cell, trial_outs))
        except Exception as exc:  # per-cell failure: record, keep going
            results.append(CellResult(cell=cell, trials=spec.trials, successes=0,
                                      restarts=0, mean_rel_size_dev=math.nan,
                                      max_rel_size_dev=math.nan, a1_breaches=0,
                                      a2_breaches=0, error=f"{type(exc).__name__}: {exc}"))
    if out_dir is not None:
        write_outputs(spec, results, out_dir)
    return results


def _run_trial_star(a):
    return _run_trial(*a)


def _aggregate(cell, trial_outs) -> CellResult:
    successes = sum(1 for st, _, _ in trial_outs if st == "success")
    restarts = sum(r for _, r, _ in trial_outs)
    a1 = sum(sum(1 for row in traj if row[15]) for _, _, traj in trial_outs)
    a2 = sum(sum(1 for row in traj if row[16]) for _, _, traj in trial_outs)
    # mean trajectory over trials reaching each iteration
    depth = max((len(traj) for _, _, traj in trial_outs), default=0)
    mean_rows = []
    devs = []
    for i in range(depth):
        rows = [traj[i] for _, _, traj in trial_outs if len(traj) > i]
        mean_size = sum(r[3] for r in rows) / len(rows)
        pred = rows[0][5]
        dev = abs(mean_size - pred) / pred if pred > 0 else 0.0
        devs.append(dev)
        mean_rows.append((
            i, rows[0][1],
            min(r[2] for r in rows), mean_size, max(r[4] for r in rows),
            pred, dev,
            max(r[6] for r in rows), rows[0][7],
            sum(r[8] for r in rows) / len(rows), sum(r[9] for r in rows) / len(rows),
            sum(r[10] for r in rows) / len(rows), sum(r[11] for r in rows) / len(rows),
            sum(r[12] for r in rows) / len(rows), sum(r[13] for r in rows) / len(rows),
            sum(r[14] for r in rows) / len(rows),
        ))
    return CellResult(cell=cell, trials=len(trial_outs), successes=successes,
                      restarts=restarts,
                      mean_rel_size_dev=sum(devs) / len(devs) if devs else 0.0,
                      max_rel_size_dev=max(devs) if devs else 0.0,
                      a1_breaches=a1, a2_breaches=a2,
                      mean_trajectory=tuple(mean_rows))


def _fmt(x):
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def write_outputs(spec: ExperimentSpec, results, out_dir: str) -> None:
    """cells.csv + trajectories/cell_<idx>.csv + spec.json provenance sidecar."""
    os.makedirs(out_dir, exist_ok=True)
    os.makedirs(os.path.join(out_dir, "trajectories"), exist_ok=True)
    with open(os.path.join(out_dir, "spec.json"), "w") as f:
        f.write(spec.to_json() + "\n")
    with open(os.path.join(out_dir, "cells.csv"), "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(CELL_HEADER)
        for idx, res in enumerate(results):
            cell = res.cell
            w.writerow([idx] + [_fmt(cell.get(k, "")) for k in GRID_KEYS] +
                       [res.trials, res.successes, res.restarts,
                        _fmt(res.mean_rel_size_dev), _fmt(res.max_rel_size_dev),
                        res.a1_breaches, res.a2_breaches, res.error])
    for idx, res in enumerate(results):
        path = os.path.join(out_dir, "trajectories", f"cell_{idx}.csv")
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(TRAJECTORY_HEADER)
            for row in res.mean_trajectory:
                w.writerow([_fmt(x) for x in row])


def trajectory_report(records, params: ScheduleParams) -> list:
    """Per-iteration deviations of one run from the schedule predictions.

    Rows: (i, x, mean_size, predicted_size, rel_size_dev, max_next_degree,
    predicted_degree, degree_excess, a1_breach, a2_breach); the breach flags
    are only meaningful when the run carried theoretical envelopes.
    """
    rows = []
    for r in records:
        pred = r.predicted_size
        dev = abs(r.mean_size - pred) / pred if pred > 0 else 0.0
        rows.append((r.i, r.x, r.mean_size, pred, dev, r.max_next_degree,
                     r.predicted_degree, max(0.0, r.max_next_degree - r.predicted_degree),
                     r.a1_breach, r.a2_breach))
    return rows
