"""Seeded sweep execution with resumable JSON-lines output.

Each cell (input x method x rule x kappa x seed) runs independently and
appends one record.  Cell RNG seeds derive from the master seed and the
cell id, so results do not depend on execution order or worker count;
records already present in the output file are not recomputed.
"""

import hashlib
import json
import time
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from pathlib import Path

import numpy as np

from .. import __version__
from ..clique import clique_objective, members, parse_dimacs
from ..kmedoids import (
    kmedoids_objective,
    mahalanobis_diag,
    pam,
    random_medoids,
    voronoi_iteration,
)
from ..optimizer import RunConfig, adaptive_run, exp3_run
from ..policy import SoftmaxPolicy
from .config import COMPOSED_SUFFIX, GREEDY_METHODS
from .datasets import load_distance_csv, load_numeric_csv

_GRAPHS = {}
_DISTANCES = {}


def derive_seed(master_seed, cell_id):
    """Map (master seed, cell id) to an order-independent 63-bit RNG seed."""
    digest = hashlib.sha256(f"{master_seed}:{cell_id}".encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def _graph(path):
    if path not in _GRAPHS:
        _GRAPHS[path] = parse_dimacs(Path(path).read_text())
    return _GRAPHS[path]


def _distance_matrix(path, kind):
    key = (path, kind)
    if key not in _DISTANCES:
        if kind == "distances":
            _DISTANCES[key] = load_distance_csv(path)
        else:
            data, _, _ = load_numeric_csv(path)
            _DISTANCES[key] = mahalanobis_diag(data)
    return _DISTANCES[key]


def _base_record(spec, cell, rng_seed):
    record = {
        "problem": cell.problem,
        "sampler": cell.sampler,
        "update_rule": cell.rule,
        "kappa": cell.kappa,
        "seed": cell.seed,
        "rng_seed": rng_seed,
        "cell_id": cell.cell_id,
        "version": __version__,
        "config_hash": spec.config_hash(),
    }
    record["graph" if cell.problem == "clique" else "dataset"] = cell.input_id
    return record


def _run_clique_cell(spec, cell, rng_seed):
    graph = _graph(cell.input_path)
    budget = spec.budget_multiplier * graph.n
    objective = clique_objective(graph, cell.kappa)
    if cell.sampler == "exp3":
        config = RunConfig(
            budget=budget,
            rule=cell.rule,
            lr=spec.exp3_lr,
            window=spec.window,
            seed=rng_seed,
            exp3_gamma=spec.exp3_gamma,
        )
        result = exp3_run(objective, 2, graph.n, config)
    else:
        config = RunConfig(
            budget=budget,
            surrogate=cell.sampler,
            rule=cell.rule,
            lr=spec.lr,
            window=spec.window,
            seed=rng_seed,
        )
        result = adaptive_run(objective, SoftmaxPolicy(2, graph.n), config)
    return {
        "best_y": float(result.best_y),
        "best_sample_index": int(result.best_sample_index),
        "total_evaluations": int(result.total_evaluations),
        "best_x": [int(v) + 1 for v in members(result.best_x)],
    }


def _run_kmedoids_cell(spec, cell, rng_seed):
    dm = _distance_matrix(cell.input_path, spec.input_kind)
    m = dm.shape[0]
    if cell.sampler in GREEDY_METHODS:
        rng = np.random.default_rng(rng_seed)
        x0 = random_medoids(m, spec.k, rng)
        run = voronoi_iteration(x0, dm) if cell.sampler == "voronoi" else pam(x0, dm)
        return {
            "best_y": -float(run.value),
            "cost": float(run.value),
            "best_sample_index": int(run.best_index),
            "total_evaluations": int(run.evaluations),
            "inner_evaluations": int(run.evaluations),
            "best_x": [int(v) for v in run.x],
        }

    composed = cell.sampler.endswith(COMPOSED_SUFFIX)
    base = cell.sampler[: -len(COMPOSED_SUFFIX)] if composed else cell.sampler
    convergence_b = None
    if spec.convergence:
        convergence_b = spec.convergence_b or max(m * spec.k, 1000)
    config = RunConfig(
        budget=spec.budget,
        surrogate=base,
        rule=cell.rule,
        lr=spec.lr,
        window=spec.window,
        seed=rng_seed,
        convergence_b=convergence_b,
    )
    policy = SoftmaxPolicy(m, spec.k)

    if composed:
        inner = [0]

        def objective(x):
            run = voronoi_iteration(x, dm)
            inner[0] += run.evaluations
            return -run.value

        result = adaptive_run(objective, policy, config)
        refined = voronoi_iteration(result.best_x, dm)  # recover medoids; not counted
        best_x = refined.x
        cost = refined.value
        inner_evals = inner[0]
    else:

        def objective(x):
            return -kmedoids_objective(x, dm)

        result = adaptive_run(objective, policy, config)
        best_x = result.best_x
        cost = -result.best_y
        inner_evals = result.total_evaluations

    return {
        "best_y": float(result.best_y),
        "cost": float(cost),
        "best_sample_index": int(result.best_sample_index),
        "total_evaluations": int(result.total_evaluations),
        "inner_evaluations": int(inner_evals),
        "best_x": [int(v) for v in best_x],
    }


def execute_cell(spec, cell):
    """Run one cell; failures become records with a ``failed`` reason."""
    rng_seed = derive_seed(spec.master_seed, cell.cell_id)
    record = _base_record(spec, cell, rng_seed)
    start = time.perf_counter()
    try:
        if cell.problem == "clique":
            record.update(_run_clique_cell(spec, cell, rng_seed))
        else:
            record.update(_run_kmedoids_cell(spec, cell, rng_seed))
    except Exception as exc:  # noqa: BLE001 - failed cells must not kill the sweep
        record["failed"] = f"{type(exc).__name__}: {exc}"
    record["wall_ms"] = (time.perf_counter() - start) * 1000.0
    return record


def load_records(path):
    records = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def completed_cell_ids(records):
    return {r["cell_id"] for r in records if "failed" not in r}


def latest_complete(records):
    """Last non-failed record per cell id (reruns may append duplicates)."""
    latest = {}
    for record in records:
        if "failed" not in record:
            latest[record["cell_id"]] = record
    return list(latest.values())


def run_sweep(spec, jobs=1, master_seed=None, out=None, log=print):
    """Execute all missing cells of a sweep, appending JSON-lines records.

    Records are written in cell-enumeration order regardless of worker
    count.  Returns ``(completed, failed, skipped)`` counts for this
    invocation.
    """
    if master_seed is not None:
        spec.master_seed = int(master_seed)
    out_path = Path(out if out is not None else spec.out)
    cells = spec.cells()
    done = set()
    if out_path.exists():
        done = completed_cell_ids(load_records(out_path))
    todo = [cell for cell in cells if cell.cell_id not in done]
    log(
        f"sweep: {len(cells)} cells total, {len(cells) - len(todo)} already complete, "
        f"{len(todo)} to run (jobs={jobs})"
    )

    completed = failed = 0
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "a") as sink:

        def emit(record):
            nonlocal completed, failed
            sink.write(json.dumps(record, sort_keys=True) + "\n")
            sink.flush()
            if "failed" in record:
                failed += 1
            else:
                completed += 1

        if jobs <= 1:
            for cell in todo:
                emit(execute_cell(spec, cell))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = {pool.submit(execute_cell, spec, cell): i for i, cell in enumerate(todo)}
                ready = {}
                next_index = 0
                pending = set(futures)
                while pending:
                    finished, pending = wait(pending, return_when=FIRST_COMPLETED)
                    for future in finished:
                        ready[futures[future]] = future.result()
                    while next_index in ready:
                        emit(ready.pop(next_index))
                        next_index += 1
                while next_index in ready:
                    emit(ready.pop(next_index))
                    next_index += 1

    log(f"sweep: wrote {completed} records, {failed} failed, skipped {len(cells) - len(todo)}")
    return completed, failed, len(cells) - len(todo)
