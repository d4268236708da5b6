"""Result analysis: verification predicates over stored solutions, the four
clique metric tables, and the ranked k-medoids comparison.

Significance asterisks mark methods that the reference sampler beats in a
one-sided sign test, with step-up FDR control within each table.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from ..clique import is_clique, is_inclusion_maximal, is_local_optimum, solution_from_members
from ..stats import AllTiedError, benjamini_hochberg, ratio_ranking, sign_test
from .sweep import latest_complete

SAMPLER_ORDER = ("exp3", "raw", "baseline", "zscore", "oce:0.01", "oce:0.1", "cdf", "scaled_cdf")
RULE_ORDER = ("sga", "adagrad", "adam")


def _ordered(seen, preference):
    known = [name for name in preference if name in seen]
    extra = sorted(name for name in seen if name not in preference)
    return known + extra


def verify_clique_records(records, graphs):
    """Check each stored best solution against the optimality predicates.

    Returns one row per complete record with ``clique``,
    ``inclusion_maximal``, ``local_optimum`` and ``size`` filled in.
    """
    rows = []
    for record in latest_complete(records):
        if record.get("problem") != "clique":
            continue
        graph = graphs[record["graph"]]
        vertices = record["best_x"]
        x = solution_from_members(vertices, graph.n)
        clique = is_clique(vertices, graph)
        rows.append(
            {
                "graph": record["graph"],
                "sampler": record["sampler"],
                "update_rule": record["update_rule"],
                "kappa": record["kappa"],
                "seed": record["seed"],
                "best_y": record["best_y"],
                "best_sample_index": record["best_sample_index"],
                "total_evaluations": record["total_evaluations"],
                "size": len(vertices),
                "clique": clique,
                "inclusion_maximal": clique and is_inclusion_maximal(vertices, graph),
                "local_optimum": is_local_optimum(x, graph, record["kappa"]),
            }
        )
    return rows


@dataclass
class MetricTable:
    """Rules-by-samplers aggregate with per-cell significance flags."""

    name: str
    rules: list
    samplers: list
    values: dict
    stars: dict = field(default_factory=dict)

    def value(self, rule, sampler):
        return self.values.get((rule, sampler))

    def starred(self, rule, sampler):
        return self.stars.get((rule, sampler), False)

    def to_csv(self, path):
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            header = ["rule"]
            for sampler in self.samplers:
                header += [sampler, f"{sampler}_sig"]
            writer.writerow(header)
            for rule in self.rules:
                row = [rule]
                for sampler in self.samplers:
                    value = self.value(rule, sampler)
                    row.append("" if value is None else f"{value:.4f}")
                    row.append("*" if self.starred(rule, sampler) else "")
                writer.writerow(row)


def _paired_stars(per_unit, methods, rules, samplers, reference, higher_is_better, q):
    """One-sided sign tests of the reference sampler against every other
    sampler under the same rule, FDR-controlled within the table."""
    tests = []
    for rule in rules:
        ref_units = per_unit.get((rule, reference))
        if not ref_units:
            continue
        for sampler in samplers:
            if sampler == reference:
                continue
            other_units = per_unit.get((rule, sampler))
            if not other_units:
                continue
            shared = sorted(set(ref_units) & set(other_units))
            if not shared:
                continue
            ref_scores = [ref_units[u] for u in shared]
            other_scores = [other_units[u] for u in shared]
            try:
                p = sign_test(ref_scores, other_scores, higher_is_better=higher_is_better)
            except AllTiedError:
                continue
            tests.append(((rule, sampler), p))
    if not tests:
        return {}
    flags = benjamini_hochberg([p for _, p in tests], q)
    return {key: bool(flag) for (key, _), flag in zip(tests, flags)}


def evaluate_clique_results(records, graphs, best_known=None, reference="scaled_cdf", q=0.01):
    """Build the four clique metric tables from sweep records.

    ``best_known`` maps graph id to the best known clique size; graphs
    missing from it are left out of the size-ratio table (a warning is
    returned).  Methods whose inclusion-maximal rate is zero are excluded
    from the best-sample-ratio table.  Returns ``(tables, warnings)`` where
    ``tables`` maps table name to a MetricTable.
    """
    rows = verify_clique_records(records, graphs)
    if not rows:
        raise ValueError("no complete clique records to evaluate")
    best_known = best_known or {}
    warnings = []

    rules = _ordered({r["update_rule"] for r in rows}, RULE_ORDER)
    samplers = _ordered({r["sampler"] for r in rows}, SAMPLER_ORDER)
    graph_ids = sorted({r["graph"] for r in rows})
    methods = [(rule, sampler) for rule in rules for sampler in samplers]
    by_method = {
        method: [r for r in rows if (r["update_rule"], r["sampler"]) == method]
        for method in methods
    }

    def mean_by_unit(method_rows, unit_of, value_of):
        units = {}
        for row in method_rows:
            units.setdefault(unit_of(row), []).append(value_of(row))
        return {unit: float(np.mean(vals)) for unit, vals in units.items()}

    cell_unit = lambda r: (r["graph"], r["kappa"])
    local_units = {
        method: mean_by_unit(by_method[method], cell_unit, lambda r: float(r["local_optimum"]))
        for method in methods
        if by_method[method]
    }
    ratio_units = {
        method: mean_by_unit(
            by_method[method],
            cell_unit,
            lambda r: r["best_sample_index"] / r["total_evaluations"],
        )
        for method in methods
        if by_method[method]
    }
    incmax_units = {}
    size_units = {}
    missing_known = set()
    for method in methods:
        method_rows = by_method[method]
        if not method_rows:
            continue
        per_graph_incmax = {}
        per_graph_size = {}
        for row in method_rows:
            gid = row["graph"]
            found = row["inclusion_maximal"]
            per_graph_incmax[gid] = max(per_graph_incmax.get(gid, 0.0), float(found))
            if found:
                per_graph_size[gid] = max(per_graph_size.get(gid, 0), row["size"])
        incmax_units[method] = per_graph_incmax
        ratios = {}
        for gid in per_graph_incmax:
            if gid not in best_known:
                missing_known.add(gid)
                continue
            ratios[gid] = per_graph_size.get(gid, 0) / best_known[gid]
        size_units[method] = ratios
    for gid in sorted(missing_known):
        warnings.append(f"graph {gid} has no best-known clique size; omitted from size ratios")

    def table(name, units, higher_is_better, exclude=None):
        values = {}
        for method in methods:
            method_units = units.get(method)
            if method_units is None or (exclude and exclude(method)):
                values[method] = None
            elif not method_units:
                values[method] = None
            else:
                values[method] = float(np.mean(list(method_units.values())))
        pruned = {m: u for m, u in units.items() if not (exclude and exclude(m))}
        stars = _paired_stars(pruned, methods, rules, samplers, reference, higher_is_better, q)
        return MetricTable(name, rules, samplers, values, stars)

    incmax_rate = {
        method: float(np.mean(list(units.values()))) if units else 0.0
        for method, units in incmax_units.items()
    }
    never_maximal = lambda method: incmax_rate.get(method, 0.0) == 0.0

    tables = {
        "local_opt": table("local_opt", local_units, higher_is_better=True),
        "inclusion_max": table("inclusion_max", incmax_units, higher_is_better=True),
        "best_sample_ratio": table(
            "best_sample_ratio", ratio_units, higher_is_better=False, exclude=never_maximal
        ),
        "clique_size_ratio": table("clique_size_ratio", size_units, higher_is_better=True),
    }
    return tables, warnings


@dataclass
class KmedoidsEvaluation:
    objective: object
    evaluations: object
    datasets: list
    warnings: list

    def to_csv(self, path):
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            n = len(self.objective.methods)
            header = ["criterion"]
            for i in range(n):
                header += [f"rank{i + 1}", f"ratio{i + 1}"]
                if i < n - 1:
                    header += [f"p{i + 1}{i + 2}", f"sig{i + 1}{i + 2}"]
            writer.writerow(header)
            for name, ranking in (("objective", self.objective), ("evaluations", self.evaluations)):
                row = [name]
                for i in range(n):
                    row += [ranking.methods[i], f"{ranking.avg_ratios[i]:.4f}"]
                    if i < n - 1:
                        row += [
                            f"{ranking.p_values[i]:.4g}",
                            "*" if ranking.significant[i] else "",
                        ]
                writer.writerow(row)


def evaluate_kmedoids_results(records, q=0.01):
    """Rank k-medoids methods by objective value and by evaluation count.

    Scores are averaged over seeds per (method, dataset); datasets missing
    any method are dropped with a warning.  The two rankings' adjacent-pair
    p-values are FDR-controlled jointly, as one family.
    """
    rows = [r for r in latest_complete(records) if r.get("problem") == "kmedoids"]
    if not rows:
        raise ValueError("no complete k-medoids records to evaluate")
    warnings = []
    methods = sorted({r["sampler"] for r in rows})

    per_dataset = {}
    for row in rows:
        per_dataset.setdefault(row["dataset"], {}).setdefault(row["sampler"], []).append(row)
    datasets = []
    for dataset in sorted(per_dataset):
        missing = [m for m in methods if m not in per_dataset[dataset]]
        if missing:
            warnings.append(f"dataset {dataset} lacks methods {missing}; dropped")
        else:
            datasets.append(dataset)
    if not datasets:
        raise ValueError("no dataset has complete method coverage")

    def score_table(value_of):
        table = np.empty((len(methods), len(datasets)))
        for i, method in enumerate(methods):
            for j, dataset in enumerate(datasets):
                table[i, j] = float(np.mean([value_of(r) for r in per_dataset[dataset][method]]))
        return table

    objective = ratio_ranking(score_table(lambda r: r["cost"]), methods, q=q)
    evaluations = ratio_ranking(score_table(lambda r: r["total_evaluations"]), methods, q=q)

    joint = np.concatenate([objective.p_values, evaluations.p_values])
    if joint.size:
        flags = benjamini_hochberg(joint, q)
        objective.significant = flags[: objective.p_values.size]
        evaluations.significant = flags[objective.p_values.size :]
    return KmedoidsEvaluation(objective, evaluations, datasets, warnings)


def load_best_known_csv(path):
    """Read ``graph_id,best_known`` rows into a dict (header optional)."""
    table = {}
    with open(path, newline="") as handle:
        for row in csv.reader(handle):
            if not row or len(row) < 2:
                continue
            try:
                table[row[0].strip()] = int(row[1])
            except ValueError:
                continue  # header or stray line
    return table
