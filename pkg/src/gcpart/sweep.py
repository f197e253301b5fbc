"""Benchmark sweeps: expand a plan into runs, execute them, write CSV tables."""
from __future__ import annotations

import csv
import hashlib
import itertools
import json
import logging
import math
import os
import sys
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .ga import GaConfig, run_ga, static_baseline
from .generators import FAMILIES, generate
from .graph import Mode, build_graph
from .model import CSV_COLUMNS, EbitReport
from .network import QpuNetwork

log = logging.getLogger(__name__)

METHODS = {"gcp-s": Mode.SIMPLE, "gcp-e": Mode.EXTENDED, "static": Mode.EXTENDED}
JOBS_ENV = "GCPART_JOBS"
SUMMARY_COLUMNS = ("family", "p", "method", "runs", "mean_ratio", "mean_ebits")
TIMING_COLUMNS = ("family", "n_q", "d", "method", "runs", "mean_wall_ms")


@dataclass(frozen=True)
class RunSpec:
    family: str
    n_q: int
    method: str
    seed: int
    params: tuple[tuple[str, Any], ...] = ()
    capacity: int = 8
    qpus: tuple[int, ...] | None = None
    restarts: int = 1

    def network(self) -> QpuNetwork:
        if self.qpus:
            return QpuNetwork(self.qpus)
        return QpuNetwork.homogeneous(max(1, math.ceil(self.n_q / self.capacity)), self.capacity)

    def config_hash(self, ga: GaConfig) -> str:
        blob = json.dumps({"run": asdict(self), "ga": asdict(ga)}, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ExperimentPlan:
    families: tuple[dict[str, Any], ...] = ()
    methods: tuple[str, ...] = ("gcp-s", "gcp-e")
    seeds: tuple[int, ...] = (0,)
    capacity: int = 8
    qpus: tuple[int, ...] | None = None
    restarts: int = 1
    ga: GaConfig = field(default_factory=GaConfig)

    @classmethod
    def from_toml(cls, text: str) -> "ExperimentPlan":
        data = tomllib.loads(text)
        seeds = data.get("seeds", [0])
        seeds = tuple(range(seeds)) if isinstance(seeds, int) else tuple(int(s) for s in seeds)
        methods = tuple(data.get("methods", ("gcp-s", "gcp-e")))
        for m in methods:
            if m not in METHODS:
                raise ValueError(f"unknown method {m!r}; choose from {sorted(METHODS)}")
        families = tuple(data.get("family", ()))
        for fam in families:
            if fam.get("family") not in FAMILIES:
                raise ValueError(f"unknown family {fam.get('family')!r}; choose from {FAMILIES}")
            if "n_q" not in fam:
                raise ValueError(f"family {fam['family']!r} is missing n_q")
        qpus = data.get("qpus")
        return cls(
            families=families,
            methods=methods,
            seeds=seeds,
            capacity=int(data.get("capacity", 8)),
            qpus=tuple(qpus) if qpus else None,
            restarts=int(data.get("restarts", 1)),
            ga=GaConfig.from_mapping(data.get("ga", {})),
        )

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentPlan":
        return cls.from_toml(Path(path).read_text())

    def runs(self) -> Iterator[RunSpec]:
        """Expand the grid: each family's list-valued keys are crossed."""
        for fam in self.families:
            grid = {k: v if isinstance(v, list) else [v] for k, v in fam.items() if k != "family"}
            keys = sorted(grid)
            for values in itertools.product(*(grid[k] for k in keys)):
                cell = dict(zip(keys, values))
                n_q = int(cell.pop("n_q"))
                for method, seed in itertools.product(self.methods, self.seeds):
                    yield RunSpec(fam["family"], n_q, method, seed, tuple(sorted(cell.items())),
                                  self.capacity, self.qpus, self.restarts)


def execute(run: RunSpec, ga: GaConfig) -> tuple[dict[str, Any], EbitReport | None]:
    """Run one cell; failures are captured in the row's ``error`` column."""
    params = dict(run.params)
    row: dict[str, Any] = {k: "" for k in CSV_COLUMNS}
    row.update(family=run.family, n_q=run.n_q, p=params.get("p", ""), method=run.method,
               seed=run.seed, config_hash=run.config_hash(ga))
    try:
        circuit = generate(run.family, run.n_q, seed=run.seed, **params)
        row["d"] = circuit.depth
        net = run.network()
        start = time.perf_counter()
        graph = build_graph(circuit, net, METHODS[run.method])
        if run.method == "static":
            report = static_baseline(graph, net, seed=run.seed)
        else:
            report = best_of(graph, net, ga.replace(seed=run.seed), run.restarts)
        row["wall_ms"] = round((time.perf_counter() - start) * 1000, 3)
        row.update(ebits=report.total, two_qubit_gates=report.two_qubit_gates, ratio=round(report.ratio, 6))
        return row, report
    except Exception as exc:  # recorded per row so the sweep keeps going
        log.exception("run %s failed", run)
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row, None


def best_of(graph, net: QpuNetwork, ga: GaConfig, restarts: int = 1, target: float | None = None) -> EbitReport:
    """Best report over ``restarts`` GA runs with consecutive seeds, stopping early at ``target``."""
    best = None
    for k in range(max(restarts, 1)):
        report = run_ga(graph, net, ga.replace(seed=ga.seed + k)).report
        if best is None or report.total < best.total:
            best = report
        if target is not None and best.total <= target:
            break
    return best


def _execute_row(args: tuple[RunSpec, GaConfig]) -> dict[str, Any]:
    return execute(*args)[0]


def run_sweep(plan: ExperimentPlan, out_dir: str | Path, jobs: int | None = None) -> list[dict[str, Any]]:
    """Execute every run of ``plan`` and write ``results.csv``, ``summary.csv`` and ``timing.csv``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    jobs = jobs or int(os.environ.get(JOBS_ENV, "1"))
    runs = [(r, plan.ga) for r in plan.runs()]
    rows: list[dict[str, Any]] = []
    with open(out / "results.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        if jobs > 1 and len(runs) > 1:
            with ProcessPoolExecutor(jobs) as pool:
                results: Iterable[dict[str, Any]] = pool.map(_execute_row, runs)
                for row in results:
                    writer.writerow(row)
                    fh.flush()
                    rows.append(row)
        else:
            for args in runs:
                row = _execute_row(args)
                writer.writerow(row)
                fh.flush()
                rows.append(row)
    _write_table(out / "summary.csv", SUMMARY_COLUMNS, summarize(rows))
    _write_table(out / "timing.csv", TIMING_COLUMNS, timing_table(rows))
    return rows


def summarize(rows: list[dict[str, Any]]) -> list[dict[str, Any]]:
    """Mean ratio per (family, p, method), the layout of a Table-1 style comparison."""
    cells: dict[tuple, list[dict]] = defaultdict(list)
    for row in rows:
        if not row["error"]:
            cells[(row["family"], row["p"], row["method"])].append(row)
    out = []
    for (family, p, method), group in sorted(cells.items(), key=lambda kv: tuple(map(str, kv[0]))):
        out.append({
            "family": family,
            "p": p,
            "method": method,
            "runs": len(group),
            "mean_ratio": round(sum(float(r["ratio"]) for r in group) / len(group), 6),
            "mean_ebits": round(sum(float(r["ebits"]) for r in group) / len(group), 3),
        })
    return out


def timing_table(rows: list[dict[str, Any]]) -> list[dict[str, Any]]:
    cells: dict[tuple, list[float]] = defaultdict(list)
    for row in rows:
        if not row["error"]:
            cells[(row["family"], row["n_q"], row["d"], row["method"])].append(float(row["wall_ms"]))
    return [
        {"family": f, "n_q": n, "d": d, "method": m, "runs": len(ts), "mean_wall_ms": round(sum(ts) / len(ts), 3)}
        for (f, n, d, m), ts in sorted(cells.items(), key=lambda kv: tuple(map(str, kv[0])))
    ]


def format_summary(summary: list[dict[str, Any]]) -> str:
    """Rows are families (with p), columns are methods."""
    methods = sorted({r["method"] for r in summary})
    table: dict[str, dict[str, float]] = defaultdict(dict)
    for r in summary:
        label = r["family"] if r["p"] in ("", None) else f"{r['family']} {r['p']}"
        table[label][r["method"]] = r["mean_ratio"]
    width = max([len(k) for k in table] + [6])
    lines = [" " * width + "".join(f"{m:>10}" for m in methods)]
    for label, vals in table.items():
        lines.append(f"{label:<{width}}" + "".join(
            f"{vals[m]:>10.3f}" if m in vals else f"{'-':>10}" for m in methods))
    return "\n".join(lines)


def _write_table(path: Path, columns: tuple[str, ...], rows: list[dict[str, Any]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
