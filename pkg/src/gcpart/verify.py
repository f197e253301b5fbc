"""Randomised invariant suite over small instances."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circuit import Circuit, layer_circuit
from .ga import GaConfig, run_ga, static_baseline
from .generators import generate, make_rng
from .graph import Mode, build_graph
from .model import brute_force_optimum, cost_extended, cost_simple, is_valid
from .network import QpuNetwork
from .reference import audit_groups, edge_walk_cost_extended, edge_walk_cost_simple

log = logging.getLogger(__name__)

CHECKS = ("dominance", "capacity", "oracle", "grouping", "optimum")


@dataclass
class VerifyReport:
    trials: int
    passed: dict[str, int] = field(default_factory=lambda: dict.fromkeys(CHECKS, 0))
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        lines = [f"{name:<10} {self.passed[name]}/{self.trials}" for name in CHECKS]
        lines.append("PASS" if self.ok else f"FAIL ({len(self.failures)} failures)")
        return "\n".join(lines)


def truncate(circuit: Circuit, depth: int) -> Circuit:
    """Keep only the first ``depth`` layers."""
    return layer_circuit([g for g in circuit.gates if g.layer < depth], circuit.n_q)


def random_assignment(depth: int, net: QpuNetwork, rng: np.random.Generator) -> np.ndarray:
    """Uniform over valid assignments: an independent random permutation of the labels per layer."""
    return rng.permuted(np.tile(net.default_row(), (depth, 1)), axis=1)


def run_verify(
    n_max: int = 4,
    d_max: int = 3,
    trials: int = 100,
    seed: int = 0,
    net: QpuNetwork | None = None,
    ga_config: GaConfig | None = None,
    cost_extended_fn: Callable = cost_extended,
) -> VerifyReport:
    """Check the cost model and solver on ``trials`` random small circuits.

    ``cost_extended_fn`` is injectable so a deliberately broken cost function
    can confirm that the dominance check bites.
    """
    net = net or QpuNetwork((2, 2))
    ga_config = ga_config or GaConfig(population=20, generations=40)
    rng = make_rng(seed)
    report = VerifyReport(trials)
    if trials == 0:
        log.warning("verify called with zero trials; nothing was checked")
    for t in range(trials):
        n_q = int(rng.integers(2, min(n_max, net.n_phys) + 1))
        family = ("cp-fraction", "qaoa", "qv", "qft")[t % 4]
        sub_seed = int(rng.integers(2**32))
        circuit = generate(family, n_q, seed=sub_seed, d=int(rng.integers(1, d_max + 1)),
                           p=float(rng.uniform(0.3, 1.0)), rounds=1)
        circuit = truncate(circuit, int(rng.integers(1, d_max + 1)))
        ext = build_graph(circuit, net, Mode.EXTENDED)
        simple = build_graph(circuit, net, Mode.SIMPLE)
        a = random_assignment(circuit.depth, net, rng)
        label = f"trial {t} ({family}, n_q={n_q}, d={circuit.depth})"

        c_s = cost_simple(simple, a, net)
        c_e = cost_extended_fn(ext, a, net)
        _record(report, "dominance", c_e <= c_s, f"{label}: extended {c_e} > simple {c_s}")

        result = run_ga(ext, net, ga_config.replace(seed=sub_seed))
        _record(report, "capacity", is_valid(a, ext, net) and is_valid(result.population, ext, net),
                f"{label}: capacity violated")

        ref_s = edge_walk_cost_simple(circuit, a, net)
        ref_e = edge_walk_cost_extended(circuit, ext.groups, a, net)
        _record(report, "oracle", ref_s == c_s and ref_e == c_e,
                f"{label}: cost {c_s}/{c_e} vs edge walk {ref_s}/{ref_e}")

        problems = audit_groups(circuit, ext.groups)
        _record(report, "grouping", not problems, f"{label}: {problems}")

        optimum, _ = brute_force_optimum(ext, net)
        static = static_baseline(ext, net, seed=sub_seed).total
        _record(report, "optimum", optimum <= result.best_cost and optimum <= static,
                f"{label}: brute force {optimum} above GA {result.best_cost} or static {static}")
    return report


def _record(report: VerifyReport, check: str, ok: bool, message: str) -> None:
    if ok:
        report.passed[check] += 1
    else:
        report.failures.append(f"[{check}] {message}")
